"""Delimiter-separated capture files.

Layout: optional preamble lines (instrument settings, anything that is not a
row of numbers), one header row of column labels, then numeric rows. Comma
or tab is detected from the header. Preamble lines of the form
``key,value[,value...]`` land in ``Capture.metadata``; two keys are read for
the timebase and units instead:

    Sample Interval,1e-09
    Vertical Units,V,A

Values are written with ``repr`` so simulator captures read back bit-exact.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import IoFailure, MalformedRow, MissingColumn, NonUniformTimebase
from .waveform import Capture, Waveform, require_aligned

JITTER_TOL = 1e-6
SAMPLE_INTERVAL = "Sample Interval"
VERTICAL_UNITS = "Vertical Units"
TRUTH_SUFFIX = ".truth"


@dataclass(frozen=True)
class ColumnSpec:
    """Which columns to read. ``values=None`` takes every non-time column."""

    time: str = "time"
    values: Optional[Sequence[str]] = None
    units: Optional[Mapping[str, str]] = None


def _split(line, delim):
    return [f.strip() for f in line.rstrip("\r\n").split(delim)]


def _numeric(fields):
    try:
        return [float(f) for f in fields]
    except ValueError:
        return None


def _read_lines(path):
    try:
        with open(path, encoding="utf-8-sig") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read: {exc.strerror}", path) from exc


def _find_header(lines, path):
    """Index of the header row: the last non-numeric line before the data."""
    for k, line in enumerate(lines):
        if not line.strip():
            continue
        delim = "\t" if "\t" in line else ","
        if _numeric(_split(line, delim)) is not None:
            if k == 0 or not lines[k - 1].strip():
                raise MalformedRow("numeric data without a header row", path, k + 1)
            return k - 1
    raise MalformedRow("no numeric data rows found", path, len(lines) or None)


def parse_capture_csv(path, column_spec=None):
    """Read a capture file into a :class:`Capture`.

    ``column_spec`` is a :class:`ColumnSpec` or just the time column label.
    """
    if column_spec is None:
        column_spec = ColumnSpec()
    elif isinstance(column_spec, str):
        column_spec = ColumnSpec(time=column_spec)
    path = Path(path)
    lines = _read_lines(path)
    h = _find_header(lines, path)
    delim = "\t" if "\t" in lines[h] else ","
    header = _split(lines[h], delim)

    metadata = {}
    interval = None
    vunits = None
    for line in lines[:h]:
        if not line.strip():
            continue
        parts = _split(line, delim)
        key, rest = parts[0], [p for p in parts[1:]]
        while rest and rest[-1] == "":
            rest.pop()
        if key == SAMPLE_INTERVAL and len(rest) == 1 and _numeric(rest):
            interval = float(rest[0])
        elif key == VERTICAL_UNITS and rest:
            vunits = rest
        else:
            metadata[key] = delim.join(rest)

    lower = {c.lower(): c for c in header}
    tcol = column_spec.time if column_spec.time in header else lower.get(column_spec.time.lower())
    if tcol is None:
        raise MissingColumn(f"no time column {column_spec.time!r} in header {header}", path, h + 1)
    value_cols = list(column_spec.values) if column_spec.values is not None \
        else [c for c in header if c != tcol]
    for c in value_cols:
        if c not in header:
            raise MissingColumn(f"no column {c!r} in header {header}", path, h + 1)
    if not value_cols:
        raise MissingColumn("need at least one value column", path, h + 1)

    rows = []
    for k in range(h + 1, len(lines)):
        line = lines[k]
        if not line.strip():
            continue
        fields = _split(line, delim)
        if len(fields) != len(header):
            raise MalformedRow(f"expected {len(header)} fields, got {len(fields)}", path, k + 1)
        vals = _numeric(fields)
        if vals is None or not all(np.isfinite(vals)):
            raise MalformedRow(f"non-numeric or non-finite value in {line.strip()!r}", path, k + 1)
        rows.append(vals)
    data = np.array(rows, dtype=float)
    if data.shape[0] < 2:
        raise MalformedRow("need at least two data rows", path, h + 2)

    t = data[:, header.index(tcol)]
    n = t.size
    dt_fit = (t[-1] - t[0]) / (n - 1)
    if not dt_fit > 0:
        raise NonUniformTimebase("time column does not increase", path, h + 2)
    dt = interval if interval is not None and abs(interval - dt_fit) <= JITTER_TOL * dt_fit \
        else dt_fit
    dev = np.abs(t - (t[0] + dt * np.arange(n)))
    if dev.max() > JITTER_TOL * dt:
        k = int(np.argmax(dev))
        raise NonUniformTimebase(f"sample time deviates by {dev[k] / dt:.3g} dt from a uniform grid",
                                 path, h + 2 + k)

    units = {}
    if vunits is not None and len(vunits) == len(header) - 1:
        units = dict(zip([c for c in header if c != tcol], vunits))
    if column_spec.units:
        units.update(column_spec.units)
    channels = {}
    for c in value_cols:
        channels[c] = Waveform(float(t[0]), dt, data[:, header.index(c)],
                               units.get(c, "V"), c)
    return Capture(channels, metadata)


def write_capture_csv(capture, path, delimiter=","):
    """Write a capture whose channels share one time grid."""
    waves = list(capture.channels.values())
    require_aligned(*waves)
    labels = list(capture.channels)
    w0 = waves[0]
    t = w0.t0 + w0.dt * np.arange(len(w0))
    out = []
    for k, v in capture.metadata.items():
        out.append(f"{k}{delimiter}{v}")
    out.append(f"{SAMPLE_INTERVAL}{delimiter}{w0.dt!r}")
    out.append(delimiter.join([VERTICAL_UNITS] + [w.unit for w in waves]))
    out.append(delimiter.join(["time"] + labels))
    cols = [t] + [w.samples for w in waves]
    for row in zip(*cols):
        out.append(delimiter.join(repr(float(x)) for x in row))
    try:
        Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write: {exc.strerror}", path) from exc


def truth_path(capture_path):
    p = Path(capture_path)
    return p.with_name(p.name + TRUTH_SUFFIX)


def write_truth(truth_dict, path):
    """Ground-truth sidecar: ``key = value`` lines, floats via repr."""
    lines = [f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}"
             for k, v in truth_dict.items()]
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write: {exc.strerror}", path) from exc


def read_truth(path):
    from .config import read_key_values

    return {k: v for _, k, v in read_key_values(path)}
