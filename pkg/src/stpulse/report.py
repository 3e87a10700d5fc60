"""Analysis reports in three formats.

* ``structured``: JSON, reads back to an equal :class:`Report`.
* ``table``: aligned text, energies in µJ with three decimals.
* ``plot-data``: whitespace-separated x/y columns per series, ``#`` comments.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import IoFailure
from .loss_model import CrossValidation, LossBreakdown
from .waveform import TimeWindow

FORMATS = ("structured", "table", "plot-data")
SCHEMA = "stpulse-report/1"

_COLUMNS = (("E_on", "e_on"), ("E_off", "e_off"), ("E_charge", "e_charge"),
            ("E_overlap", "e_overlap"), ("E_hysteresis", "e_hysteresis"))


@dataclass(frozen=True, eq=False)
class Series:
    x_name: str
    y_name: str
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        y = np.array(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("series x and y must be 1-D and equally long")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (self.x_name == other.x_name and self.y_name == other.y_name
                and np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y))

    def __len__(self):
        return self.x.size


@dataclass(frozen=True)
class Report:
    kind: str
    breakdown: Optional[LossBreakdown] = None
    cross_validation: Optional[CrossValidation] = None
    windows: Dict[str, TimeWindow] = field(default_factory=dict)
    measurements: Dict[str, Tuple[float, str]] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    series: Dict[str, Series] = field(default_factory=dict)


def file_digest(path):
    h = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for block in iter(lambda: fh.read(1 << 16), b""):
                h.update(block)
    except OSError as exc:
        raise IoFailure(f"cannot read: {exc.strerror}", path) from exc
    return h.hexdigest()


def provenance_for(*paths):
    from . import __version__

    return {"tool": "stpulse", "version": __version__,
            "inputs": {str(p): {"sha256": file_digest(p)} for p in paths}}


# -- structured ------------------------------------------------------------------

def report_to_dict(report):
    d = {"schema": SCHEMA, "kind": report.kind, "energy_unit": "J"}
    d["breakdown"] = None if report.breakdown is None else report.breakdown.as_dict()
    cv = report.cross_validation
    d["cross_validation"] = None if cv is None else {
        "model_hysteresis": cv.model_hysteresis, "st_hysteresis": cv.st_hysteresis,
        "discrepancy": cv.discrepancy}
    d["windows"] = {k: {"t_start": w.t_start, "t_end": w.t_end, "unit": "s"}
                    for k, w in report.windows.items()}
    d["measurements"] = {k: {"value": v, "unit": u} for k, (v, u) in report.measurements.items()}
    d["config"] = report.config
    d["provenance"] = report.provenance
    d["series"] = {k: {"x_name": s.x_name, "y_name": s.y_name,
                       "x": s.x.tolist(), "y": s.y.tolist()} for k, s in report.series.items()}
    return d


def report_from_dict(d):
    if d.get("schema") != SCHEMA:
        raise ValueError(f"not a report: schema {d.get('schema')!r}")
    bd = d.get("breakdown")
    cv = d.get("cross_validation")
    return Report(
        kind=d["kind"],
        breakdown=None if bd is None else LossBreakdown(**bd),
        cross_validation=None if cv is None else CrossValidation(**cv),
        windows={k: TimeWindow(w["t_start"], w["t_end"]) for k, w in d["windows"].items()},
        measurements={k: (m["value"], m["unit"]) for k, m in d["measurements"].items()},
        config=d["config"],
        provenance=d["provenance"],
        series={k: Series(s["x_name"], s["y_name"], s["x"], s["y"])
                for k, s in d["series"].items()},
    )


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_structured(report):
    return json.dumps(report_to_dict(report), indent=2, default=_jsonable) + "\n"


# -- table -----------------------------------------------------------------------

def _uj(x):
    return f"{x * 1e6:.3f}"


def breakdown_row(breakdown):
    """The five loss-separation columns, µJ with three decimals."""
    return [_uj(getattr(breakdown, attr)) for _, attr in _COLUMNS]


def _align(rows, indent="  "):
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return [indent + "  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def render_table(report):
    out = [f"{report.kind} report"]
    if report.breakdown is not None:
        out.append("")
        out.append("Loss separation (uJ)")
        out += _align([[name for name, _ in _COLUMNS], breakdown_row(report.breakdown)])
    cv = report.cross_validation
    if cv is not None:
        out.append("")
        out.append("Hysteresis cross-check (uJ)")
        out += _align([["model", "Sawyer-Tower", "difference"],
                       [_uj(cv.model_hysteresis), _uj(cv.st_hysteresis), _uj(cv.discrepancy)]])
    if report.measurements:
        out.append("")
        out.append("Measurements")
        rows = []
        for k, (v, u) in report.measurements.items():
            rows.append([k, _uj(v), "uJ"] if u == "J" else [k, f"{v:.6g}", u])
        out += _align(rows)
    if report.windows:
        out.append("")
        out.append("Windows (s)")
        out += _align([[k, f"{w.t_start:.6e}", f"{w.t_end:.6e}"]
                       for k, w in report.windows.items()])
    inputs = report.provenance.get("inputs", {})
    if inputs:
        out.append("")
        out.append("Inputs")
        out += [f"  {p}  sha256:{info['sha256']}" for p, info in inputs.items()]
    return "\n".join(out) + "\n"


# -- plot data -------------------------------------------------------------------

def render_series(name, series):
    lines = [f"# series: {name}", f"# columns: {series.x_name} {series.y_name}"]
    lines += [f"{x!r} {y!r}" for x, y in zip(series.x.tolist(), series.y.tolist())]
    return "\n".join(lines) + "\n"


def render_plot_data(report):
    # blank lines between blocks so gnuplot-style tools see separate data sets
    return "\n\n".join(render_series(k, s) for k, s in report.series.items())


def read_plot_data(path):
    """Parse plot-data text back into ``{name: Series}``."""
    out = {}
    name = cols = None
    xs, ys = [], []

    def flush():
        if name is not None:
            out[name] = Series(cols[0], cols[1], xs, ys)

    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# series:"):
            flush()
            name, xs, ys = line.split(":", 1)[1].strip(), [], []
        elif line.startswith("# columns:"):
            cols = line.split(":", 1)[1].split()
        elif line.strip() and not line.startswith("#"):
            x, y = line.split()
            xs.append(float(x))
            ys.append(float(y))
    flush()
    return out


def render_report(report, fmt="structured"):
    if fmt == "structured":
        return render_structured(report)
    if fmt == "table":
        return render_table(report)
    if fmt == "plot-data":
        return render_plot_data(report)
    raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")


def write_report(report, fmt, path):
    text = render_report(report, fmt)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write: {exc.strerror}", path) from exc


def read_report(path):
    """Read a structured report."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read: {exc.strerror}", path) from exc
    return report_from_dict(json.loads(text))
