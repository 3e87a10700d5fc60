"""Analysis configuration: flat ``key = value`` files with SI suffixes.

Example::

    # Sawyer-Tower + half-bridge analysis
    c_ref = 10n            # reference capacitor, F
    shunt = 10.4m          # V/A
    i_ds_unit = V          # the i_ds column holds shunt volts
    bus_voltage = 400
    channel.v_ds = CH1
    channel.i_ds = CH2
    deskew.i_ds = -1.5n
    window.turnoff = 2.1u, 2.4u
"""

import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from .errors import IoFailure, MissingRequired, UnknownKey, UnparseableValue
from .waveform import TimeWindow, align, transform

SI_PREFIXES = {
    "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "μ": 1e-6,
    "m": 1e-3, "k": 1e3, "M": 1e6, "G": 1e9,
}

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_SI_RE = re.compile(rf"^\s*({_NUMBER})\s*([pnuµμmkMG]?)([A-Za-zΩ/]*)\s*$")

ROLES = ("v_ds", "i_ds", "v_ref", "v_dut", "v_src", "gate", "i_channel")
WINDOWS = ("turnoff", "turnon", "st_period")


def parse_si(text):
    """Parse a number with an optional SI prefix and unit, e.g. ``10.4mV/A``.

    A letter directly after the number is read as a prefix when it is one of
    p n u µ m k M G; anything after that is treated as a unit and ignored.
    """
    m = _SI_RE.match(str(text))
    if not m:
        raise ValueError(f"not a number: {text!r}")
    num, prefix, _unit = m.groups()
    return float(num) * SI_PREFIXES.get(prefix, 1.0)


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class AnalysisConfig:
    channel_map: Dict[str, str] = field(default_factory=lambda: {r: r for r in ROLES})
    i_ds_unit: str = "A"
    shunt_volts_per_amp: Optional[float] = None
    c_ref: Optional[float] = None
    bus_voltage: Optional[float] = None
    low_frac: float = 0.1
    high_frac: float = 0.9
    settle_samples: int = 10
    deskew: Dict[str, float] = field(default_factory=dict)
    smoothing_points: int = 5
    window_overrides: Dict[str, TimeWindow] = field(default_factory=dict)
    extend_to_onset: bool = True
    st_frequency: Optional[float] = None
    monotone_tol: float = 0.0
    e_charge_source: str = "st"

    def __post_init__(self):
        if not 0 < self.low_frac < self.high_frac < 1:
            raise ValueError(f"need 0 < low_frac < high_frac < 1, got "
                             f"{self.low_frac}, {self.high_frac}")
        if self.i_ds_unit not in ("A", "V"):
            raise ValueError(f"i_ds_unit must be 'A' or 'V', got {self.i_ds_unit!r}")
        if self.shunt_volts_per_amp is not None and not self.shunt_volts_per_amp > 0:
            raise ValueError("shunt must be positive")
        if self.smoothing_points < 1 or self.smoothing_points % 2 == 0:
            raise ValueError("smoothing_points must be odd and >= 1")
        if self.e_charge_source not in ("st", "pulse"):
            raise ValueError("e_charge_source must be 'st' or 'pulse'")

    @property
    def thresholds(self):
        return self.low_frac, self.high_frac

    def require(self, mode, path=None):
        """Check the keys a given analysis needs ('st', 'pulse' or 'separate')."""
        if mode in ("st", "separate") and self.c_ref is None:
            raise MissingRequired("c_ref is required for Sawyer-Tower analysis", path)
        if mode in ("pulse", "separate") and self.i_ds_unit == "V" \
                and self.shunt_volts_per_amp is None:
            raise MissingRequired("shunt is required when i_ds is a voltage column", path)
        return self

    def bus_voltage_for(self, v_ds):
        """Configured bus voltage, or the median of the upper half of v_ds."""
        if self.bus_voltage is not None:
            return self.bus_voltage
        y = v_ds.samples
        top = y[y >= 0.5 * y.max()]
        return float(np.median(top))

    def to_dict(self):
        d = {}
        for f in fields(self):
            val = getattr(self, f.name)
            if f.name == "window_overrides":
                val = {k: [w.t_start, w.t_end] for k, w in val.items()}
            elif isinstance(val, dict):
                val = dict(val)
            d[f.name] = val
        return d

    @classmethod
    def from_dict(cls, d):
        kw = dict(d)
        if "window_overrides" in kw:
            kw["window_overrides"] = {k: TimeWindow(*w) for k, w in kw["window_overrides"].items()}
        return cls(**kw)


_SCALAR_KEYS = {
    "shunt": ("shunt_volts_per_amp", parse_si),
    "c_ref": ("c_ref", parse_si),
    "bus_voltage": ("bus_voltage", parse_si),
    "low_frac": ("low_frac", parse_si),
    "high_frac": ("high_frac", parse_si),
    "settle_samples": ("settle_samples", lambda s: int(s)),
    "smoothing_points": ("smoothing_points", lambda s: int(s)),
    "extend_to_onset": ("extend_to_onset", _parse_bool),
    "st_frequency": ("st_frequency", parse_si),
    "monotone_tol": ("monotone_tol", parse_si),
    "i_ds_unit": ("i_ds_unit", lambda s: s.strip()),
    "e_charge_source": ("e_charge_source", lambda s: s.strip()),
}


def read_key_values(path):
    """Yield ``(line_no, key, value)`` from a ``key = value`` file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read: {exc.strerror}", path) from exc
    seen = {}
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UnparseableValue(f"expected 'key = value', got {raw.strip()!r}", path, no)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise UnparseableValue(f"duplicate key {key!r} (first on line {seen[key]})", path, no)
        seen[key] = no
        out.append((no, key, value))
    return out


def _window(value):
    parts = [p for p in re.split(r"[,\s]+", value.strip()) if p]
    if len(parts) != 2:
        raise ValueError("a window needs two times: start, end")
    return TimeWindow(parse_si(parts[0]), parse_si(parts[1]))


def load_config(path, mode=None):
    """Read an :class:`AnalysisConfig`; ``mode`` enforces required keys."""
    kw = {}
    channel_map = {r: r for r in ROLES}
    deskew = {}
    windows = {}
    for no, key, value in read_key_values(path):
        try:
            if key in _SCALAR_KEYS:
                name, conv = _SCALAR_KEYS[key]
                kw[name] = conv(value)
            elif key == "thresholds":
                lo, hi = (parse_si(p) for p in re.split(r"[,\s]+", value) if p)
                kw["low_frac"], kw["high_frac"] = lo, hi
            elif key.startswith("channel.") and key[8:] in ROLES:
                channel_map[key[8:]] = value
            elif key.startswith("deskew.") and key[7:] in ROLES:
                deskew[key[7:]] = parse_si(value)
            elif key.startswith("window.") and key[7:] in WINDOWS:
                windows[key[7:]] = _window(value)
            else:
                raise UnknownKey(f"unknown key {key!r}", path, no)
        except UnknownKey:
            raise
        except ValueError as exc:
            raise UnparseableValue(f"{key}: {exc}", path, no) from None
    try:
        cfg = AnalysisConfig(channel_map=channel_map, deskew=deskew,
                             window_overrides=windows, **kw)
    except ValueError as exc:
        raise UnparseableValue(str(exc), path) from None
    if mode is not None:
        cfg.require(mode, path)
    return cfg


def _role(capture, config, role):
    wf = capture[config.channel_map.get(role, role)]
    shift = config.deskew.get(role, 0.0)
    if shift:
        wf = transform(wf, time_shift=shift)
    return wf


def pulse_channels(capture, config):
    """(v_ds, i_ds) in volts and amperes, deskewed and on a common grid."""
    v = _role(capture, config, "v_ds").replace(unit="V")
    i = _role(capture, config, "i_ds")
    if config.i_ds_unit == "V":
        config.require("pulse")
        i = transform(i, gain=1.0 / config.shunt_volts_per_amp, new_unit="A")
    else:
        i = i.replace(unit="A")
    return tuple(align(v, i))


def st_channels(capture, config):
    """(v_dut, v_ref) in volts on a common grid.

    Uses the ``v_dut`` role when present, else ``v_src - v_ref``.
    """
    v_ref = _role(capture, config, "v_ref").replace(unit="V")
    if config.channel_map.get("v_dut", "v_dut") in capture:
        v_dut = _role(capture, config, "v_dut").replace(unit="V")
        return tuple(align(v_dut, v_ref))
    v_src = _role(capture, config, "v_src").replace(unit="V")
    v_src, v_ref = align(v_src, v_ref)
    return v_src.replace(samples=v_src.samples - v_ref.samples, label="v_dut"), v_ref


_MODEL_KEYS = {"capacitance", "v_max", "loop_area", "knee", "ratio", "points"}


def load_sim_params(path, kind):
    """Simulation settings for ``kind`` 'st' or 'pulse'.

    Returns ``(model, params)``. Model keys: ``model`` (gan_like or linear),
    ``capacitance`` (C at v_max), ``v_max``, ``loop_area``, ``knee``,
    ``ratio``, ``points``. Every other key must be a field of
    :class:`~stpulse.simulator.STParams` or
    :class:`~stpulse.simulator.PulseParams`.
    """
    from dataclasses import fields as dc_fields

    from .simulator import HysteresisCossModel, PulseParams, STParams

    pcls = STParams if kind == "st" else PulseParams
    pnames = {f.name for f in dc_fields(pcls)}
    model_kind = "gan_like"
    mkw, pkw = {}, {}
    entries = read_key_values(path) if path is not None else []
    for no, key, value in entries:
        try:
            if key == "model":
                model_kind = value.strip()
                if model_kind not in ("gan_like", "linear"):
                    raise ValueError(f"model must be gan_like or linear, got {model_kind!r}")
            elif key in _MODEL_KEYS:
                mkw[key] = int(value) if key == "points" else parse_si(value)
            elif key in pnames:
                if key == "shape":
                    pkw[key] = value.strip()
                elif key == "n_periods":
                    pkw[key] = int(value)
                else:
                    pkw[key] = parse_si(value)
            else:
                raise UnknownKey(f"unknown key {key!r}", path, no)
        except UnknownKey:
            raise
        except ValueError as exc:
            raise UnparseableValue(f"{key}: {exc}", path, no) from None
    c = mkw.pop("capacitance", 47e-12)
    v_max = mkw.pop("v_max", 400.0)
    n = mkw.pop("points", None)
    if model_kind == "linear":
        if mkw:
            raise UnparseableValue(f"keys {sorted(mkw)} do not apply to a linear model", path)
        model = HysteresisCossModel.linear(c, v_max) if n is None \
            else HysteresisCossModel.linear(c, v_max, n)
    else:
        if n is not None:
            mkw["n"] = n
        model = HysteresisCossModel.gan_like(c, v_max, **mkw)
    return model, pcls(**pkw)
