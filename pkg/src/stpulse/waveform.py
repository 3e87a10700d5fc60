"""Uniformly sampled waveforms and the time-domain primitives built on them.

A :class:`Waveform` stores ``t0``, ``dt`` and the samples; sample ``k`` sits at
``t0 + k*dt``. Everything here is a pure function returning new objects.
"""

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import (
    Misaligned,
    MissingChannel,
    MultipleAmbiguous,
    NonFiniteSample,
    NonPositiveStep,
    NoTransient,
    TooShort,
    WindowOutOfRange,
    ZeroGain,
)

UNITS = ("V", "A", "C", "W", "1")

# relative slack when comparing time grids and window edges, in units of dt
_GRID_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Waveform:
    t0: float
    dt: float
    samples: np.ndarray
    unit: str = "V"
    label: str = ""

    def __post_init__(self):
        if not self.dt > 0:
            raise NonPositiveStep(f"dt must be positive, got {self.dt!r}")
        y = np.array(self.samples, dtype=float)
        if y.ndim != 1 or y.size < 2:
            raise TooShort(f"waveform {self.label!r} needs at least 2 samples")
        if not np.all(np.isfinite(y)):
            bad = int(np.flatnonzero(~np.isfinite(y))[0])
            raise NonFiniteSample(f"waveform {self.label!r} has a non-finite sample at index {bad}")
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit {self.unit!r}; expected one of {UNITS}")
        y.flags.writeable = False
        object.__setattr__(self, "samples", y)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))

    def __len__(self):
        return self.samples.size

    def __eq__(self, other):
        if not isinstance(other, Waveform):
            return NotImplemented
        return (self.t0 == other.t0 and self.dt == other.dt and self.unit == other.unit
                and self.label == other.label and np.array_equal(self.samples, other.samples))

    @property
    def t_end(self):
        return self.t0 + (self.samples.size - 1) * self.dt

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.samples.size)

    def replace(self, **changes):
        kw = dict(t0=self.t0, dt=self.dt, samples=self.samples, unit=self.unit, label=self.label)
        kw.update(changes)
        return Waveform(**kw)

    def value_at(self, t):
        """Linearly interpolated value(s) at time(s) ``t``."""
        return np.interp(t, self.times, self.samples)


@dataclass(frozen=True)
class TimeWindow:
    t_start: float
    t_end: float

    def __post_init__(self):
        if not (np.isfinite(self.t_start) and np.isfinite(self.t_end)):
            raise ValueError("window edges must be finite")
        if not self.t_start < self.t_end:
            raise ValueError(f"empty window [{self.t_start}, {self.t_end}]")

    @property
    def duration(self):
        return self.t_end - self.t_start


@dataclass(frozen=True)
class Capture:
    channels: Mapping[str, Waveform]
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __getitem__(self, label):
        try:
            return self.channels[label]
        except KeyError:
            raise MissingChannel(label) from None

    def __contains__(self, label):
        return label in self.channels

    @property
    def labels(self):
        return list(self.channels)

    def aligned(self):
        """Capture whose channels share one grid (see :func:`align`)."""
        labels = list(self.channels)
        waves = align(*(self.channels[k] for k in labels))
        return Capture(dict(zip(labels, waves)), dict(self.metadata))


def same_grid(a, b):
    """True when two waveforms share t0, dt and length (within grid tolerance)."""
    if len(a) != len(b):
        return False
    if abs(a.dt - b.dt) > _GRID_TOL * 1e-3 * a.dt:
        return False
    return abs(a.t0 - b.t0) <= _GRID_TOL * a.dt


def require_aligned(*waves):
    first = waves[0]
    for w in waves[1:]:
        if not same_grid(first, w):
            raise Misaligned(
                f"channels {first.label!r} and {w.label!r} are on different time grids "
                f"(t0 {first.t0:.6g}/{w.t0:.6g}, dt {first.dt:.6g}/{w.dt:.6g}, "
                f"n {len(first)}/{len(w)})")


def resample_uniform(wf, dt_new, t0=None, t_end=None):
    """Resample ``wf`` onto a grid of spacing ``dt_new`` by linear interpolation.

    The grid starts at ``t0`` (default ``wf.t0``) and is truncated to the last
    full step not past ``t_end`` (default ``wf.t_end``).
    """
    if not dt_new > 0:
        raise NonPositiveStep(f"dt_new must be positive, got {dt_new!r}")
    start = wf.t0 if t0 is None else float(t0)
    stop = wf.t_end if t_end is None else float(t_end)
    if start == wf.t0 and stop == wf.t_end and dt_new == wf.dt:
        return wf
    if start < wf.t0 - _GRID_TOL * wf.dt or stop > wf.t_end + _GRID_TOL * wf.dt:
        raise WindowOutOfRange("resampling span exceeds the waveform")
    n = int(np.floor((stop - start) / dt_new * (1 + 1e-12) + 1e-9)) + 1
    if n < 2:
        raise TooShort(f"resampling {wf.label!r} at dt={dt_new:g} leaves fewer than 2 samples")
    t = start + dt_new * np.arange(n)
    return wf.replace(t0=start, dt=dt_new, samples=np.interp(t, wf.times, wf.samples))


def align(*waves):
    """Bring waveforms onto one grid: coarsest dt over the intersected span."""
    if len(waves) < 2:
        return list(waves)
    if all(same_grid(waves[0], w) for w in waves[1:]):
        return list(waves)
    dt = max(w.dt for w in waves)
    start = max(w.t0 for w in waves)
    stop = min(w.t_end for w in waves)
    if not stop > start:
        raise Misaligned("channels do not overlap in time")
    return [resample_uniform(w, dt, start, stop) for w in waves]


def transform(wf, gain=1.0, offset=0.0, time_shift=0.0, new_unit=None):
    """Affine channel map ``v -> gain*v + offset`` plus a constant time shift.

    Typical use is shunt scaling, e.g. ``gain=1/0.0104`` for a 10.4 mV/A
    shunt with ``new_unit="A"``, and probe deskew via ``time_shift``.
    """
    if gain == 0:
        raise ZeroGain("gain must be nonzero")
    return wf.replace(t0=wf.t0 + time_shift,
                      samples=gain * wf.samples + offset,
                      unit=wf.unit if new_unit is None else new_unit)


def multiply(a, b, unit="W", label=None):
    require_aligned(a, b)
    return Waveform(a.t0, a.dt, a.samples * b.samples, unit,
                    label if label is not None else f"{a.label}*{b.label}")


def _check_window(wf, window):
    slack = _GRID_TOL * wf.dt
    if window.t_start < wf.t0 - slack or window.t_end > wf.t_end + slack:
        raise WindowOutOfRange(
            f"window [{window.t_start:.6g}, {window.t_end:.6g}] s is outside "
            f"{wf.label!r} span [{wf.t0:.6g}, {wf.t_end:.6g}] s")


def window_samples(wf, window):
    """Times and values on ``window`` with interpolated edge points."""
    _check_window(wf, window)
    a = max(window.t_start, wf.t0)
    b = min(window.t_end, wf.t_end)
    t = wf.times
    inside = (t > a) & (t < b)
    tt = np.concatenate(([a], t[inside], [b]))
    yy = np.concatenate(([np.interp(a, t, wf.samples)], wf.samples[inside],
                         [np.interp(b, t, wf.samples)]))
    return tt, yy


def integrate_trapezoid(wf, window=None):
    """Trapezoidal integral of ``wf`` over ``window`` (whole record if None).

    Window edges between samples contribute partial trapezoids using linearly
    interpolated boundary values, so the result has no dt-granularity bias.
    """
    if window is None:
        y = wf.samples
        return float(wf.dt * (y.sum() - 0.5 * (y[0] + y[-1])))
    t, y = window_samples(wf, window)
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(t)))


def _crossing_time(t, y, k, level):
    """Interpolated time where y crosses ``level`` between samples k-1 and k."""
    y0, y1 = y[k - 1], y[k]
    if y1 == y0:
        return float(t[k])
    return float(t[k - 1] + (level - y0) / (y1 - y0) * (t[k] - t[k - 1]))


def detect_turnoff_window(v_ds, bus_voltage, low_frac=0.1, high_frac=0.9,
                          settle_samples=10, hint=None, extend_to_onset=False):
    """Locate the rising drain-source voltage edge of a turn-off event.

    The window opens at the last upward crossing of ``low_frac*bus_voltage``
    before the edge reaches ``high_frac*bus_voltage`` and closes once the
    voltage has stayed within ``(1 - high_frac)*bus_voltage`` of the bus for
    ``settle_samples`` samples. Rise events are counted with a Schmitt
    trigger that re-arms only after dropping ``(high_frac-low_frac)/4`` of the
    bus below the high threshold; a rise qualifies only if it started below
    the low threshold.

    ``hint`` (a TimeWindow) selects among several qualifying rises: the one
    whose high crossing falls inside it. ``extend_to_onset`` widens the window
    to the whole monotone run of the edge, so quiet baseline on either side
    of the thresholds is not lost from energy integrals.
    """
    if not 0 < low_frac < high_frac < 1:
        raise ValueError(f"need 0 < low_frac < high_frac < 1, got {low_frac}, {high_frac}")
    if not bus_voltage > 0:
        raise ValueError("bus_voltage must be positive")
    y = v_ds.samples
    t = v_ds.times
    lo = low_frac * bus_voltage
    hi = high_frac * bus_voltage
    band = (high_frac - low_frac) / 4 * bus_voltage

    rises = []  # (index of high crossing, index of last low up-crossing)
    armed = bool(y[0] < hi)
    last_low_up = None
    for k in range(1, y.size):
        if y[k - 1] < lo <= y[k]:
            last_low_up = k
        if armed and y[k - 1] < hi <= y[k]:
            if last_low_up is not None:
                rises.append((k, last_low_up))
            armed = False
            last_low_up = None
        elif not armed and y[k] < hi - band:
            armed = True
            last_low_up = None
    if not rises:
        raise NoTransient(f"{v_ds.label or 'v_ds'} never rises from below "
                          f"{lo:.4g} V to {hi:.4g} V")
    if hint is not None:
        rises = [r for r in rises if hint.t_start <= t[r[0]] <= hint.t_end]
        if not rises:
            raise NoTransient("no qualifying rise inside the hint window")
    if len(rises) > 1:
        times = ", ".join(f"{t[r[0]]:.6g}" for r in rises)
        raise MultipleAmbiguous(f"{len(rises)} rises found (high crossings at {times} s); "
                                "pass a window hint")
    k_hi, k_lo = rises[0]
    t_start = _crossing_time(t, y, k_lo, lo)

    tol = (1 - high_frac) * bus_voltage
    ok = np.abs(y - bus_voltage) <= tol
    end_idx = y.size - 1
    run = 0
    for j in range(k_hi, y.size):
        run = run + 1 if ok[j] else 0
        if run >= settle_samples:
            end_idx = j
            break
    t_end = float(t[end_idx])

    if extend_to_onset:
        a = k_lo - 1
        while a > 0 and y[a - 1] < y[a]:
            a -= 1
        b = k_hi
        while b < y.size - 1 and y[b + 1] > y[b]:
            b += 1
        t_start = min(t_start, float(t[a]))
        t_end = max(t_end, float(t[b]))
    if not t_end > t_start:
        t_end = float(t[min(k_hi + 1, y.size - 1)])
    return TimeWindow(t_start, t_end)


def detect_turnon_window(v_ds, bus_voltage, low_frac=0.1, high_frac=0.9,
                         settle_samples=10, hint=None, extend_to_onset=False):
    """Falling-edge counterpart of :func:`detect_turnoff_window`.

    Runs the rising-edge logic on ``bus_voltage - v_ds``.
    """
    mirrored = transform(v_ds, gain=-1.0, offset=bus_voltage)
    return detect_turnoff_window(mirrored, bus_voltage, low_frac, high_frac,
                                 settle_samples, hint, extend_to_onset)
