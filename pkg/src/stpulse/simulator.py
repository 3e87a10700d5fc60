"""Synthetic Sawyer-Tower and single-pulse captures with known energies.

The DUT is an off-state FET: a two-branch Q(V) output capacitance plus an
anti-parallel diode. Both circuits are integrated on the DUT charge ``q``
with fixed-step classical RK4. Steps are split at table knots, clamp points
and source breakpoints so the right-hand side is smooth inside every
sub-step. Energies are tallied during the integration from the RK4 stage
values and serve as ground truth for the analysis code.
"""

import math
from bisect import bisect_left, bisect_right
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ModelNotInvertible, NonMonotoneCharge, StepTooCoarse
from .waveform import Capture, TimeWindow, Waveform, integrate_trapezoid, multiply

_ENDPOINT_TOL = 1e-9


class _Branch:
    """Monotone piecewise-linear Q(V) table, extended linearly past its ends."""

    def __init__(self, v, q, name):
        v = np.asarray(v, dtype=float)
        q = np.asarray(q, dtype=float)
        if v.ndim != 1 or v.shape != q.shape or v.size < 2:
            raise ModelNotInvertible(f"{name}: need matching 1-D tables with >= 2 points")
        if not (np.all(np.diff(v) > 0) and np.all(np.diff(q) > 0)):
            raise ModelNotInvertible(f"{name}: v and q must both be strictly increasing")
        self.v = v
        self.q = q
        self.c = np.diff(q) / np.diff(v)
        self._vl = v.tolist()
        self._ql = q.tolist()
        self._cl = self.c.tolist()
        self._last = len(self._cl) - 1

    def segment(self, q, direction=1):
        """Segment index holding q; at a knot, the one ahead of ``direction``."""
        if direction >= 0:
            j = bisect_right(self._ql, q) - 1
        else:
            j = bisect_left(self._ql, q) - 1
        return min(max(j, 0), self._last)

    def bounds(self, j):
        lo = self._ql[j] if j > 0 else -math.inf
        hi = self._ql[j + 1] if j < self._last else math.inf
        return lo, hi

    def v_at(self, q, j=None):
        if j is None:
            j = self.segment(q)
        return self._vl[j] + (q - self._ql[j]) / self._cl[j]

    def q_at(self, v):
        j = min(max(bisect_right(self._vl, v) - 1, 0), self._last)
        return self._ql[j] + (v - self._vl[j]) * self._cl[j]

    def slope(self, j):
        return self._cl[j]

    def work(self, qa, qb):
        """Integral of v dq along the branch from qa to qb."""
        if qa == qb:
            return 0.0
        lo, hi = min(qa, qb), max(qa, qb)
        inner = [x for x in self._ql if lo < x < hi]
        qs = np.array([lo] + inner + [hi])
        vs = np.array([self.v_at(x, self.segment(x)) for x in qs])
        w = float(np.sum(0.5 * (vs[1:] + vs[:-1]) * np.diff(qs)))
        return w if qb > qa else -w


class HysteresisCossModel:
    """Two-branch charge-voltage model of a hysteretic output capacitance.

    ``q_up`` is followed while charging and ``q_down`` while discharging; both
    are (v, q) tables that share their end points. When the direction
    reverses between the end points the state moves at constant charge from
    one branch to the other.
    """

    def __init__(self, q_up, q_down):
        up = np.asarray(q_up, dtype=float)
        down = np.asarray(q_down, dtype=float)
        self.up = _Branch(up[:, 0], up[:, 1], "q_up")
        self.down = _Branch(down[:, 0], down[:, 1], "q_down")
        scale_v = max(abs(up[:, 0]).max(), abs(down[:, 0]).max())
        scale_q = max(abs(up[:, 1]).max(), abs(down[:, 1]).max())
        for i in (0, -1):
            if (abs(up[i, 0] - down[i, 0]) > _ENDPOINT_TOL * scale_v
                    or abs(up[i, 1] - down[i, 1]) > _ENDPOINT_TOL * scale_q):
                raise ModelNotInvertible("q_up and q_down must share both end points")
        # branches must not cross: sample both on the union grid
        vs = np.union1d(up[:, 0], down[:, 0])
        gap = np.interp(vs, down[:, 0], down[:, 1]) - np.interp(vs, up[:, 0], up[:, 1])
        tol = _ENDPOINT_TOL * scale_q
        if np.any(gap > tol) and np.any(gap < -tol):
            raise ModelNotInvertible("charge and discharge branches cross")
        self.q_up = up
        self.q_down = down

    @property
    def v_min(self):
        return float(self.q_up[0, 0])

    @property
    def v_max(self):
        return float(self.q_up[-1, 0])

    @property
    def q_span(self):
        return float(self.q_up[-1, 1] - self.q_up[0, 1])

    def loop_area(self):
        """Closed-form area of the table loop (energy lost per full cycle)."""
        pts = np.vstack([self.q_up, self.q_down[::-1][1:]])
        v, q = pts[:, 0], pts[:, 1]
        v = v - v.mean()
        q = q - q.mean()
        return float(0.5 * np.sum(v * np.roll(q, -1) - np.roll(v, -1) * q))

    def charge_energy(self, v_from=None, v_to=None):
        """Integral of v dq along the charging branch between two voltages."""
        v_from = self.v_min if v_from is None else v_from
        v_to = self.v_max if v_to is None else v_to
        return self.up.work(self.up.q_at(v_from), self.up.q_at(v_to))

    def discharge_energy(self, v_from=None, v_to=None):
        """Magnitude of v dq returned along the discharging branch."""
        v_from = self.v_max if v_from is None else v_from
        v_to = self.v_min if v_to is None else v_to
        return -self.down.work(self.down.q_at(v_from), self.down.q_at(v_to))

    def loop_points(self, n=200):
        """Closed (v, q) polygon sampled along both branches, n points per branch."""
        v_up = np.linspace(self.v_min, self.v_max, n)
        v_dn = v_up[::-1]
        q_up = np.array([self.up.q_at(x) for x in v_up])
        q_dn = np.array([self.down.q_at(x) for x in v_dn])
        return np.concatenate([v_up, v_dn[1:]]), np.concatenate([q_up, q_dn[1:]])

    @classmethod
    def linear(cls, capacitance, v_max, n=2):
        v = np.linspace(0.0, v_max, n)
        table = np.column_stack([v, capacitance * v])
        return cls(table, table.copy())

    @classmethod
    def from_capacitance(cls, c_of_v, v_max, loop_area=0.0, n=81):
        """Tabulate Q(V) = integral of ``c_of_v`` and split it into two branches.

        The branches are offset by +/- a half-sine bump in charge whose size
        gives the requested loop area exactly on the table grid.
        """
        v = np.linspace(0.0, v_max, n)
        fine = np.linspace(0.0, v_max, 20 * (n - 1) + 1)
        cf = c_of_v(fine)
        qf = np.concatenate(([0.0], np.cumsum(0.5 * (cf[1:] + cf[:-1]) * np.diff(fine))))
        q0 = np.interp(v, fine, qf)
        bump = np.sin(np.pi * v / v_max)
        bump[0] = bump[-1] = 0.0
        unit_area = float(np.sum(0.5 * (2 * bump[1:] + 2 * bump[:-1]) * np.diff(v)))
        half = loop_area / unit_area if loop_area else 0.0
        up = np.column_stack([v, q0 - half * bump])
        down = np.column_stack([v, q0 + half * bump])
        return cls(up, down)

    @classmethod
    def gan_like(cls, c_at_vmax=47e-12, v_max=400.0, loop_area=0.0, n=81,
                 knee=20.0, ratio=15.0):
        """Output capacitance falling from ~(1+ratio)x at 0 V to ``c_at_vmax``."""
        cj = ratio * c_at_vmax * (1 + v_max / knee) ** 2 / ((1 + v_max / knee) ** 2 - 1)
        c_lo = c_at_vmax - cj / (1 + v_max / knee) ** 2

        def c_of_v(x):
            return c_lo + cj / (1 + x / knee) ** 2

        return cls.from_capacitance(c_of_v, v_max, loop_area, n)


# -- Sawyer-Tower ----------------------------------------------------------------

@dataclass(frozen=True)
class STParams:
    c_ref: float = 10e-9
    shape: str = "sine"
    amplitude: Optional[float] = None  # peak source voltage; None drives the DUT to v_max
    frequency: float = 100e3
    n_periods: int = 2
    dt: Optional[float] = None  # None gives 10000 steps per period

    def __post_init__(self):
        if not self.c_ref > 0:
            raise ValueError("c_ref must be positive")
        if self.shape not in ("sine", "triangle"):
            raise ValueError(f"shape must be 'sine' or 'triangle', got {self.shape!r}")
        if self.amplitude is not None and not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if not self.frequency > 0:
            raise ValueError("frequency must be positive")
        if self.n_periods < 1:
            raise ValueError("n_periods must be >= 1")
        if self.dt is not None and self.dt > 1 / (1000 * self.frequency) * (1 + 1e-12):
            raise StepTooCoarse(f"dt = {self.dt:g} s exceeds one thousandth of the period")


class _Source:
    """Unipolar periodic source 0 -> amplitude -> 0, rising in the first half."""

    def __init__(self, shape, amplitude, frequency):
        self.shape = shape
        self.a = amplitude
        self.f = frequency
        self.period = 1.0 / frequency
        self.w = 2 * math.pi * frequency

    def v(self, t):
        if self.shape == "sine":
            return 0.5 * self.a * (1 - math.cos(self.w * t))
        x = (t * self.f) % 1.0
        return self.a * (2 * x if x <= 0.5 else 2 - 2 * x)

    def dv(self, t, s=None):
        """Slope at ``t``; ``s`` picks the side at a triangle corner."""
        if self.shape == "sine":
            return 0.5 * self.a * self.w * math.sin(self.w * t)
        if s is None:
            x = (t * self.f) % 1.0
            s = 1 if x < 0.5 else -1
        return 2 * self.a * self.f * s

    def direction(self, ta, tb):
        x = (0.5 * (ta + tb) * self.f) % 1.0
        return 1 if x < 0.5 else -1

    def solve(self, target, ta, tb):
        """Time in [ta, tb] where the (monotone) source reaches ``target``."""
        fa = self.v(ta) - target
        fb = self.v(tb) - target
        if fa == 0:
            return ta
        if fb == 0 or fa * fb > 0:
            return tb
        return brentq(lambda t: self.v(t) - target, ta, tb, xtol=1e-12 * (tb - ta))


@dataclass(frozen=True)
class STGroundTruth:
    loop_area: float
    source_energy: float      # integral of v_src dq over the final period
    dissipated: float         # DUT cycle loss over the final period
    stored_change: float      # reference + DUT recoverable energy change, final period
    peak_stored: float        # max of q^2/2C_ref + DUT recoverable energy
    period_start: float
    period_end: float
    c_ref: float
    amplitude: float
    kind: str = "st"

    @property
    def period_window(self):
        return TimeWindow(self.period_start, self.period_end)


def simulate_sawyer_tower(model, params=STParams()):
    """Run the series DUT + reference-capacitor circuit under periodic drive.

    Returns ``(capture, ground_truth)``. The capture holds ``v_dut``,
    ``v_ref``, ``i`` and ``v_src`` on a grid with an even number of steps per
    period (the requested dt is rounded down to fit).
    """
    f = params.frequency
    period = 1.0 / f
    dt_req = params.dt if params.dt is not None else period / 10000
    n_per = int(math.ceil(period / dt_req - 1e-9))
    n_per += n_per % 2
    dt = period / n_per
    total = n_per * params.n_periods
    c_ref = params.c_ref
    up, down = model.up, model.down
    q_init = up.q_at(0.0) if model.v_min <= 0.0 else model.q_up[0, 1]
    v_start = up.v_at(q_init)
    amp = params.amplitude
    if amp is None:
        amp = model.v_max - v_start + (up.q_at(model.v_max) - q_init) / c_ref
    src = _Source(params.shape, amp, f)
    vtol = 1e-9 * max(amp, 1.0)

    def w_dut(q):
        return down.work(q_init, q)

    qs = np.empty(total + 1)
    qs[0] = q_init
    dirs = np.empty(total + 1, dtype=int)
    e_src = np.zeros(total + 1)  # cumulative integral of v_src dq
    q = q_init
    for k in range(total):
        ta = k * dt
        tb = (k + 1) * dt
        s = src.direction(ta, tb)
        dirs[k] = s
        br = up if s > 0 else down
        t = ta
        e = 0.0
        guard = 0
        while t < tb:
            guard += 1
            if guard > 10000:
                raise NonMonotoneCharge(f"no progress integrating step {k}")
            vs = src.v(t)
            vd = vs - (q - q_init) / c_ref + v_start
            vb = br.v_at(q, br.segment(q, s))
            if (s > 0 and vd < vb - vtol) or (s < 0 and vd > vb + vtol):
                # between branches: charge held while v_dut slides over
                target = vb + (q - q_init) / c_ref - v_start
                t = src.solve(target, t, tb)
                continue
            j = br.segment(q, s)
            cj = br.slope(j)
            cs = cj * c_ref / (cj + c_ref)
            h = tb - t
            k1 = cs * src.dv(t, s)
            k2 = cs * src.dv(t + 0.5 * h, s)
            k4 = cs * src.dv(tb, s)
            q_new = q + h / 6 * (k1 + 4 * k2 + k4)
            lo, hi = br.bounds(j)
            bound = hi if s > 0 else lo
            if (s > 0 and q_new > bound) or (s < 0 and q_new < bound):
                t_hit = src.solve(src.v(t) + (bound - q) / cs, t, tb)
                e += cs * 0.5 * (src.v(t_hit) ** 2 - vs ** 2)
                q = bound
                t = t_hit
                continue
            vm = src.v(t + 0.5 * h)
            e += h / 6 * (vs * k1 + 4 * vm * k2 + src.v(tb) * k4)
            q = q_new
            t = tb
        qs[k + 1] = q
        e_src[k + 1] = e_src[k] + e
    dirs[total] = dirs[total - 1]

    times = dt * np.arange(total + 1)
    v_src = np.array([src.v(x) for x in times])
    v_ref = (qs - q_init) / c_ref
    v_dut = v_src - v_ref + v_start
    i = np.empty(total + 1)
    for k in range(total + 1):
        s = dirs[k]
        br = up if s > 0 else down
        j = br.segment(qs[k], s)
        on_branch = abs(v_dut[k] - br.v_at(qs[k], j)) <= 1e3 * vtol
        cj = br.slope(j)
        i[k] = src.dv(times[k], s) * cj * c_ref / (cj + c_ref) if on_branch else 0.0

    a = total - n_per
    w_ref = lambda x: 0.5 * (x - q_init) ** 2 / c_ref
    stored_change = (w_ref(qs[-1]) - w_ref(qs[a])) + (w_dut(qs[-1]) - w_dut(qs[a]))
    source = e_src[-1] - e_src[a]
    peak = max(w_ref(x) + w_dut(x) for x in (qs.max(), qs.min()))
    truth = STGroundTruth(
        loop_area=model.loop_area(),
        source_energy=float(source),
        dissipated=float(source - stored_change),
        stored_change=float(stored_change),
        peak_stored=float(peak),
        period_start=float(a * dt),
        period_end=float(total * dt),
        c_ref=c_ref,
        amplitude=float(amp),
    )
    chans = {
        "v_dut": Waveform(0.0, dt, v_dut, "V", "v_dut"),
        "v_ref": Waveform(0.0, dt, v_ref, "V", "v_ref"),
        "i": Waveform(0.0, dt, i, "A", "i"),
        "v_src": Waveform(0.0, dt, v_src, "V", "v_src"),
    }
    meta = {"source": "simulate_sawyer_tower", "excitation": params.shape,
            "frequency": repr(f), "c_ref": repr(c_ref)}
    return Capture(chans, meta), truth


# -- single pulse ----------------------------------------------------------------

@dataclass(frozen=True)
class PulseParams:
    bus_voltage: float = 400.0
    load_current: float = 2.0
    channel_fall_time: float = 5e-9
    pulse_duration: float = 2e-6
    series_resistance: float = 0.055
    diode_drop: float = 1.0
    dt: Optional[float] = None  # None gives channel_fall_time / 100

    def __post_init__(self):
        for f in fields(self):
            val = getattr(self, f.name)
            if val is not None and not val > 0:
                raise ValueError(f"{f.name} must be positive, got {val!r}")
        if self.dt is not None and self.dt > self.channel_fall_time / 100 * (1 + 1e-12):
            raise StepTooCoarse(f"dt = {self.dt:g} s exceeds channel_fall_time / 100")

    @property
    def step(self):
        return self.dt if self.dt is not None else self.channel_fall_time / 100


@dataclass(frozen=True)
class PulseGroundTruth:
    e_overlap: float
    e_charge: float
    e_off: float
    e_on: float
    e_channel: float     # all channel loss including on-state conduction
    e_diode: float       # DUT anti-parallel diode conduction loss
    e_cap: float         # net integral of v dq over the record
    stored_change: float
    turnoff_start: float
    turnoff_end: float
    turnon_start: float
    turnon_end: float
    kind: str = "pulse"

    @property
    def e_discharge(self):
        return self.e_on

    @property
    def e_hysteresis(self):
        return self.e_off - self.e_on - self.e_overlap


def _simpson(f, a, b):
    return (b - a) / 6 * (f(a) + 4 * f(0.5 * (a + b)) + f(b))


def simulate_single_pulse(model, params=PulseParams()):
    """Single gate pulse: hard-ish turn-off, then a zero-voltage discharge.

    Timeline: the channel conducts the load current for ``pulse_duration``;
    its current then ramps to zero over ``channel_fall_time`` while the
    difference charges the output capacitance until the drain reaches the
    bus (the complementary diode then takes the load current). After another
    ``pulse_duration`` the load current reverses over two fall times and
    discharges the capacitance until the DUT's anti-parallel diode clamps
    at ``-diode_drop``.

    Returns ``(capture, ground_truth)`` with channels ``v_ds``, ``i_ds``,
    ``i_channel`` and ``gate``.
    """
    p = params
    dt = p.step
    il = p.load_current
    up, down = model.up, model.down
    v0 = il * p.series_resistance
    q0 = up.q_at(v0)
    q_top = up.q_at(p.bus_voltage)
    q_bot = down.q_at(-p.diode_drop)
    if not q_top > q0:
        raise ValueError("bus voltage must exceed the on-state drop")

    t_off = p.pulse_duration
    t_ramp = t_off + p.channel_fall_time
    t_rev = 2 * p.pulse_duration
    t_rev_len = 2 * p.channel_fall_time
    t_zero = t_rev + 0.5 * t_rev_len
    t_rev_end = t_rev + t_rev_len
    t_dis = (q_top - q_bot) / il
    t_stop = t_rev_end + 1.25 * t_dis + 20 * dt
    n = int(math.ceil(t_stop / dt))
    breaks = [t_off, t_ramp, t_rev, t_zero, t_rev_end]

    def i_load(t):
        if t <= t_rev:
            return il
        if t >= t_rev_end:
            return -il
        return il * (1 - 2 * (t - t_rev) / t_rev_len)

    def i_ch(t):
        if t <= t_off:
            return il
        if t >= t_ramp:
            return 0.0
        return il * (1 - (t - t_off) / p.channel_fall_time)

    def g(t):
        return i_load(t) - i_ch(t)

    qs = np.empty(n + 1)
    vs = np.empty(n + 1)
    ids = np.empty(n + 1)
    ich = np.empty(n + 1)
    branch = up
    q = q0
    clamp = None  # "top" or "bottom" while a diode holds the voltage
    e_ch = e_diode = e_cap = 0.0
    e_overlap = e_charge = e_on_signed = 0.0
    t_top = t_bottom = None
    rel = 1e-12 * (q_top - q_bot)

    def v_of(qq, br):
        return br.v_at(qq, br.segment(qq))

    def record(k, t):
        qs[k] = q
        vs[k] = v_of(q, branch)
        ich[k] = i_ch(t)
        gg = g(t)
        if clamp == "top" and gg > 0:
            ids[k] = ich[k]
        else:
            ids[k] = i_load(t)

    record(0, 0.0)
    for k in range(n):
        ta, tb = k * dt, (k + 1) * dt
        cuts = [ta] + [x for x in breaks if ta < x < tb] + [tb]
        for c0, c1 in zip(cuts[:-1], cuts[1:]):
            t = c0
            guard = 0
            while t < c1:
                guard += 1
                if guard > 10000:
                    raise NonMonotoneCharge(f"no progress at t = {t:.6g} s")
                gm = g(0.5 * (t + c1))
                s = 1 if gm > 0 else (-1 if gm < 0 else 0)
                if s == 0:
                    clamp_v = v_of(q, branch)
                    e_ch += (c1 - t) * clamp_v * i_ch(0.5 * (t + c1))
                    t = c1
                    break
                if s > 0 and q >= q_top - rel:
                    clamp = "top"
                elif s < 0 and q <= q_bot + rel:
                    clamp = "bottom"
                else:
                    clamp = None
                if clamp is not None:
                    vc = v_of(q, branch)
                    ch = _simpson(lambda x: vc * i_ch(x), t, c1)
                    e_ch += ch
                    if t_off <= t < t_ramp:
                        e_overlap += ch
                    if clamp == "bottom":
                        e_diode += _simpson(lambda x: vc * g(x), t, c1)
                    t = c1
                    continue
                branch = up if s > 0 else down
                j = branch.segment(q, s)
                cj = branch.slope(j)
                lo, hi = branch.bounds(j)
                bound = min(hi, q_top) if s > 0 else max(lo, q_bot)
                h = c1 - t
                k1, k2, k4 = g(t), g(t + 0.5 * h), g(c1)
                q_new = q + h / 6 * (k1 + 4 * k2 + k4)
                t_end = c1
                if (s > 0 and q_new > bound) or (s < 0 and q_new < bound):
                    qa = q
                    t_end = brentq(lambda x: qa + _simpson(g, t, x) - bound, t, c1,
                                   xtol=1e-12 * (c1 - t))
                    q_new = bound
                qa = q
                va = branch.v_at(qa, j)
                vb = branch.v_at(q_new, j)
                # v is linear in q on segment j, q is quadratic in t
                vq = lambda x: branch.v_at(qa + _simpson(g, t, x), j)
                ch = _simpson(lambda x: vq(x) * i_ch(x), t, t_end)
                e_ch += ch
                if t_off <= t < t_ramp:
                    e_overlap += ch
                de = 0.5 * (va + vb) * (q_new - qa)
                e_cap += de
                if t_off <= t < t_rev:
                    e_charge += de
                elif t >= t_rev:
                    e_on_signed += de
                q = q_new
                if q == q_top and s > 0 and t_top is None:
                    t_top = t_end
                if q == q_bot and s < 0 and t_bottom is None:
                    t_bottom = t_end
                t = t_end
        record(k + 1, tb)

    if t_top is None or t_bottom is None:
        raise NonMonotoneCharge("the capacitance never reached the bus and back; "
                                "pulse_duration is too short for this load current")
    w = lambda qq: down.work(q0, qq)
    truth = PulseGroundTruth(
        e_overlap=float(e_overlap),
        e_charge=float(e_charge),
        e_off=float(e_charge + e_overlap),
        e_on=float(abs(e_on_signed)),
        e_channel=float(e_ch),
        e_diode=float(e_diode),
        e_cap=float(e_cap),
        stored_change=float(w(q) - w(q0)),
        turnoff_start=float(t_off),
        turnoff_end=float(t_top),
        turnon_start=float(t_rev),
        turnon_end=float(t_bottom),
    )
    gate = (dt * np.arange(n + 1) < t_off).astype(float)
    chans = {
        "v_ds": Waveform(0.0, dt, vs, "V", "v_ds"),
        "i_ds": Waveform(0.0, dt, ids, "A", "i_ds"),
        "i_channel": Waveform(0.0, dt, ich, "A", "i_channel"),
        "gate": Waveform(0.0, dt, gate, "1", "gate"),
    }
    meta = {"source": "simulate_single_pulse", "bus_voltage": repr(p.bus_voltage),
            "load_current": repr(il), "channel_fall_time": repr(p.channel_fall_time)}
    return Capture(chans, meta), truth


# -- audit -----------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyBalance:
    source: float
    stored: float
    dissipated: float
    residual: float
    dominant: float

    @property
    def relative_residual(self):
        return abs(self.residual) / self.dominant if self.dominant else abs(self.residual)


def energy_balance(capture, ground_truth):
    """Compare the energy delivered per the emitted waveforms with the tallies.

    ``source`` is integrated from the capture; ``stored`` and ``dissipated``
    come from the step-by-step tallies, so the residual measures how well the
    sampled channels represent the integrated circuit.
    """
    if ground_truth.kind == "st":
        p = multiply(capture["v_src"], capture["i"])
        source = integrate_trapezoid(p, ground_truth.period_window)
        stored = ground_truth.stored_change
        dissipated = ground_truth.dissipated
        dominant = max(abs(source), ground_truth.peak_stored, abs(dissipated))
    else:
        p = multiply(capture["v_ds"], capture["i_ds"])
        source = integrate_trapezoid(p)
        stored = ground_truth.stored_change
        dissipated = (ground_truth.e_channel + ground_truth.e_diode
                      + ground_truth.e_cap - stored)
        dominant = max(abs(source), ground_truth.e_off, abs(dissipated))
    residual = source - stored - dissipated
    return EnergyBalance(float(source), float(stored), float(dissipated),
                         float(residual), float(dominant))


def truth_to_dict(truth):
    return asdict(truth)


def truth_from_dict(d):
    kind = d.get("kind")
    cls = STGroundTruth if kind == "st" else PulseGroundTruth
    kw = {}
    for f in fields(cls):
        if f.name not in d:
            continue
        kw[f.name] = d[f.name] if f.name == "kind" else float(d[f.name])
    return cls(**kw)
