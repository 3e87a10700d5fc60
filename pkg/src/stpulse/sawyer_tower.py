"""Charge-voltage loops from Sawyer-Tower captures.

The DUT sits in series with a known reference capacitor, so the reference
voltage times its capacitance is the DUT charge. One excitation period of
(v_dut, q) pairs forms a loop; its enclosed area is the energy dissipated per
cycle and the rising/falling halves give the charge and discharge energies.

Charge has an arbitrary offset in this measurement. Only differences in q
matter, and every energy here is invariant under q -> q + const.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateLoop,
    NonMonotoneBranch,
    NonPositiveCapacitance,
    NotClosed,
    TooFewPoints,
)
from .waveform import require_aligned, transform

CLOSURE_TOL = 1e-3
MIN_LOOP_POINTS = 8
MIN_BRANCH_POINTS = 4
MIN_V_SPAN = 1e-6


def _span(x):
    return float(np.max(x) - np.min(x))


@dataclass(frozen=True, eq=False)
class QVLoop:
    """Closed (v, q) trajectory over one excitation period."""

    v: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=float)
        q = np.array(self.q, dtype=float)
        if v.shape != q.shape or v.ndim != 1:
            raise ValueError("v and q must be 1-D arrays of equal length")
        if v.size < MIN_LOOP_POINTS:
            raise DegenerateLoop(f"a loop needs at least {MIN_LOOP_POINTS} points, got {v.size}")
        v.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "q", q)

    def __len__(self):
        return self.v.size

    @property
    def points(self):
        return np.column_stack([self.v, self.q])

    @property
    def closed(self):
        dv = abs(self.v[0] - self.v[-1])
        dq = abs(self.q[0] - self.q[-1])
        return bool(dv <= CLOSURE_TOL * _span(self.v) and dq <= CLOSURE_TOL * _span(self.q))

    def rotated(self, shift):
        """Same cycle started ``shift`` points later.

        The duplicated closing point (if any) is dropped before rotating and
        the rotated loop is closed by repeating its new first point.
        """
        v, q = self.v, self.q
        if v[0] == v[-1] and q[0] == q[-1]:
            v, q = v[:-1], q[:-1]
        v = np.roll(v, -shift)
        q = np.roll(q, -shift)
        return QVLoop(np.append(v, v[0]), np.append(q, q[0]))

    def reversed(self):
        return QVLoop(self.v[::-1], self.q[::-1])


@dataclass(frozen=True)
class BranchPair:
    charge_v: np.ndarray
    charge_q: np.ndarray
    discharge_v: np.ndarray
    discharge_q: np.ndarray

    @property
    def charge_branch(self):
        return np.column_stack([self.charge_v, self.charge_q])

    @property
    def discharge_branch(self):
        return np.column_stack([self.discharge_v, self.discharge_q])


@dataclass(frozen=True, eq=False)
class CossCurve:
    v: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if np.any(np.diff(v) <= 0):
            raise NonMonotoneBranch("C_oss curve voltages must be strictly increasing")
        if np.any(c < 0):
            raise NonMonotoneBranch("negative capacitance: charge decreases with voltage")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "c", c)

    @property
    def entries(self):
        return np.column_stack([self.v, self.c])

    def at(self, v):
        return np.interp(v, self.v, self.c)


def charge_from_reference(v_ref, c_ref):
    """DUT charge waveform, q = c_ref * v_ref."""
    if not c_ref > 0:
        raise NonPositiveCapacitance(f"c_ref must be positive, got {c_ref!r}")
    if v_ref.unit != "V":
        raise ValueError(f"reference channel must be in volts, got {v_ref.unit!r}")
    return transform(v_ref, gain=c_ref, new_unit="C").replace(label="q")


def build_qv_loop(v_dut, q, period_window, rebase=True):
    """Collect (v, q) pairs of one excitation period into a closed loop.

    Samples with ``t_start <= t <= t_end`` are used. With ``rebase`` the
    charge is shifted so it is zero at the first voltage minimum.
    """
    require_aligned(v_dut, q)
    t = v_dut.times
    slack = 1e-6 * v_dut.dt
    sel = (t >= period_window.t_start - slack) & (t <= period_window.t_end + slack)
    if np.count_nonzero(sel) < MIN_LOOP_POINTS:
        raise DegenerateLoop("period window holds fewer than "
                             f"{MIN_LOOP_POINTS} samples")
    v = v_dut.samples[sel]
    qq = q.samples[sel]
    if rebase:
        qq = qq - qq[int(np.argmin(v))]
    loop = QVLoop(v, qq)
    if not loop.closed:
        raise NotClosed(
            f"loop does not close: |dv| = {abs(v[0] - v[-1]):.4g} V of span {_span(v):.4g} V, "
            f"|dq| = {abs(qq[0] - qq[-1]):.4g} C of span {_span(qq):.4g} C "
            f"(tolerance {CLOSURE_TOL:g} of span)")
    return loop


def _cyclic_path(n, i, j):
    """Indices from i to j inclusive, walking forward around an n-cycle."""
    if j >= i:
        return np.arange(i, j + 1)
    return np.concatenate([np.arange(i, n), np.arange(0, j + 1)])


def split_branches(loop):
    """Split a closed loop at its global voltage minimum and maximum.

    The cyclic path from the minimum to the maximum is the charge branch,
    the remainder (maximum back to minimum) the discharge branch. Both
    include the shared extreme points. Ties go to the first occurrence.
    The last point of a closed loop repeats the first phase and is dropped.
    """
    if not loop.closed:
        raise DegenerateLoop("loop is not closed; cannot split into branches")
    v, q = loop.v[:-1], loop.q[:-1]
    if _span(v) < MIN_V_SPAN:
        raise DegenerateLoop(f"voltage span {_span(v):.3g} V is too small")
    n = v.size
    i_min = int(np.argmin(v))
    i_max = int(np.argmax(v))
    up = _cyclic_path(n, i_min, i_max)
    down = _cyclic_path(n, i_max, i_min)
    if up.size < MIN_BRANCH_POINTS or down.size < MIN_BRANCH_POINTS:
        raise DegenerateLoop(f"branches have {up.size} and {down.size} points; "
                             f"need {MIN_BRANCH_POINTS} each")
    return BranchPair(v[up], q[up], v[down], q[down])


def _as_branch(branch):
    b = np.asarray(branch, dtype=float)
    if b.ndim != 2 or b.shape[1] != 2:
        raise ValueError("branch must be an (N, 2) array of (v, q) pairs")
    return b[:, 0], b[:, 1]


def _check_monotone(v, tol=0.0):
    d = np.diff(v)
    slack = tol * _span(v)
    if not (np.all(d >= -slack) or np.all(d <= slack)):
        raise NonMonotoneBranch("branch voltage is not monotone")


def signed_branch_energy(branch, monotone_tol=0.0):
    """Signed integral of v dq along the branch in its stored order."""
    v, q = _as_branch(branch)
    if v.size < 2:
        raise TooFewPoints("a branch needs at least 2 points")
    _check_monotone(v, monotone_tol)
    return float(np.sum(0.5 * (v[1:] + v[:-1]) * np.diff(q)))


def branch_energy(branch, monotone_tol=0.0):
    """Energy moved along one branch, |integral of v dq| (joules).

    Use :func:`signed_branch_energy` for the traversal direction: positive
    means energy delivered into the capacitance.
    """
    return abs(signed_branch_energy(branch, monotone_tol))


def loop_work(loop):
    """Signed cyclic integral of v dq by the shoelace rule.

    Positive for a dissipative traversal (charging branch at higher voltage
    than the discharging one for the same charge).
    """
    if not loop.closed:
        raise NotClosed("loop area needs a closed loop")
    v, q = loop.v, loop.q
    v1 = np.roll(v, -1)
    q1 = np.roll(q, -1)
    # shift to the centroid to keep the cross products well conditioned
    vc, qc = v.mean(), q.mean()
    return float(0.5 * np.sum((v - vc) * (q1 - qc) - (v1 - vc) * (q - qc)))


def loop_orientation(loop):
    """+1 for dissipative traversal, -1 for the reverse, 0 for no area."""
    return int(np.sign(loop_work(loop)))


def hysteresis_energy(loop):
    """Energy lost per cycle: the area enclosed by the loop (joules)."""
    return abs(loop_work(loop))


def _moving_average(x, points):
    if points == 1:
        return x.copy()
    h = points // 2
    n = x.size
    c = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(n)
    half = np.minimum(h, np.minimum(idx, n - 1 - idx))
    return (c[idx + half + 1] - c[idx - half]) / (2 * half + 1)


def coss_large_signal(branch, smoothing_points=5):
    """Large-signal output capacitance dQ/dV along one branch.

    Repeated voltages are merged (their charges averaged) and the branch is
    sorted by voltage. Derivatives are central in the interior and one-sided
    at the ends, then smoothed by a centered moving average that shrinks
    symmetrically near the ends.
    """
    if smoothing_points < 1 or smoothing_points % 2 == 0:
        raise ValueError("smoothing_points must be odd and >= 1")
    v, q = _as_branch(branch)
    _check_monotone(v)
    vu, inv = np.unique(v, return_inverse=True)
    qu = np.bincount(inv, weights=q) / np.bincount(inv)
    if vu.size < 3:
        raise TooFewPoints(f"need at least 3 distinct voltages, got {vu.size}")
    c = np.gradient(qu, vu, edge_order=1)
    return CossCurve(vu, _moving_average(c, smoothing_points))


def charge_energy_curve(branch):
    """Cumulative v dq along a charge branch: energy versus reached voltage."""
    v, q = _as_branch(branch)
    _check_monotone(v)
    e = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(q))))
    return v, np.abs(e)
