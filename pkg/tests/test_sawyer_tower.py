import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stpulse.errors import (
    DegenerateLoop,
    Misaligned,
    NonMonotoneBranch,
    NonPositiveCapacitance,
    NotClosed,
    TooFewPoints,
)
from stpulse.sawyer_tower import (
    QVLoop,
    branch_energy,
    build_qv_loop,
    charge_energy_curve,
    charge_from_reference,
    coss_large_signal,
    hysteresis_energy,
    loop_orientation,
    loop_work,
    signed_branch_energy,
    split_branches,
)
from stpulse.simulator import HysteresisCossModel, STParams, simulate_sawyer_tower
from stpulse.waveform import TimeWindow, Waveform


def rectangle(dv=100.0, dq=1e-9, k=5):
    s = np.linspace(0, 1, k, endpoint=False)
    v = np.concatenate([dv * s, np.full(k, dv), dv * (1 - s), np.zeros(k), [0.0]])
    q = np.concatenate([np.zeros(k), dq * s, np.full(k, dq), dq * (1 - s), [0.0]])
    return QVLoop(v, q)


def random_loop(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 30))
    v = np.linspace(0, rng.uniform(10, 600), n)
    c = rng.uniform(10e-12, 500e-12, n - 1)
    q_up = np.concatenate(([0.0], np.cumsum(c * np.diff(v))))
    bump = np.sin(np.pi * v / v[-1]) * rng.uniform(0, 0.4) * np.min(c * np.diff(v))
    bump[0] = bump[-1] = 0
    m = HysteresisCossModel(np.column_stack([v, q_up]), np.column_stack([v, q_up + bump]))
    return QVLoop(*m.loop_points(int(rng.integers(8, 120))))


@pytest.fixture(scope="module")
def st_run():
    model = HysteresisCossModel.gan_like(loop_area=0.189e-6)
    cap, truth = simulate_sawyer_tower(model, STParams())
    q = charge_from_reference(cap["v_ref"], truth.c_ref)
    return cap, truth, q


def test_charge_from_reference():
    v = Waveform(0.0, 1.0, [1.0, 1.0, 0.0], "V", "v_ref")
    q = charge_from_reference(v, 10e-9)
    assert q.unit == "C"
    assert q.samples[0] == pytest.approx(10e-9, rel=1e-15)
    assert q.samples[2] == 0.0
    with pytest.raises(NonPositiveCapacitance):
        charge_from_reference(v, 0.0)


@given(st.floats(-100, 100).filter(lambda a: a != 0))
def test_charge_from_reference_is_linear(a):
    t = np.linspace(0, 1, 50)
    v = Waveform(0.0, t[1], np.sin(2 * np.pi * t), "V")
    q1 = charge_from_reference(v, 10e-9).samples
    qa = charge_from_reference(v.replace(samples=a * v.samples), 10e-9).samples
    np.testing.assert_allclose(qa, a * q1, rtol=1e-14, atol=1e-22)


def test_rectangle_area_and_branches():
    loop = rectangle()
    assert hysteresis_energy(loop) == pytest.approx(0.1e-6, rel=1e-12)
    assert loop_orientation(loop) == 1
    b = split_branches(loop)
    assert b.charge_v.min() == 0 and b.charge_v.max() == 100
    assert b.discharge_v.min() == 0 and b.discharge_v.max() == 100
    diff = branch_energy(b.charge_branch) - branch_energy(b.discharge_branch)
    assert abs(diff) == pytest.approx(hysteresis_energy(loop), rel=1e-9)


def test_retraced_branch_has_no_area():
    v = np.linspace(0, 400, 50)
    q = 47e-12 * v
    loop = QVLoop(np.concatenate([v, v[-2::-1]]), np.concatenate([q, q[-2::-1]]))
    assert hysteresis_energy(loop) < 1e-25
    assert loop_orientation(loop) == 0 or hysteresis_energy(loop) < 1e-25


def test_degenerate_inputs():
    with pytest.raises(DegenerateLoop):
        QVLoop(np.arange(5.0), np.arange(5.0))
    open_loop = QVLoop(np.linspace(0, 1, 20), np.linspace(0, 1, 20))
    with pytest.raises(DegenerateLoop):
        split_branches(open_loop)
    with pytest.raises(NotClosed):
        hysteresis_energy(open_loop)
    flat = QVLoop(np.zeros(10), np.zeros(10))
    with pytest.raises(DegenerateLoop):
        split_branches(flat)


def test_branch_energy_linear_47pf():
    v = np.linspace(0, 400, 401)
    assert branch_energy(np.column_stack([v, 47e-12 * v])) == pytest.approx(3.760e-6, rel=1e-12)


def test_branch_energy_zero_span():
    assert branch_energy(np.zeros((5, 2))) == 0.0
    assert branch_energy(np.column_stack([np.zeros(4), np.linspace(0, 1e-9, 4)])) == 0.0


def test_branch_energy_sign_and_monotone():
    v = np.linspace(0, 10, 11)
    b = np.column_stack([v, 1e-9 * v])
    assert signed_branch_energy(b) > 0
    assert signed_branch_energy(b[::-1]) == pytest.approx(-signed_branch_energy(b))
    zig = np.column_stack([[0, 1, 0.5, 2], [0, 1, 2, 3]])
    with pytest.raises(NonMonotoneBranch):
        branch_energy(zig)
    with pytest.raises(TooFewPoints):
        branch_energy(np.array([[0.0, 0.0]]))


def test_coss_linear_is_constant():
    v = np.linspace(0, 400, 81)
    c = coss_large_signal(np.column_stack([v, 47e-12 * v]))
    np.testing.assert_allclose(c.c, 47e-12, rtol=1e-12)


def test_coss_quadratic():
    k = 1e-13
    v = np.linspace(0, 400, 401)
    c = coss_large_signal(np.column_stack([v, 0.5 * k * v**2]))
    inner = slice(5, -5)
    np.testing.assert_allclose(c.c[inner], k * c.v[inner], rtol=1e-3)


def test_coss_deduplicates_repeated_voltage():
    v = np.array([0, 1, 2, 2, 3, 4, 5], dtype=float)
    q = 1e-9 * np.array([0, 1, 2, 2.2, 3, 4, 5])
    c = coss_large_signal(np.column_stack([v, q]), smoothing_points=1)
    assert np.all(np.diff(c.v) > 0) and c.v.size == 6


def test_coss_guards():
    with pytest.raises(TooFewPoints):
        coss_large_signal(np.array([[0, 0], [1, 1.0]]))
    with pytest.raises(ValueError):
        coss_large_signal(np.column_stack([np.arange(5.0), np.arange(5.0)]), smoothing_points=4)


def test_charge_energy_curve_endpoint():
    v = np.linspace(0, 400, 101)
    vv, e = charge_energy_curve(np.column_stack([v, 47e-12 * v]))
    assert e[0] == 0 and e[-1] == pytest.approx(3.76e-6, rel=1e-12)
    np.testing.assert_allclose(e, 0.5 * 47e-12 * vv**2, rtol=1e-12, atol=1e-24)


@pytest.mark.parametrize("seed", range(20))
def test_decomposition_identity(seed):
    loop = random_loop(seed)
    b = split_branches(loop)
    lhs = abs(branch_energy(b.charge_branch) - branch_energy(b.discharge_branch))
    area = hysteresis_energy(loop)
    assert lhs == pytest.approx(area, rel=1e-9, abs=1e-9 * branch_energy(b.charge_branch))


@given(st.integers(0, 10_000), st.integers(0, 500))
def test_rotation_invariance(seed, shift):
    loop = random_loop(seed)
    r = loop.rotated(shift % (len(loop) - 1))
    assert hysteresis_energy(r) == pytest.approx(hysteresis_energy(loop), rel=1e-9, abs=1e-24)


@given(st.integers(0, 10_000))
def test_reversal_flips_orientation(seed):
    loop = random_loop(seed)
    assert loop_work(loop.reversed()) == pytest.approx(-loop_work(loop), rel=1e-9, abs=1e-24)


@given(st.integers(0, 10_000), st.floats(-1e-6, 1e-6))
def test_charge_offset_changes_nothing(seed, offset):
    loop = random_loop(seed)
    moved = QVLoop(loop.v, loop.q + offset)
    assert hysteresis_energy(moved) == pytest.approx(hysteresis_energy(loop), rel=1e-6, abs=1e-22)
    b0, b1 = split_branches(loop), split_branches(moved)
    assert branch_energy(b1.charge_branch) == pytest.approx(
        branch_energy(b0.charge_branch), rel=1e-9)


def test_build_loop_from_simulation(st_run):
    cap, truth, q = st_run
    loop = build_qv_loop(cap["v_dut"], q, truth.period_window)
    assert loop.closed
    assert hysteresis_energy(loop) == pytest.approx(0.189e-6, rel=5e-3)
    assert loop.q[int(np.argmin(loop.v))] == 0.0


def test_build_loop_partial_period_not_closed(st_run):
    cap, truth, q = st_run
    w = truth.period_window
    with pytest.raises(NotClosed):
        build_qv_loop(cap["v_dut"], q, TimeWindow(w.t_start, w.t_start + 0.7 * w.duration))


def test_build_loop_misaligned(st_run):
    cap, truth, q = st_run
    with pytest.raises(Misaligned):
        build_qv_loop(cap["v_dut"], q.replace(t0=q.t0 + 0.5 * q.dt), truth.period_window)


def test_linear_capacitor_loop_has_no_area():
    model = HysteresisCossModel.linear(47e-12, 400.0)
    cap, truth = simulate_sawyer_tower(model, STParams())
    q = charge_from_reference(cap["v_ref"], truth.c_ref)
    loop = build_qv_loop(cap["v_dut"], q, truth.period_window)
    span = np.ptp(loop.v) * np.ptp(loop.q)
    assert hysteresis_energy(loop) <= 1e-3 * span
    c = coss_large_signal(split_branches(loop).charge_branch)
    np.testing.assert_allclose(c.c[3:-3], 47e-12, rtol=1e-3)


def test_triangle_split_follows_source_direction():
    model = HysteresisCossModel.gan_like(loop_area=0.1e-6)
    cap, truth = simulate_sawyer_tower(model, STParams(shape="triangle"))
    q = charge_from_reference(cap["v_ref"], truth.c_ref)
    loop = build_qv_loop(cap["v_dut"], q, truth.period_window)
    b = split_branches(loop)
    assert np.all(np.diff(b.charge_v) > 0)
    assert np.all(np.diff(b.discharge_v) < 0)
    assert b.charge_v.size + b.discharge_v.size == len(loop) + 1
    assert b.charge_v[0] == loop.v[0] and b.charge_v.size == 5001
