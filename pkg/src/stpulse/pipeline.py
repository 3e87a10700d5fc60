"""Capture-to-report analyses used by the command line."""

import numpy as np

from .config import pulse_channels, st_channels
from .errors import NoTransient
from .loss_model import analyze_pulse, separate_detailed, separate_from_scalars
from .report import Report, Series
from .sawyer_tower import (
    build_qv_loop,
    charge_energy_curve,
    charge_from_reference,
    coss_large_signal,
    hysteresis_energy,
    loop_orientation,
    signed_branch_energy,
    split_branches,
)
from .waveform import TimeWindow


def st_period_window(v_dut, frequency=None):
    """One excitation period of a Sawyer-Tower record.

    With a known frequency this is the last full period of the record.
    Otherwise the period is estimated from upward crossings of the
    mid-level and the window spans the last two of them, snapped to samples.
    """
    t0, dt, n = v_dut.t0, v_dut.dt, len(v_dut)
    if frequency is not None:
        period = 1.0 / frequency
        if period > v_dut.t_end - t0 + 0.5 * dt:
            raise NoTransient("record is shorter than one excitation period")
        return TimeWindow(v_dut.t_end - period, v_dut.t_end)
    y = v_dut.samples
    mid = 0.5 * (y.max() + y.min())
    band = 0.05 * (y.max() - y.min())
    ups, armed = [], False
    for k in range(1, n):
        if y[k] < mid - band:
            armed = True
        elif armed and y[k - 1] < mid <= y[k]:
            ups.append(k)
            armed = False
    if len(ups) < 2:
        raise NoTransient("fewer than two excitation periods found; set st_frequency "
                          "or window.st_period")
    steps = int(round(np.median(np.diff(ups))))
    k1 = ups[-2]
    if k1 + steps >= n:
        k1 = ups[-1] - steps
    return TimeWindow(t0 + k1 * dt, t0 + (k1 + steps) * dt)


def st_loop(capture, config):
    """(loop, period window) of a Sawyer-Tower capture."""
    v_dut, v_ref = st_channels(capture, config)
    q = charge_from_reference(v_ref, config.c_ref)
    window = config.window_overrides.get("st_period")
    if window is None:
        freq = config.st_frequency
        if freq is None and "frequency" in capture.metadata:
            freq = float(capture.metadata["frequency"])
        window = st_period_window(v_dut, freq)
    return build_qv_loop(v_dut, q, window), window


def analyze_st(capture, config, provenance=None):
    loop, window = st_loop(capture, config)
    branches = split_branches(loop)
    e_ch = signed_branch_energy(branches.charge_branch, config.monotone_tol)
    e_dis = signed_branch_energy(branches.discharge_branch, config.monotone_tol)
    coss = coss_large_signal(branches.charge_branch, config.smoothing_points)
    v_e, e = charge_energy_curve(branches.charge_branch)
    meas = {
        "e_charge": (abs(e_ch), "J"),
        "e_discharge": (abs(e_dis), "J"),
        "e_hysteresis": (hysteresis_energy(loop), "J"),
        "orientation": (float(loop_orientation(loop)), "1"),
        "v_min": (float(loop.v.min()), "V"),
        "v_max": (float(loop.v.max()), "V"),
    }
    series = {
        "qv_loop": Series("voltage", "charge", loop.v, loop.q),
        "coss": Series("voltage", "capacitance", coss.v, coss.c),
        "charge_energy": Series("voltage", "energy", v_e, e),
    }
    return Report("st", windows={"st_period": window}, measurements=meas,
                  config=config.to_dict(), provenance=provenance or {}, series=series)


def analyze_pulse_capture(capture, config, provenance=None):
    v_ds, i_ds = pulse_channels(capture, config)
    bus = config.bus_voltage_for(v_ds)
    ov = config.window_overrides
    res = analyze_pulse(v_ds, i_ds, bus, config.low_frac, config.high_frac,
                        config.settle_samples, ov.get("turnoff"), ov.get("turnon"),
                        config.extend_to_onset)
    meas = {"e_on": (res.e_on, "J"), "e_off": (res.e_off, "J"), "bus_voltage": (bus, "V")}
    return Report("pulse", windows={"turnoff": res.turnoff, "turnon": res.turnon},
                  measurements=meas, config=config.to_dict(), provenance=provenance or {})


def separate_captures(pulse_capture, st_capture, config, provenance=None):
    loop, st_window = st_loop(st_capture, config)
    sep = separate_detailed(pulse_capture, loop, config, config.e_charge_source)
    meas = {"e_charge_st": (sep.e_charge_st, "J"), "e_charge_pulse": (sep.e_charge_pulse, "J")}
    windows = {"turnoff": sep.pulse.turnoff, "turnon": sep.pulse.turnon, "st_period": st_window}
    return Report("separate", breakdown=sep.breakdown, cross_validation=sep.cross_validation,
                  windows=windows, measurements=meas, config=config.to_dict(),
                  provenance=provenance or {},
                  series={"qv_loop": Series("voltage", "charge", loop.v, loop.q)})


def separate_scalars(e_on, e_off, e_charge, provenance=None):
    return Report("separate", breakdown=separate_from_scalars(e_on, e_off, e_charge),
                  provenance=provenance or {})
