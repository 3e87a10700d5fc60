"""Switching-loss separation.

Turn-on energy is the discharge energy of the output capacitance; turn-off
energy is its charge energy plus the overlap loss of the channel current and
the rising drain voltage. With E_charge known from a Sawyer-Tower loop, the
half-bridge event energies give overlap and hysteresis losses by difference:

    E_overlap    = E_off - E_charge
    E_hysteresis = (E_off - E_on) - E_overlap = E_charge - E_discharge

All energies are joules and stored as magnitudes.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Optional

from .errors import NegativeComponent
from .sawyer_tower import branch_energy, hysteresis_energy, split_branches
from .waveform import (
    TimeWindow,
    detect_turnoff_window,
    detect_turnon_window,
    integrate_trapezoid,
    multiply,
    require_aligned,
)

log = logging.getLogger(__name__)

_CLOSURE_RTOL = 1e-12


@dataclass(frozen=True)
class LossBreakdown:
    e_on: float
    e_off: float
    e_charge: float
    e_discharge: float
    e_overlap: float
    e_hysteresis: float

    def __post_init__(self):
        for name, val in asdict(self).items():
            if val < 0:
                raise NegativeComponent(name, val)
        scale = max(self.e_on, self.e_off, self.e_charge, 1e-300)
        if abs(self.e_off - self.e_on - self.e_overlap - self.e_hysteresis) > _CLOSURE_RTOL * scale:
            raise ValueError("e_off - e_on must equal e_overlap + e_hysteresis")
        if abs(self.e_off - self.e_charge - self.e_overlap) > _CLOSURE_RTOL * scale:
            raise ValueError("e_off must equal e_charge + e_overlap")
        if self.e_discharge != self.e_on:
            raise ValueError("e_discharge must equal e_on")

    def as_dict(self):
        return asdict(self)

    def scaled(self, factor):
        return LossBreakdown(**{k: v * factor for k, v in asdict(self).items()})


@dataclass(frozen=True)
class CrossValidation:
    model_hysteresis: float
    st_hysteresis: float
    discrepancy: float


def event_energy(v, i, window):
    """|integral of v*i dt| over ``window`` (trapezoid on the product)."""
    if v.unit != "V" or i.unit != "A":
        raise ValueError(f"expected volts and amperes, got {v.unit!r} and {i.unit!r}")
    require_aligned(v, i)
    return abs(integrate_trapezoid(multiply(v, i), window))


def overlap_energy(v_ds, i_ds_f, t_off):
    """Channel overlap loss: integral of v_ds * i_channel over the turn-off window."""
    return event_energy(v_ds, i_ds_f, t_off)


def separate_from_scalars(e_on, e_off, e_charge):
    """Split measured event energies into the six loss components.

    Raises :class:`NegativeComponent` when overlap or hysteresis comes out
    negative, which means the three inputs cannot all be right.
    """
    for name, val in (("e_on", e_on), ("e_off", e_off), ("e_charge", e_charge)):
        if val < 0:
            raise NegativeComponent(name, val)
    e_overlap = e_off - e_charge
    if e_overlap < 0:
        raise NegativeComponent("e_overlap", e_overlap)
    e_hysteresis = (e_off - e_on) - e_overlap
    if e_hysteresis < 0:
        raise NegativeComponent("e_hysteresis", e_hysteresis)
    return LossBreakdown(e_on=e_on, e_off=e_off, e_charge=e_charge, e_discharge=e_on,
                         e_overlap=e_overlap, e_hysteresis=e_hysteresis)


def cross_validate(breakdown, st_hysteresis):
    m = breakdown.e_hysteresis
    return CrossValidation(m, st_hysteresis, abs(m - st_hysteresis))


@dataclass(frozen=True)
class PulseAnalysis:
    e_on: float
    e_off: float
    turnoff: TimeWindow
    turnon: TimeWindow
    e_off_channel: Optional[float] = None  # overlap if a channel-current record exists


def analyze_pulse(v_ds, i_ds, bus_voltage, low_frac=0.1, high_frac=0.9, settle_samples=10,
                  turnoff=None, turnon=None, extend_to_onset=True, i_channel=None):
    """Event energies of one single-pulse capture.

    Windows are detected unless given explicitly.
    """
    if turnoff is None:
        turnoff = detect_turnoff_window(v_ds, bus_voltage, low_frac, high_frac,
                                        settle_samples, extend_to_onset=extend_to_onset)
    if turnon is None:
        turnon = detect_turnon_window(v_ds, bus_voltage, low_frac, high_frac,
                                      settle_samples, extend_to_onset=extend_to_onset)
    e_off = event_energy(v_ds, i_ds, turnoff)
    e_on = event_energy(v_ds, i_ds, turnon)
    ovl = overlap_energy(v_ds, i_channel, turnoff) if i_channel is not None else None
    return PulseAnalysis(e_on, e_off, turnoff, turnon, ovl)


@dataclass(frozen=True)
class Separation:
    breakdown: LossBreakdown
    cross_validation: CrossValidation
    pulse: PulseAnalysis
    e_charge_st: float
    e_charge_pulse: float

    @property
    def routes_disagree(self):
        return abs(self.e_charge_pulse - self.e_charge_st) > 0.02 * self.e_charge_st


def separate_detailed(pulse_capture, st_loop, config, e_charge_source="st"):
    """Like :func:`separate_from_captures` but keeps every intermediate."""
    from .config import pulse_channels  # avoid an import cycle

    v_ds, i_ds = pulse_channels(pulse_capture, config)
    ov = config.window_overrides
    res = analyze_pulse(v_ds, i_ds, config.bus_voltage_for(v_ds), config.low_frac,
                        config.high_frac, config.settle_samples,
                        ov.get("turnoff"), ov.get("turnon"), config.extend_to_onset)
    branches = split_branches(st_loop)
    e_charge_st = branch_energy(branches.charge_branch, config.monotone_tol)
    # with the gate shorted all drain current charges C_oss, so the turn-off
    # record itself is a second route to E_charge
    e_charge_pulse = res.e_off
    if e_charge_source not in ("st", "pulse"):
        raise ValueError(f"e_charge_source must be 'st' or 'pulse', got {e_charge_source!r}")
    e_charge = e_charge_st if e_charge_source == "st" else e_charge_pulse
    breakdown = separate_from_scalars(res.e_on, res.e_off, e_charge)
    cv = cross_validate(breakdown, hysteresis_energy(st_loop))
    sep = Separation(breakdown, cv, res, e_charge_st, e_charge_pulse)
    if sep.routes_disagree:
        log.info("E_charge routes differ by more than 2%%: Sawyer-Tower %.6g J, pulse %.6g J",
                 e_charge_st, e_charge_pulse)
    return sep


def separate_from_captures(pulse_capture, st_loop, config, e_charge_source="st"):
    """Full separation from a half-bridge pulse capture and a Sawyer-Tower loop.

    ``config`` supplies the channel map, shunt scaling, deskew, thresholds
    and optional window overrides (see :class:`stpulse.config.AnalysisConfig`).
    E_charge comes from the loop's charge branch; ``e_charge_source="pulse"``
    takes it from the turn-off record instead, which is only meaningful when
    the channel carries no current (gate shorted).
    """
    return separate_detailed(pulse_capture, st_loop, config, e_charge_source).breakdown
