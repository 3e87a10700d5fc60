"""Output-capacitance hysteresis and switching-loss separation for power transistors.

Sawyer-Tower Q-V loops give the charge, discharge and hysteresis energies of
the output capacitance; single-pulse turn-off/turn-on records give the event
energies. Together they split turn-off loss into capacitive charging and
channel overlap, and expose the hysteresis loss hidden in the difference.
"""

__version__ = "0.1.0"

from .capture_io import ColumnSpec, parse_capture_csv, write_capture_csv
from .config import AnalysisConfig, load_config, parse_si
from .errors import AnalysisError
from .loss_model import (
    CrossValidation,
    LossBreakdown,
    cross_validate,
    event_energy,
    overlap_energy,
    separate_from_captures,
    separate_from_scalars,
)
from .report import Report, Series, read_report, write_report
from .sawyer_tower import (
    BranchPair,
    CossCurve,
    QVLoop,
    branch_energy,
    build_qv_loop,
    charge_from_reference,
    coss_large_signal,
    hysteresis_energy,
    loop_orientation,
    split_branches,
)
from .simulator import (
    HysteresisCossModel,
    PulseParams,
    STParams,
    energy_balance,
    simulate_sawyer_tower,
    simulate_single_pulse,
)
from .waveform import (
    Capture,
    TimeWindow,
    Waveform,
    detect_turnoff_window,
    detect_turnon_window,
    integrate_trapezoid,
    resample_uniform,
    transform,
)
