"""
Loss separation, two ways.

First from three sets of measured event energies (resonant-converter
operating points with a common E_charge), then end to end from a simulated pulse + Sawyer-Tower
capture pair written to disk and read back like scope exports.
"""

import tempfile
from pathlib import Path

from stpulse import (
    AnalysisConfig,
    HysteresisCossModel,
    PulseParams,
    STParams,
    parse_capture_csv,
    simulate_sawyer_tower,
    simulate_single_pulse,
    write_capture_csv,
)
from stpulse.loss_model import cross_validate, separate_from_scalars
from stpulse.pipeline import separate_captures
from stpulse.report import Report, render_table

uJ = 1e-6
cases = {"case 1": (6.479, 8.134, 6.889),
         "case 2": (6.212, 7.917, 6.889),
         "case 3": (6.658, 7.201, 6.889)}

for name, (e_on, e_off, e_charge) in cases.items():
    b = separate_from_scalars(e_on * uJ, e_off * uJ, e_charge * uJ)
    print(name)
    print(render_table(Report("separate", breakdown=b)))

b3 = separate_from_scalars(6.658 * uJ, 7.201 * uJ, 6.889 * uJ)
cv = cross_validate(b3, 0.189 * uJ)
print("case 3 vs Sawyer-Tower loop: %.3f uJ apart" % (cv.discrepancy / uJ))

# -- from captures ---------------------------------------------------------------
model = HysteresisCossModel.gan_like(loop_area=0.189e-6)
tf = 50e-9
pulse, truth = simulate_single_pulse(model, PulseParams(channel_fall_time=tf, load_current=1.0,
                                                       pulse_duration=3 * tf, dt=tf / 10000))
st_cap, _ = simulate_sawyer_tower(model, STParams())

tmp = Path(tempfile.mkdtemp())
write_capture_csv(pulse, tmp / "pulse.csv")
write_capture_csv(st_cap, tmp / "st.csv")

cfg = AnalysisConfig(c_ref=10e-9, bus_voltage=400.0)
rep = separate_captures(parse_capture_csv(tmp / "pulse.csv"), parse_capture_csv(tmp / "st.csv"), cfg)
print(render_table(rep))
print("simulator truth: overlap %.3f uJ, hysteresis %.3f uJ"
      % (truth.e_overlap / uJ, truth.e_hysteresis / uJ))
