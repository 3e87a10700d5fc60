"""
Single-pulse turn-off: the drain current splits into channel current and
C_oss charging current.  The overlap of v_ds and the channel current is the
only part that is truly lost at turn-off; the rest sits in C_oss until
turn-on.
"""

from stpulse import HysteresisCossModel, PulseParams, simulate_single_pulse
from stpulse.loss_model import analyze_pulse, overlap_energy

model = HysteresisCossModel.gan_like(loop_area=0.189e-6)

for tf in (10e-9, 50e-9, 200e-9):
    p = PulseParams(bus_voltage=400.0, channel_fall_time=tf,
                    load_current=1.6 * model.q_span / tf,   # channel off before the clamp
                    pulse_duration=3 * tf, dt=tf / 5000)
    cap, gt = simulate_single_pulse(model, p)

    res = analyze_pulse(cap["v_ds"], cap["i_ds"], p.bus_voltage)
    ovl = overlap_energy(cap["v_ds"], cap["i_channel"], res.turnoff)

    print("t_f = %5.0f ns  I_L = %.2f A" % (tf * 1e9, p.load_current))
    print("   turn-off window %.1f .. %.1f ns" % (res.turnoff.t_start * 1e9, res.turnoff.t_end * 1e9))
    print("   E_off %.3f uJ   E_on %.3f uJ" % (res.e_off * 1e6, res.e_on * 1e6))
    print("   overlap %.4f uJ (truth %.4f uJ)" % (ovl * 1e6, gt.e_overlap * 1e6))
