"""
Q-V loop of a hysteretic output capacitance from a simulated Sawyer-Tower run.

The DUT model is GaN-like: C_oss falls steeply over the first tens of volts
and the charge and discharge branches enclose 0.189 uJ.
"""

import numpy as np

from stpulse import (
    HysteresisCossModel,
    STParams,
    branch_energy,
    build_qv_loop,
    charge_from_reference,
    coss_large_signal,
    hysteresis_energy,
    simulate_sawyer_tower,
    split_branches,
)

model = HysteresisCossModel.gan_like(c_at_vmax=47e-12, v_max=400.0, loop_area=0.189e-6)
print("model loop area  %.4f uJ" % (model.loop_area() * 1e6))

cap, truth = simulate_sawyer_tower(model, STParams(c_ref=10e-9, frequency=100e3))
print("channels:", cap.labels)

# charge from the reference capacitor, last period only
q = charge_from_reference(cap["v_ref"], truth.c_ref)
loop = build_qv_loop(cap["v_dut"], q, truth.period_window)
branches = split_branches(loop)

e_ch = branch_energy(branches.charge_branch)
e_dis = branch_energy(branches.discharge_branch)
print("E_charge         %.4f uJ" % (e_ch * 1e6))
print("E_discharge      %.4f uJ" % (e_dis * 1e6))
print("loop area        %.4f uJ" % (hysteresis_energy(loop) * 1e6))
print("difference       %.4f uJ" % ((e_ch - e_dis) * 1e6))

coss = coss_large_signal(branches.charge_branch, smoothing_points=5)
for v in (0, 10, 25, 50, 100, 200, 400):
    print("  C_oss(%3d V) = %6.1f pF" % (v, coss.at(v) * 1e12))

# energy needed to charge up to each voltage
levels = np.array([100.0, 200.0, 300.0, 400.0])
for v in levels:
    print("  E_charge(0..%3d V) = %.3f uJ" % (v, model.charge_energy(0, v) * 1e6))
