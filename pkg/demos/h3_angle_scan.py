#!/usr/bin/env python3
"""Isosceles H3: energy versus the opening angle, and the schedule-duration
payoff of the pulse-based form.

Scans the angle at fixed 1.43 A sides, extracts the minimum-energy angle
from a quartic fit of the exact (full CI) curve, and then runs one
pulse-based VQE at the equilibrium-ish angle to compare its bound schedule
duration against the CNOT-based variational form on the same coupling.
"""

import numpy as np

from pulsevqe import chem, pulsemodel as pm, qubitop, vqe

ALPHAS = [float(a) for a in np.arange(20.0, 60.001, 2.0)]
SIDE = 1.43

models = pm.load_cr_fixtures(pm.builtin_fixture_path("lagos"))
coupling = tuple(models)


def problem(alpha):
    geometry = chem.h3_geometry(alpha, SIDE)
    ints = chem.ao_integrals(geometry)
    hf = chem.hartree_fock(ints, geometry.n_alpha, geometry.n_beta)
    mo = chem.mo_hamiltonian(ints, hf.mo_coeff, geometry.n_alpha,
                             geometry.n_beta)
    psum = qubitop.jordan_wigner(mo)
    return psum, qubitop.exact_ground(psum)[0], hf.energy


records = vqe.scan(problem, ALPHAS)  # classical baselines only
with open("h3_angle_scan.csv", "w") as fh:
    fh.write(vqe.curve_csv(records))

coeffs, alpha_min, at_boundary = vqe.quartic_fit_min(
    [r.x for r in records], [r.energy_fci for r in records])
print(f"scanned alpha = {ALPHAS[0]:.0f}..{ALPHAS[-1]:.0f} deg "
      f"in {ALPHAS[1] - ALPHAS[0]:.0f} deg steps at {SIDE} A sides")
print(f"quartic fit of the full-CI curve: alpha_min = {alpha_min:.2f} deg")
print("wrote h3_angle_scan.csv")
print()

# one pulse-VQE point: how much shorter is the optimized schedule?
alpha_demo = 30.0
psum, e_fci, e_hf = problem(alpha_demo)
pulse = vqe.build_pulse_ansatz(6, coupling, 1)
cnot = vqe.build_cnot_ansatz(6, coupling, 1)
cnot_duration = vqe.bind(cnot, np.zeros(cnot.n_parameters),
                         models).duration_samples
result = min((vqe.vqe_minimize(psum, pulse, models, seed=s, budget=2000)
              for s in (0, 1)), key=lambda r: r.best_energy)
dt_us = pm.DEFAULT_DT * 1e6
print(f"alpha = {alpha_demo:.0f} deg: E_FCI = {e_fci:+.6f} Ha, "
      f"pulse-VQE best = {result.best_energy:+.6f} Ha "
      f"({(result.best_energy - e_fci) * 1e3:.0f} mHa of residual correlation;"
      " the depth-one form trades accuracy for schedule length)")
print(f"bound pulse schedule : {result.duration_samples:6d} dt "
      f"({result.duration_samples * dt_us:.2f} us)")
print(f"CNOT-form schedule   : {cnot_duration:6d} dt "
      f"({cnot_duration * dt_us:.2f} us)")
print(f"duration fraction    : {result.duration_samples / cnot_duration:.3f}")
