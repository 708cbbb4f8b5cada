#!/usr/bin/env python3
"""CNOT-ansatz depth study on H3 at a 40-degree opening angle.

Three independent runs (fresh uniform [0, pi] starting points) at each
entangler depth p in {1, 2, 3}, sampled with 4096 shots per measurement
group.  Emits the convergence traces so the depth/seed spread can be
plotted; no ordering between depths is asserted.
"""

from pulsevqe import chem, pulsemodel as pm, qubitop, vqe

geometry = chem.h3_geometry(40.0, 1.43)
ints = chem.ao_integrals(geometry)
hf = chem.hartree_fock(ints, geometry.n_alpha, geometry.n_beta)
mo = chem.mo_hamiltonian(ints, hf.mo_coeff, geometry.n_alpha, geometry.n_beta)
psum = qubitop.jordan_wigner(mo)
e_fci, _ = qubitop.exact_ground(psum)

models = pm.load_cr_fixtures(pm.builtin_fixture_path("lagos"))
runs, csv_text = vqe.depth_study(psum, tuple(models), models,
                                 depths=(1, 2, 3), seeds=(0, 1, 2),
                                 shots=4096, budget=300)

with open("h3_depth_study.csv", "w") as fh:
    fh.write(csv_text)

print(f"H3 at alpha = 40 deg, 1.43 A sides: E_FCI = {e_fci:+.6f} Ha, "
      f"E_HF = {hf.energy:+.6f} Ha")
print("depth  seed  params  best energy (Ha)  evals")
for depth, seed, result in runs:
    n_params = 6 * (depth + 1)
    print(f"  {depth}     {seed}     {n_params:3d}    {result.best_energy:+.6f}"
          f"       {result.n_evaluations}")
best = min(runs, key=lambda r: r[2].best_energy)
print(f"best run: depth {best[0]}, seed {best[1]} at "
      f"{best[2].best_energy:+.6f} Ha "
      f"({(best[2].best_energy - e_fci) * 1e3:.1f} mHa above full CI)")
print("wrote h3_depth_study.csv")
