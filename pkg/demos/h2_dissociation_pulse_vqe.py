#!/usr/bin/env python3
"""H2 dissociation with CNOT-based and pulse-based variational forms.

Exact-expectation VQE over seven bond distances for three forms on the
two-qubit parity-reduced Hamiltonian:

  * CNOT form, depth 1 (4 angle parameters) - engineers the ground state
    exactly at every distance;
  * pulse form, depth 1, no phase control (6 parameters) - a single CR tone
    is not expressive enough once correlation grows with the bond length;
  * pulse form, depth 2 with a virtual-Z before each CR (12 parameters) -
    recovers essentially all of the correlation energy.

Each scan warm-starts outward from 0.74 A and adds three fresh random
restarts per point.  Runtime is about a minute; writes one CSV per form.
"""

import numpy as np

from pulsevqe import chem, pulsemodel as pm, qubitop, vqe

DISTANCES = [0.3, 0.5, 0.74, 1.0, 1.5, 2.0, 2.5]
ANCHOR = 0.74

models = {(0, 1): pm.load_cr_fixtures(pm.builtin_fixture_path("lagos"))[(0, 1)]}

cache = {}


def problem(d):
    if d not in cache:
        geometry = chem.h2_geometry(d)
        ints = chem.ao_integrals(geometry)
        hf = chem.hartree_fock(ints, 1, 1)
        mo = chem.mo_hamiltonian(ints, hf.mo_coeff, 1, 1)
        psum = qubitop.parity_map_reduce_h2(mo)
        cache[d] = (psum, qubitop.exact_ground(psum)[0], hf.energy)
    return cache[d]


def anchored_scan(ansatz, budget, seed):
    upward = [d for d in DISTANCES if d >= ANCHOR]
    downward = [d for d in DISTANCES if d <= ANCHOR][::-1]
    records = {}
    for leg, leg_seed in ((upward, seed), (downward, seed + 1)):
        for r in vqe.scan(problem, leg, ansatz, models, seed=leg_seed,
                          budget=budget, warm_start=True, restarts=4):
            if r.x not in records or r.energy_vqe < records[r.x].energy_vqe:
                records[r.x] = r
    return [records[d] for d in DISTANCES]


forms = [
    ("cnot_p1", vqe.build_cnot_ansatz(2, [(0, 1)], 1), 1000),
    ("pulse_p1", vqe.build_pulse_ansatz(2, [(0, 1)], 1), 1200),
    ("pulse_p2_phases",
     vqe.build_pulse_ansatz(2, [(0, 1)], 2, with_cr_phase_params=True), 1500),
]

results = {}
for name, ansatz, budget in forms:
    records = anchored_scan(ansatz, budget, seed=11)
    results[name] = records
    with open(f"h2_dissociation_{name}.csv", "w") as fh:
        fh.write(vqe.curve_csv(records))
    print(f"{name}: {ansatz.n_parameters} parameters, wrote "
          f"h2_dissociation_{name}.csv")

print()
print(" d (A)   E_FCI (Ha)   CNOT err    pulse-p1 err  pulse-p2 err  p2 dur (dt)")
for i, d in enumerate(DISTANCES):
    e_fci = results["cnot_p1"][i].energy_fci
    row = [f"{d:5.2f}", f"{e_fci:+.6f}"]
    for name in ("cnot_p1", "pulse_p1", "pulse_p2_phases"):
        r = results[name][i]
        row.append(f"{r.energy_vqe - r.energy_fci:12.2e}")
    row.append(f"{results['pulse_p2_phases'][i].duration_samples:8d}")
    print("  ".join(row))

worst_p1 = max(r.energy_vqe - r.energy_fci for r in results["pulse_p1"])
worst_p2 = max(r.energy_vqe - r.energy_fci for r in results["pulse_p2_phases"])
print()
print(f"single CR tone leaves up to {worst_p1 * 1e3:.1f} mHa on the table;")
if abs(worst_p2) < 1e-9:
    print("two tones with phase control close it to numerical precision")
else:
    print(f"two tones with phase control close it to {worst_p2 * 1e3:.3f} mHa")
