#!/usr/bin/env python3
"""Qubit Hamiltonians for the three hydrogen clusters and their qubit-wise
commuting measurement groups.

H2 is parity-mapped and reduced to two qubits (five Pauli terms); H3 and H4
are Jordan-Wigner mapped to six and eight qubits.  Greedy largest-first
coloring of the conflict graph packs the terms into measurement bases.
"""

from pulsevqe import chem, qubitop

systems = [
    ("H2, d = 0.74 A", chem.h2_geometry(0.74), "parity-reduced"),
    ("H3 equilateral, 1.43 A", chem.h3_geometry(60.0, 1.43), "jw"),
    ("H4 rectangle, alpha = 40 deg, 1.8 A diagonals",
     chem.h4_geometry(40.0, 1.8), "jw"),
]

for title, geometry, mapping in systems:
    ints = chem.ao_integrals(geometry)
    hf = chem.hartree_fock(ints, geometry.n_alpha, geometry.n_beta)
    mo = chem.mo_hamiltonian(ints, hf.mo_coeff, geometry.n_alpha,
                             geometry.n_beta)
    if mapping == "parity-reduced":
        psum = qubitop.parity_map_reduce_h2(mo)
    else:
        psum = qubitop.jordan_wigner(mo)
    groups = qubitop.group_qubitwise(psum)
    e_fci, _ = qubitop.exact_ground(psum)

    print(f"== {title} ==")
    print(f"  qubits: {psum.n_qubits}   Pauli terms: {len(psum)}   "
          f"measurement groups: {len(groups)}")
    print(f"  E_HF  = {hf.energy:+.6f} Ha")
    print(f"  E_FCI = {e_fci:+.6f} Ha   (correlation {hf.energy - e_fci:.6f} Ha)")
    largest = max(groups, key=lambda g: len(g.labels))
    print(f"  largest group: basis {largest.basis} with {len(largest.labels)} terms")
    if psum.n_qubits == 2:
        for label in sorted(psum.terms):
            print(f"    {label}  {psum.terms[label]:+.8f}")
    print()
