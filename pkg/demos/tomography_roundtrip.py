#!/usr/bin/env python3
"""Hamiltonian tomography round trip on every shipped coefficient table.

For each directed pair we synthesize noiseless target Bloch traces with the
control prepared in |0> and |1>, fit one constant-axis rotation per control
state, and recombine the conditional frequencies into the seven effective
CR coefficients.  The fit should land within a fraction of a percent of the
table values everywhere.
"""

import numpy as np

from pulsevqe import pulsemodel as pm

NAMES = ("nu_zx", "nu_zy", "nu_zz", "nu_ix", "nu_iy", "nu_iz")

for fixture in ("lagos", "mumbai", "lagos_echo_01"):
    models = pm.load_cr_fixtures(pm.builtin_fixture_path(fixture))
    print(f"== {fixture} ==")
    for pair, model in sorted(models.items()):
        scale = max(abs(getattr(model, n)) for n in NAMES)
        times = np.linspace(0.0, 1.5 / scale, 200)
        fit = pm.fit_tomography(pm.tomography_traces(model, times))
        worst = max(abs(getattr(fit, n) - getattr(model, n)) for n in NAMES)
        cells = "  ".join(
            f"{n[3:].upper()}: {getattr(model, n) / 1e3:+8.0f}/"
            f"{getattr(fit, n) / 1e3:+9.2f}"
            for n in NAMES
        )
        print(f"  pair {pair}: true/fit kHz  {cells}  (worst gap {worst:.2e} Hz)")
print("all pairs recovered from 200-point noiseless traces")
