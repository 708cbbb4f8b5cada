#!/usr/bin/env python3
"""Cross-resonance dynamics with and without an echo.

Evolves |control, target> basis states under the effective CR generator of
the shipped ibm_lagos (0, 1) coefficient table.  Two runs are compared
against the ideal conditional rotation (a ZX-only generator of matched pulse
area):

  * the plain tone, whose large unconditional IX term drags the target the
    same way for both control states;
  * the echoed tone (two half pulses with a pi drive-phase flip and control
    X pulses in between), which cancels IX/IY/ZZ to first order.

Writes cr_echo_dynamics.csv and prints a compact summary.
"""

import numpy as np

from pulsevqe import pulsemodel as pm

model = pm.load_cr_fixtures(pm.builtin_fixture_path("lagos"))[(0, 1)]
echoed_table = pm.load_cr_fixtures(pm.builtin_fixture_path("lagos_echo_01"))[(0, 1)]
zx_only = pm.zx_only_model(model)

half_durations = list(range(pm.DURATION_MIN, 1041, 16))


def populations(unitary):
    out = np.zeros((2, 4))
    for control in (0, 1):
        state = np.zeros(4, dtype=complex)
        state[2 * control] = 1.0
        out[control] = np.abs(unitary @ state) ** 2
    return out


rows = []
drift_plain = drift_echo = 0.0
for d in half_durations:
    pulse = pm.gaussian_square(d, 1.0)
    u_plain = pm.cr_unitary(model, pulse)
    u_echo = pm.echoed_cr_unitary(model, pulse)
    u_ref_half = pm.cr_unitary(zx_only, pulse)
    p_plain = populations(u_plain)
    p_plain_ref = populations(u_ref_half)
    # the echo plays the pulse twice, so its ZX-only reference carries twice
    # the area: square the half-pulse reference unitary
    p_echo = populations(u_echo)
    p_echo_ref = populations(u_ref_half @ u_ref_half)
    drift_plain = max(drift_plain, np.abs(p_plain - p_plain_ref).max())
    drift_echo = max(drift_echo, np.abs(p_echo - p_echo_ref).max())
    cells = [str(d)]
    for block in (p_plain, p_plain_ref, p_echo, p_echo_ref):
        cells += [f"{v:.9f}" for v in block.ravel()]
    rows.append(",".join(cells))

header = ["half_duration_samples"]
for name in ("plain", "plain_zxref", "echo", "echo_zxref"):
    for c in (0, 1):
        for state in ("00", "01", "10", "11"):  # |target, control>
            header.append(f"{name}_c{c}_p{state}")

with open("cr_echo_dynamics.csv", "w") as fh:
    fh.write(",".join(header) + "\n" + "\n".join(rows) + "\n")

print("effective CR model, ibm_lagos (0, 1), unit amplitude:")
print(f"  nu_zx = {model.nu_zx / 1e3:+.0f} kHz   nu_ix = {model.nu_ix / 1e3:+.0f} kHz")
print("max population deviation from the matched-area ZX-only reference:")
print(f"  plain tone : {drift_plain:.3f}")
print(f"  echoed tone: {drift_echo:.3f}")
print(f"the echo suppresses the off-target terms by {drift_plain / drift_echo:.1f}x")
print()
print("consistently, tomography with the echo enabled measures")
print(f"  nu_ix = {echoed_table.nu_ix / 1e3:+.0f} kHz (was "
      f"{model.nu_ix / 1e3:+.0f} kHz without it)")
print("wrote cr_echo_dynamics.csv")
