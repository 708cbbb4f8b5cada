#!/usr/bin/env python3
"""Pulse envelopes and the hardware parameter wrappers.

Samples a GaussianSquare tone and a DRAG pulse into a CSV (real/imaginary
columns), and tabulates the sinusoidal wrappers that keep optimizer
parameters inside the AWG constraints: amplitudes in [-1, 1], durations in
[256, 1040] samples and divisible by 16.
"""

import math

import numpy as np

from pulsevqe import pulsemodel as pm

gs = pm.gaussian_square(640, 0.85)
dr = pm.drag(1.0)

with open("pulse_envelopes.csv", "w") as fh:
    fh.write("sample,gaussian_square_re,drag_re,drag_im\n")
    gs_samples = pm.envelope_samples(gs)
    dr_samples = pm.envelope_samples(dr)
    for k in range(max(gs.duration, dr.duration)):
        g = f"{gs_samples[k].real:.6f}" if k < gs.duration else ""
        d_re = f"{dr_samples[k].real:.6f}" if k < dr.duration else ""
        d_im = f"{dr_samples[k].imag:.6f}" if k < dr.duration else ""
        fh.write(f"{k},{g},{d_re},{d_im}\n")

print(f"GaussianSquare: duration {gs.duration}, width {gs.width}, "
      f"sigma {gs.sigma:.0f}, area {pm.envelope_area(gs):.1f} samples")
print(f"DRAG: duration {dr.duration}, sigma {dr.sigma:.0f}, beta {dr.beta}")
print("wrote pulse_envelopes.csv")
print()

print("theta      sin wrapper -> amplitude    duration wrapper -> samples")
for theta in (-math.pi / 2, -1.0, 0.0, 0.7, math.pi / 2, 4.0):
    print(f"{theta:+6.3f}    {pm.wrap_amplitude(theta):+23.4f}"
          f"    {pm.wrap_duration(theta):21d}")

rng = np.random.default_rng(1)
thetas = rng.uniform(-30, 30, 10_000)
durations = np.array([pm.wrap_duration(t) for t in thetas])
print()
print(f"10^4 random angles: all durations multiples of 16 in "
      f"[{durations.min()}, {durations.max()}], "
      f"{len(np.unique(durations))} distinct values")
