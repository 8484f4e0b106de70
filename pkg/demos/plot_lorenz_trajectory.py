"""Trace the Lorenz 63 butterfly attractor and save it as an SVG.

Integrates the classic chaotic system (sigma=10, r=28, b=8/3) from the
starting point (-10, -10, 20) with a fixed-step RK4 integrator and plots
the x-z projection, the familiar two-lobed butterfly.

Run:  python3 demos/plot_lorenz_trajectory.py
"""

import numpy as np

from enkf_lab import AxesSpec, Curve, emit_svg, integrate_rk4, lorenz_drift_fn

drift = lorenz_drift_fn()
dt = 0.01
n_steps = 1000  # T = 10 time units

states = np.empty((n_steps + 1, 3))
states[0] = (-10.0, -10.0, 20.0)
for j in range(n_steps):
    states[j + 1] = integrate_rk4(drift, states[j], dt, 1)

print(f"integrated {n_steps} steps of dt={dt}")
print(f"final state: {states[-1]}")
print(f"max |component| along the way: {np.abs(states).max():.2f}")

svg = emit_svg(
    [Curve("trajectory", states[:, 0], states[:, 2])],
    AxesSpec(title="Lorenz 63 attractor", xlabel="x", ylabel="z", legend=False),
)
with open("lorenz_trajectory.svg", "w") as fh:
    fh.write(svg)
print("wrote lorenz_trajectory.svg")
