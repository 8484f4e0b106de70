"""Filter a noisy 2-D linear system with the Linear Kalman Filter.

The hidden state follows v_{j+1} = M v_j + xi_j for a mildly rotating,
slightly contracting M.  We observe only the first component, corrupted by
noise, and watch the filter's error and covariance trace shrink.

Run:  python3 demos/linear_kalman_demo.py
"""

import numpy as np

from enkf_lab import (
    GaussianState,
    LinearModel,
    ObservationModel,
    RngStream,
    analyze,
    derive_stream,
    predict,
    standard_normal,
)

theta = 0.15
transition = 0.98 * np.array(
    [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
)
model = LinearModel(transition, 0.001 * np.eye(2))
obs = ObservationModel([[1.0, 0.0]], [[0.05]])  # observe x only

rng = RngStream(42)
truth = np.array([2.0, -1.0])
state = GaussianState([0.0, 0.0], np.eye(2))  # deliberately poor prior

print(f"{'step':>4} {'truth_x':>9} {'est_x':>9} {'|error|':>9} {'tr(C)':>9}")
for j in range(25):
    step_rng = derive_stream(rng, j)
    truth = transition @ truth
    y = obs.operator @ truth + 0.05**0.5 * standard_normal(step_rng, 1)

    predicted = predict(state, model)
    state = analyze(predicted, y, obs).state

    err = np.linalg.norm(truth - state.mean)
    tr = np.trace(state.covariance)
    print(f"{j:>4} {truth[0]:>9.4f} {state.mean[0]:>9.4f} {err:>9.4f} {tr:>9.4f}")

print("\nthe unobserved second component is recovered through the dynamics:")
print(f"truth = {truth},  estimate = {state.mean}")
