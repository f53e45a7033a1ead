"""Flip activity: law of large numbers and the dynamical phase transition.

The activity A(t) counts every flip in the window.  At equilibrium a bulk
site sees its constraint open with probability q and then flips at rate q
if occupied (probability p) or p if empty (probability q), so the per-site
rate converges to q(pq + qp) = 2pq^2.  Tilting the generator by
e^{lambda A} gives the scaled cumulant generating function psi_N(lambda) as
the top eigenvalue of a symmetric matrix; psi_N(0) = 0, its slope at 0 is
the mean rate, and the rescaled phi_N(alpha) = N psi_N(alpha / N) flattens
for very negative alpha: space-time regions of low activity are much
cheaper than the Gaussian picture suggests, the inactive phase.
"""

import numpy as np

from eastmodel import (
    ModelParams,
    activity_phi,
    activity_scgf,
    measure_activity,
    stationary_activity_rate,
)

params = ModelParams(q=0.5)

est = measure_activity(params, N=64, horizon=200.0, replicas=800, seed=0)
target = stationary_activity_rate(64, params)
print(f"bulk rate  : {est.rate_bulk:.5f} +- {est.stderr_bulk:.5f}  "
      f"(2pq^2 = {target['bulk']:.5f})")
print(f"total rate : {est.rate_total:.5f} +- {est.stderr_total:.5f}  "
      f"(exact {target['total']:.5f})")

N = 10
lam = np.array([-0.02, -0.01, 0.0, 0.01, 0.02])
psi = activity_scgf(N, params, lam)
print(f"\npsi_{N}(lambda) near the origin:")
for l, v in zip(lam, psi):
    print(f"  lambda = {l:+.2f} : {v:+.6f}")
slope = (psi[3] - psi[1]) / 0.02
print(f"slope at 0: {slope:.6f}  (mean rate {stationary_activity_rate(N, params)['total']:.6f})")

alphas = np.array([-5.0, -10.0, -20.0, -40.0, -60.0])
phi = activity_phi(N, params, alphas)
print(f"\nphi_{N}(alpha) = N psi_N(alpha/N), flattening toward the inactive plateau:")
for a, v in zip(alphas, phi):
    print(f"  alpha = {a:6.1f} : {v:+.6f}")
