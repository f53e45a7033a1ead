"""Persistence of the origin against the spectral upper bound.

F(t) is the equilibrium probability that the leftmost site has not flipped
by time t.  A Feynman-Kac argument turns the spectral gap into the bound
F(t) <= 2 exp(-gap * min(p, q) * t / 4); the Monte Carlo curve must sit
below it (within sampling error) at every time.  The same machinery gives
the exact exponent beta(lambda) = -max spec(L - lambda 1_occupied), whose
slope at lambda = gap/2 is capped by pq/(1+p) + p.
"""

import numpy as np

from eastmodel import ModelParams, measure_persistence, persistence_exponent, spectral_gap

params = ModelParams(q=0.3)
L = 12
gap = spectral_gap(L, params).gap

t_grid = np.geomspace(1.0, 30.0, 8)
curve = measure_persistence(params, L, 30.0, t_grid, replicas=4000, seed=0)
print("   t      F(t)     stderr    2 e^(-gap min(p,q) t/4)")
for t, f, se in zip(curve.times, curve.fraction, curve.stderr):
    bound = 2.0 * np.exp(-gap * min(params.p, params.q) * t / 4.0)
    flag = "ok" if f <= bound + 3 * se else "ABOVE"
    print(f"{t:6.2f}   {f:.4f}   {se:.4f}    {bound:.4f}  {flag}")

lam = gap / 2.0
beta = persistence_exponent(L, params, [lam])[0]
cap = params.p * params.q / (1.0 + params.p) + params.p
print(f"\nbeta(gap/2)/(gap/2) = {beta / lam:.4f}  (cap pq/(1+p) + p = {cap:.4f})")
