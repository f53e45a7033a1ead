"""Two exact finite-volume computations: hitting tails and block dynamics.

First, the time to first see a vacancy at the origin: reversibility gives
P_pi(tau_A > t) <= exp(-t gap(L) pi(A)) for A = {sigma(0) = 0}, and the
sub-generator restricted to A^c computes the tail exactly, so the bound can
be checked to floating-point accuracy (pi(A) = q here).

Second, the auxiliary block dynamics: refresh the left block when the right
block contains a vacancy, refresh the right block always.  Its generator
has the explicit slow eigenvalue -1 + sqrt(p^|I|), the seed of the
induction that bounds the East gap window by window.
"""

import numpy as np

from eastmodel import ModelParams, block_dynamics_spectrum, hitting_time_tail, spectral_gap

params = ModelParams(q=0.4)
times = np.array([0.5, 1.0, 2.0, 4.0])

print("L = 6, A = {origin empty}")
member = (np.arange(1 << 6) & 1) == 0
tail = hitting_time_tail(6, params, member, times)
gap = spectral_gap(6, params).gap
print("   t    P(tau > t)   e^(-t gap q)")
for t, p_t in zip(times, tail):
    print(f"{t:5.1f}   {p_t:.6f}     {np.exp(-t * gap * params.q):.6f}")

for i_size in (1, 2):
    spec = block_dynamics_spectrum(3, 3, i_size, ModelParams(0.5))
    predicted = spec.predicted_slow_mode
    nearest = spec.eigenvalues[np.argmin(np.abs(spec.eigenvalues - predicted))]
    print(
        f"blocks (3, 3), |I| = {i_size}: predicted slow mode {predicted:.12f}, "
        f"nearest eigenvalue {nearest:.12f}"
    )
