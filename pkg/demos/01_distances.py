"""Fidelity, Bures angle and the Bures metric on a pair of qubit states.

Run: python demos/01_distances.py
"""

import numpy as np

from bures_geo import linalg, states

rho = states.DensityMatrix(np.diag([0.7, 0.3]))
sigma = states.DensityMatrix(np.diag([0.4, 0.6]))

print("Two diagonal qubit states, so the fidelity reduces to a classical overlap.")
print(f"  fidelity            {states.fidelity(rho, sigma):.12f}")
print(f"  (sum sqrt(p q))^2   {np.sum(np.sqrt([0.28, 0.18])) ** 2:.12f}")
print(f"  Bures angle         {states.bures_angle(rho, sigma):.12f}")
print(f"  Bures distance      {states.bures_distance(rho, sigma):.12f}")

rng = np.random.default_rng(7)
rho3 = states.random_density_matrix(3, rng)
drho = linalg.random_hermitian(3, rng)
drho -= np.trace(drho) / 3 * np.eye(3)

print("\nThe metric is the infinitesimal form of the angle. Shrink the step and watch")
print("angle^2 / step^2 settle on g(drho, drho):")
g = states.bures_metric(rho3, drho, drho)
for eps in (1e-2, 1e-3, 1e-4):
    lo = states.DensityMatrix(rho3.matrix - eps * drho)
    hi = states.DensityMatrix(rho3.matrix + eps * drho)
    print(f"  eps={eps:.0e}   {states.bures_angle(lo, hi) ** 2 / (2 * eps) ** 2:.10f}")
print(f"  metric       {g:.10f}")

ell = states.sld(rho3, drho)
print(f"\nSLD route: tr(rho L^2) = {np.trace(rho3.matrix @ ell @ ell).real:.10f} = 4 g = {4 * g:.10f}")

best, overlap = states.uhlmann_optimize(rho3, states.random_density_matrix(3, rng))
print(f"\nUhlmann search over ancilla unitaries finds overlap {overlap:.12f};")
print(f"the closed-form root fidelity is            {states.root_fidelity(rho3, best.reduced_state()):.12f}")
