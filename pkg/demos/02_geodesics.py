"""Every geodesic between two invertible states, and where each one meets the boundary.

Run: python demos/02_geodesics.py
"""

import numpy as np

from bures_geo import geodesics, states

rho = np.diag([0.7, 0.3])
sigma = np.diag([0.4, 0.6])

specs = geodesics.enumerate_geodesics(rho, sigma)
print(f"{len(specs)} geodesics join rho and sigma (one per sign pattern):")
for spec in specs:
    hits = geodesics.boundary_intersections(spec)
    times = ", ".join(f"{b.tau:.5f}" for b in hits)
    print(f"  signs {geodesics.format_signs(spec.signs)}  length {spec.theta:.9f}  boundary at tau = {times}")

shortest = specs[0]
print(f"\nThe shortest one has length equal to the Bures angle {states.bures_angle(rho, sigma):.9f}.")
print(f"Second length from the smallest eigenvalue of Lambda: cos(theta_2) = cos(theta_1) - 2 lambda_min")
print(f"  {np.cos(specs[1].theta):.12f} vs {np.cos(shortest.theta) - 2 * shortest.lam_values[0]:.12f}")

print("\nAlong the shortest geodesic, the distance from rho grows exactly with tau:")
for tau in np.linspace(0, shortest.theta, 4):
    print(f"  tau {tau:.4f}   angle(rho, gamma(tau)) {states.bures_angle(rho, shortest.evaluate(tau)):.6f}")

print("\nAt an intersection the curve passes through a rank-deficient state whose kernel")
print("is an eigenspace of M:")
hit = geodesics.boundary_intersections(specs[2])[0]
print(f"  tau {hit.tau:.6f}  eigenvalues {np.round(hit.state.eigenvalues, 12)}  M-eigenvalue {hit.mu:.6f}")
print(f"  |gamma(tau) k| = {np.linalg.norm(hit.state.matrix @ hit.kernel_basis):.2e}")
print(f"  det X scan finds zeros at {np.round(geodesics.scan_det_zeros(specs[2]), 6)}")

print("\nFlipping every sign retraces the same closed curve in the opposite direction:")
rev = geodesics.reverse_signs(shortest)
print(f"  length {rev.theta:.6f} = pi - {shortest.theta:.6f}")
print(f"  |gamma_rev(0.4) - gamma(-0.4)| = {np.linalg.norm(rev.evaluate(0.4).matrix - shortest.evaluate(-0.4).matrix):.1e}")
