"""Entangled probes: QFI grows as the square of the number of probes.

Run: python demos/06_heisenberg.py
"""

import numpy as np

from bures_geo import circuits, metrology

base = metrology.ProbeEnsembleSpec.uniform(1, gap=1.0)
print(" N   QFI          expected   leaked to ancillas")
for row in metrology.heisenberg_scan(base, (1, 2, 3, 4)):
    print(f" {row.n_probes}   {row.qfi:.9f}   {row.expected:8.1f}   {row.leaked:.1e}")

print("\nThe same state comes out of a GHZ-type preparation circuit:")
ens = base.resized(3)
orbit = metrology.UnitaryOrbit(ens.hamiltonian(), ens.input_state())
for x in (0.2, 0.9):
    out = circuits.simulate_statevector(circuits.build_probe_circuit(ens.pairs, x, ens.phase))
    print(f"  x {x}   |<circuit|exp(-ixH) input>| = {abs(np.vdot(out, orbit.vector(x))):.12f}")
