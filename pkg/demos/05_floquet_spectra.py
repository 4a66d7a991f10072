# Post-selected (all +1) dynamics: quasi-energy spectra of the non-unitary
# Floquet operator along the self-dual line, steady-state density, and the
# phase map of the small-coupling effective field g = h + i*lambda.
import math

import numpy as np

from codelearn.floquet import (FloquetPoint, heff_classify, quasi_energies,
                               self_dual_scan, steady_state_density)

print("== spectra along the self-dual line (L_k = 4096) ==")
for alpha, pt, rho in self_dual_scan(np.linspace(0, math.pi / 2, 7), L_k=4096):
    table = quasi_energies(pt, 64)
    max_im = float(np.max(np.abs(table.eps_im)))
    print(f"  alpha = {alpha / math.pi:.3f} pi: J = {pt.J:6.3f} phi = {pt.phi:6.3f}"
          f"  rho_0 = {rho:7.4f}  max|Im eps| = {max_im:.4f}")

print("\n== effective-field classification ==")
for h, lam in [(1.0, 0.0), (0.0, 1.0), (0.0, 0.0), (2.0, 0.0),
               (0.3, 0.4), (0.3, 1.3), (1.5, 0.8)]:
    print(f"  (h, lambda) = ({h:4.1f}, {lam:4.1f}) -> {heff_classify(h, lam)}")

print("\n== X+Z point: the only steady momentum is k = 0 ==")
xz = FloquetPoint.from_couplings(math.log(1 + math.sqrt(2)), 0.0)
table = quasi_energies(xz, 2000)
steady = np.where(np.any(np.abs(table.eps_im) < 1e-8, axis=1))[0]
print(f"  steady momenta: {table.momenta[steady]}")
