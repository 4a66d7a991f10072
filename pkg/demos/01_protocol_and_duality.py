# Walk the protocol coordinates: measurement strength, effective couplings,
# and the complex Kramers-Wannier map that ties bond and site gates together.
import math

import numpy as np

from codelearn.duality import kw, kw_couple, kw_explicit, self_dual_point
from codelearn.protocol import ProtocolPoint, strength_from_time

print("== measurement strength ==")
for t in (0.0, math.pi / 8, 0.143 * math.pi, math.pi / 4):
    beta = strength_from_time(t)
    print(f"  t = {t / math.pi:.3f} pi  ->  beta = {beta:.6f}")

print("\n== circuit couplings at a few bases (projective limit) ==")
for name, theta, phi in [
    ("Z      ", 0.0, 0.0),
    ("X+Z    ", math.pi / 4, 0.0),
    ("X+Y+Z  ", math.atan(math.sqrt(2)), math.pi / 4),
    ("Y      ", math.pi / 2, math.pi / 2),
    ("XY line", math.pi / 2, 0.3 * math.pi),
]:
    p = ProtocolPoint.at(theta, phi, math.pi / 4)
    print(f"  {name}: J = {p.J_eff:8.4f}  J_d = {p.J_d:8.4f}  phi_d = {p.phi_d:8.4f}")

print("\n== the duality map is an involution with a real fixed point ==")
x = kw_couple(1.2, 0.4)
print(f"  kw(kw({x})) = {kw(kw(x))}")
xs = 0.5 * math.log(1 + math.sqrt(2))
print(f"  fixed point: kw({xs:.6f}) = {kw(xs):.6f}")

print("\n== self-dual line: J_d = J and phi_d = -phi ==")
for alpha in np.linspace(0, math.pi / 2, 6):
    theta, phi = self_dual_point(alpha)
    p = ProtocolPoint.at(theta, phi, math.pi / 4)
    print(f"  alpha = {alpha / math.pi:.2f} pi: J = {p.J_eff:.4f}, "
          f"J_d = {p.J_d:.4f}, phi = {phi:.4f}, -phi_d = {-p.phi_d:.4f}")
