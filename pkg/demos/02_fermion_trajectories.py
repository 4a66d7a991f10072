# Born-sample the projective-limit circuit at a few bases and watch the
# boundary entanglement build up: ballistic at Y, logarithmic at X+Z,
# area-law deep on the XY line.
import math

import numpy as np

from codelearn.majorana import fit_arc, run_trajectory
from codelearn.protocol import ProtocolPoint

L, DEPTH, N_TRAJ = 48, 48, 12
LN2 = math.log(2)

points = [
    ("Y point      ", math.pi / 2, math.pi / 2),
    ("X+Z point    ", math.pi / 4, 0.0),
    ("XY, phi=0.4pi", math.pi / 2, 0.4 * math.pi),
    ("XY, phi=.05pi", math.pi / 2, 0.05 * math.pi),
]

for name, theta, phi in points:
    point = ProtocolPoint.at(theta, phi, math.pi / 4)
    profiles = []
    for k in range(N_TRAJ):
        rec = run_trajectory(point, L, DEPTH, seed=1000 + k, track_history=False)
        profiles.append(rec.entropy_profile)
    mean = np.vstack(profiles).mean(axis=0)
    fit = fit_arc(mean * LN2, L, unit="nats")
    print(f"{name}: S(L/2) = {mean[L // 2 - 1]:6.3f} bits | "
          f"v = {fit.v:+.3f}  c' = {fit.c_prime:+.3f}  c = {fit.c:+.3f}")

print("\nY-point ballistic growth, single trajectory (S(L/2) per layer):")
rec = run_trajectory(ProtocolPoint.at(math.pi / 2, math.pi / 2, math.pi / 4),
                     L=32, depth=10, seed=5)
print("  ", np.round(rec.entropy_history, 6))
print("   log_weight accumulated:", rec.log_weight, "(unitary circuit)")
