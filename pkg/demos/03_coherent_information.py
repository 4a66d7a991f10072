# The learnability order parameter: Born-averaged conditional entropy of the
# reference qubit, exhaustively at d = 2 and 3.  The Z basis loses the logical
# bit at finite strength; the X+Y+Z basis holds it until the projective limit.
import math

import numpy as np

from codelearn.lattice import make_layout
from codelearn.protocol import ProtocolPoint
from codelearn.statevector import coherent_information

THETA_XYZ = math.atan(math.sqrt(2))

for d in (2, 3):
    layout = make_layout(d)
    print(f"== d = {d} ({layout.n_data} data qubits) ==")
    print("   t/pi    I_c(Z basis)   I_c(X+Y+Z basis)")
    for t in np.linspace(0.0, math.pi / 4, 6):
        icz, _ = coherent_information(ProtocolPoint.at(0.0, 0.0, t), layout)
        icx, _ = coherent_information(
            ProtocolPoint.at(THETA_XYZ, math.pi / 4, t), layout)
        print(f"   {t / math.pi:.3f}   {icz:12.6f}   {icx:12.6f}")
    print()

print("Monte-Carlo cross-check at d=2, Z basis, t = 0.1 pi:")
layout = make_layout(2)
point = ProtocolPoint.at(0.0, 0.0, 0.1 * math.pi)
exact, _ = coherent_information(point, layout)
mc, err = coherent_information(point, layout, "monte_carlo",
                               n_samples=4000, seed=11)
print(f"  exhaustive {exact:.5f} vs monte-carlo {mc:.5f} +- {err:.5f}")
