"""Momentum-space analysis of the post-selected (all +1) circuit.

Post-selecting every outcome turns one period of the brickwork into the
deterministic non-unitary Floquet operator

    U_F = exp((J + i phi)/2 sum_j Z_j Z_{j+1}) exp((J_d + i phi_d)/2 sum_j X_j),

a free-Majorana model that diagonalizes per momentum k into the symmetric
2x2 product e^{-w_d s_z / 2} e^{w s_k} e^{-w_d s_z / 2} with w = J + i phi,
w_d = J_d + i phi_d and s_k = s_z cos k - s_y sin k.  Quasi-energies are
eps_k = i log(eigenvalues) on the principal branch; momenta with real
quasi-energy are the steady modes that carry entanglement.

The small-coupling (Baker-Hausdorff) limit is governed by the complex
field g = h + i*lambda = w_d / w; its dispersion eps(k)^2 = 1 + g^2 - 2 g
cos k crosses the real axis at cos-parameter c = h exactly, which yields
the closed-form phase classification used here.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .duality import kw_explicit
from .protocol import ProtocolPoint

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.diag([1.0 + 0.0j, -1.0 + 0.0j])


@dataclass(frozen=True)
class FloquetPoint:
    """Post-selected couplings (J, phi) and their duals (J_d, phi_d)."""
    J: float
    phi: float
    J_d: float
    phi_d: float

    @classmethod
    def from_couplings(cls, J: float, phi: float) -> "FloquetPoint":
        return cls(J, phi, *kw_explicit(J, phi))

    @classmethod
    def from_protocol(cls, point: ProtocolPoint) -> "FloquetPoint":
        if not point.projective:
            raise ValueError("post-selected Floquet analysis needs t = pi/4")
        return cls(point.J_eff, point.folded_phi, point.J_d, point.phi_d)

    @property
    def heff_field(self) -> complex:
        """g = h + i lambda = (J_d + i phi_d) / (J + i phi)."""
        w = complex(self.J, self.phi)
        if w == 0:
            raise ZeroDivisionError("heff field undefined at J = phi = 0")
        return complex(self.J_d, self.phi_d) / w


def floquet_matrix(k: float, point: FloquetPoint) -> np.ndarray:
    """Symmetric-form momentum block of the Floquet operator (det = 1)."""
    w = complex(point.J, point.phi)
    w_d = complex(point.J_d, point.phi_d)
    # e^{-w_d s_z / 2} is diagonal; e^{w s_k} = cosh(w) + sinh(w) s_k
    edge = np.diag([cmath.exp(-0.5 * w_d), cmath.exp(0.5 * w_d)])
    s_k = SIGMA_Z * math.cos(k) - SIGMA_Y * math.sin(k)
    middle = np.cosh(w) * np.eye(2) + np.sinh(w) * s_k
    return edge @ middle @ edge


@dataclass
class SpectrumTable:
    """Quasi-energies of the Floquet operator over a momentum grid."""
    point: FloquetPoint
    momenta: np.ndarray = field(repr=False)       # k_j = 2 pi j / L_k
    eps_re: np.ndarray = field(repr=False)        # shape (L_k, 2), branch-paired
    eps_im: np.ndarray = field(repr=False)
    defective: np.ndarray = field(repr=False)     # flag per k (exceptional points)
    gauge_shift: float = 0.0                      # Im offset fixed to zero trace

    @property
    def L_k(self) -> int:
        return len(self.momenta)


def quasi_energies(point: FloquetPoint, L_k: int) -> SpectrumTable:
    """eps_k = i log eig(U_F(k)) with Re eps in (-pi, pi], branch-paired in k.

    Eigenvalue branches are followed by eigenvector overlap between adjacent
    momenta to avoid spurious jumps near exceptional points; defective
    blocks are flagged and their (coalesced) eigenvalues still reported.
    """
    if L_k < 2:
        raise ValueError(f"need at least 2 momenta, got {L_k}")
    momenta = 2.0 * math.pi * np.arange(L_k) / L_k
    eps = np.empty((L_k, 2), dtype=complex)
    defective = np.zeros(L_k, dtype=bool)
    prev_vecs = None
    for i, k in enumerate(momenta):
        u = floquet_matrix(k, point)
        vals, vecs = np.linalg.eig(u)
        if prev_vecs is not None:
            overlap = np.abs(prev_vecs.conj().T @ vecs)
            if overlap[0, 0] + overlap[1, 1] < overlap[0, 1] + overlap[1, 0]:
                vals = vals[::-1]
                vecs = vecs[:, ::-1]
        cond = np.abs(np.linalg.det(vecs))
        if cond < 1e-6 or abs(vals[0] - vals[1]) < 1e-9 * max(1.0, abs(vals[0])):
            defective[i] = True
        prev_vecs = vecs
        eps[i] = 1j * np.log(vals)
    return SpectrumTable(point=point, momenta=momenta,
                         eps_re=eps.real, eps_im=eps.imag, defective=defective)


def steady_state_density(table: SpectrumTable, tol: float = 1e-8) -> float:
    """Fraction of quasi-energy branches with |Im eps| < tol (Y point = 1).

    The paper-style 1/pi delta-sum normalization equals twice this fraction
    (sum over k on [0, 2 pi) with measure L_k / 2 pi).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    return float(np.mean(np.abs(table.eps_im) < tol))


def steady_momentum_count(table: SpectrumTable, tol: float = 1e-8) -> int:
    """Number of momenta carrying at least one real quasi-energy."""
    return int(np.sum(np.any(np.abs(table.eps_im) < tol, axis=1)))


def heff_dispersion(g: complex, k: np.ndarray) -> np.ndarray:
    """eps(k) = sqrt(1 + g^2 - 2 g cos k) of the small-coupling Majorana chain."""
    return np.sqrt(1.0 + g * g - 2.0 * g * np.cos(k) + 0j)


def heff_classify(h: float, lam: float, tol: float = 1e-9) -> str:
    """Phase of the small-coupling chain at field g = h + i lambda.

    The dispersion crosses the real axis at cos-parameter c = h: |h| <= 1
    keeps a crossing (sign of the crossing value splits inside_circle from
    outside_circle by |g| vs 1), |h| > 1 removes it (absolutely gapped);
    |g| = 1 puts the band through zero (exceptional points).  Invariant
    under lambda -> -lambda and g -> -g.
    """
    g = complex(h, lam)
    r = abs(g)
    if abs(r - 1.0) <= tol:
        return "exceptional"
    if r < 1.0:
        return "inside_circle"
    if abs(h) > 1.0 + tol:
        return "absolutely_gapped"
    return "outside_circle"


def heff_gaps(h: float, lam: float, n_k: int = 2001) -> tuple[float, float]:
    """(min |Re eps|, min |Im eps|) of the small-coupling dispersion."""
    k = np.linspace(0.0, 2.0 * math.pi, n_k, endpoint=False)
    eps = heff_dispersion(complex(h, lam), k)
    return float(np.min(np.abs(eps.real))), float(np.min(np.abs(eps.imag)))


def self_dual_scan(alphas, L_k: int = 2000, tol: float = 1e-8):
    """rho_0 along the self-dual line parametrized by alpha in [0, pi/2]."""
    from .duality import self_dual_point
    from .protocol import ising_coupling

    out = []
    for alpha in alphas:
        theta, phi = self_dual_point(alpha)
        J = ising_coupling(theta)
        pt = FloquetPoint.from_couplings(J, phi)
        table = quasi_energies(pt, L_k)
        out.append((alpha, pt, steady_state_density(table, tol)))
    return out
