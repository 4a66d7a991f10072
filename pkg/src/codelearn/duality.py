"""Complex Kramers-Wannier duality map for the circuit couplings.

Works in the half-coupling convention x = (J + i*phi)/2.  The map
kw(x) = -log(tanh x)/2 exchanges the bond and site couplings of the
projective-limit circuit; its fixed loci are the self-dual points of the
measurement phase diagram.  All logarithms are principal-branch; the
sign rule kw(-x) = kw(x) - i*pi/2 therefore holds as a congruence
modulo i*pi, not as a global equality.
"""
from __future__ import annotations

import cmath
import math

SELF_DUAL_X = 0.5 * math.log(1.0 + math.sqrt(2.0))  # real fixed point of kw

_HALF_PI = math.pi / 2


def kw(x: complex) -> complex:
    """Half-coupling duality map -log(tanh x)/2 on the principal branch.

    Involutive where both evaluations stay principal: kw(kw(x)) = x.
    Raises ZeroDivisionError at the pole x = 0.
    """
    x = complex(x)
    if x == 0:
        raise ZeroDivisionError("kw has a pole at x = 0")
    t = cmath.tanh(x)
    if t == 0:
        raise ZeroDivisionError(f"tanh(x) = 0 at x = {x}; kw undefined")
    return -0.5 * cmath.log(t)


def kw_couple(J: float, phi: float) -> complex:
    """Pack full couplings (J, phi) into the half-coupling x = (J + i*phi)/2."""
    return complex(0.5 * J, 0.5 * phi)


def kw_explicit(J: float, phi: float) -> tuple[float, float]:
    """Dual couplings (J_d, phi_d) of (J, phi), via the closed forms.

        J_d   = -log( sqrt(1 + e^{4J} - 2 e^{2J} cos 2phi) / (1 + e^{2J} + 2 e^{J} cos phi) )
        phi_d = -atan2( 2 e^{J} sin phi, e^{2J} - 1 )

    The atan2 form pins the branch so that doubling kw((J+i*phi)/2) is
    reproduced exactly; the principal-atan variant agrees modulo pi.
    Pole at (J, phi) = (0, 0).
    """
    if J < 0.0:
        raise ValueError(f"J={J} must be nonnegative")
    if J == 0.0 and math.fmod(phi, 2 * math.pi) == 0.0:
        raise ZeroDivisionError("kw_explicit has a pole at J = 0, phi = 0")
    eJ = math.exp(J)
    e2J = eJ * eJ
    num = math.sqrt(max(1.0 + e2J * e2J - 2.0 * e2J * math.cos(2.0 * phi), 0.0))
    den = 1.0 + e2J + 2.0 * eJ * math.cos(phi)
    J_d = -math.log(num / den)
    phi_d = -math.atan2(2.0 * eJ * math.sin(phi), e2J - 1.0)
    return J_d, phi_d


def self_dual_residual(theta: float, phi: float) -> float:
    """Signed residual cos(phi) - cot(theta) of the self-dual-line condition.

    The extended self-dual line of the projective phase diagram satisfies
    cos(phi) = cot(theta) (equivalently sinh J = cot theta with
    J = atanh cos theta); the residual vanishes continuously from the
    X+Z point (pi/4, 0) to the Y point (pi/2, pi/2).
    """
    if theta <= 0.0 or theta > math.pi:
        return math.inf
    return math.cos(phi) - math.cos(theta) / math.sin(theta)


def is_self_dual(theta: float, phi: float, tol: float = 1e-9) -> tuple[bool, float]:
    """Whether (theta, phi) sits on the self-dual line, plus the scan residual."""
    r = self_dual_residual(theta, phi)
    return abs(r) < tol, r


def self_dual_point(alpha: float) -> tuple[float, float]:
    """Parametrize the self-dual line by alpha in [0, pi/2].

    alpha = 0 is the X+Z point (theta=pi/4, phi=0); alpha = pi/2 is the
    Y point (theta=pi/2, phi=pi/2); in between phi = alpha and
    theta = acot(cos phi).
    """
    if not 0.0 <= alpha <= _HALF_PI + 1e-15:
        raise ValueError(f"alpha={alpha} outside [0, pi/2]")
    phi = alpha
    theta = math.atan2(1.0, math.cos(phi))
    return theta, phi
