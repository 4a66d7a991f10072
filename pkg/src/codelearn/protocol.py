"""Measurement-protocol coordinates and coupling-constant conversions.

Every experiment in this package is parametrized by a measurement basis
(polar/azimuthal angles theta, phi on the Bloch sphere), a compactified
measurement strength t in [0, pi/4], and the effective couplings derived
from them.  The projective limit t = pi/4 maps to infinite strength; all
infinite couplings are represented by the explicit IEEE sentinel
``math.inf`` (exposed as ``PROJECTIVE``), never by large finite floats,
and every consumer implements a dedicated projective branch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

PROJECTIVE = math.inf

_QUARTER_PI = math.pi / 4
_HALF_PI = math.pi / 2
_TWO_PI = 2 * math.pi


def is_projective(x: float) -> bool:
    """True if a coupling/strength carries the projective (infinite) sentinel."""
    return math.isinf(x)


def strength_from_time(t: float) -> float:
    """Effective measurement strength beta = atanh(sin 2t) for t in [0, pi/4].

    Returns the PROJECTIVE sentinel at t = pi/4.  Evaluated around the
    endpoint u = pi/4 - t so the round trip with time_from_strength holds
    to 1e-12 over the whole open interval.
    """
    if not 0.0 <= t <= _QUARTER_PI + 1e-15:
        raise ValueError(f"t={t} outside [0, pi/4]")
    if t == 0.0:
        return 0.0
    u = _QUARTER_PI - t
    if u <= 0.0:
        return PROJECTIVE
    # atanh(sin 2t) = [log(1 + cos 2u) - log(2 sin^2 u)] / 2
    return 0.5 * (math.log1p(math.cos(2.0 * u)) - math.log(2.0 * math.sin(u) ** 2))


def time_from_strength(beta: float) -> float:
    """Inverse of strength_from_time: t = asin(tanh beta) / 2."""
    if beta < 0.0:
        raise ValueError(f"beta={beta} must be nonnegative")
    if is_projective(beta):
        return _QUARTER_PI
    # sin(pi/4 - t) = exp(-beta) sqrt((1 + tanh beta)/2), well conditioned
    s = math.exp(-beta) * math.sqrt(0.5 * (1.0 + math.tanh(beta)))
    return _QUARTER_PI - math.asin(min(1.0, s))


def ising_coupling(theta: float) -> float:
    """Effective Ising coupling J = atanh(cos theta) of a projective measurement.

    Monotone decreasing on [0, pi/2]; J = PROJECTIVE at theta = 0 (pure Z)
    and J = 0 at theta = pi/2 (XY plane).
    """
    if not 0.0 <= theta <= _HALF_PI + 1e-15:
        raise ValueError(f"theta={theta} outside [0, pi/2]; fold quadrants first")
    c = math.cos(theta)
    if c >= 1.0:
        return PROJECTIVE
    if c <= 4e-16:  # cos(pi/2) rounds to 6e-17; clamp below angle resolution
        return 0.0
    return math.atanh(c)


def at_couplings(t: float, theta: float) -> tuple[float, float]:
    """Couplings (J, K) of the two-layer statistical model at strength t, angle theta.

    Defined by tanh(J) = sin(2t) cos(theta) and exp(-2K) = sinh(J) tan(theta).
    The doubly projective corner t = pi/4, theta = 0 is degenerate and returns
    (PROJECTIVE, PROJECTIVE).
    """
    if not 0.0 <= t <= _QUARTER_PI + 1e-15:
        raise ValueError(f"t={t} outside [0, pi/4]")
    if not 0.0 <= theta <= _HALF_PI + 1e-15:
        raise ValueError(f"theta={theta} outside [0, pi/2]")
    tj = math.sin(2.0 * t) * math.cos(theta)
    if tj >= 1.0:
        # only reachable at t = pi/4, theta = 0
        return PROJECTIVE, PROJECTIVE
    J = math.atanh(tj) if tj > 0.0 else 0.0
    e2k = math.sinh(J) * math.tan(theta)
    if e2k <= 0.0:
        K = PROJECTIVE
    else:
        K = -0.5 * math.log(e2k)
    return J, K


@dataclass(frozen=True)
class FoldRecord:
    """Which Bloch-sphere symmetries were applied to reach the first octant.

    antipodal  -- (theta, phi) -> (pi - theta, phi + pi); flips all outcomes.
    conjugated -- phi -> -phi (complex conjugation); flips the Y axis.
    reflected  -- phi -> pi - phi (X -> -X); flips X-axis outcomes.
    """
    antipodal: bool = False
    conjugated: bool = False
    reflected: bool = False


def fold_first_octant(theta: float, phi: float) -> tuple[float, float, FoldRecord]:
    """Fold arbitrary basis angles into theta in [0, pi/2], phi in [0, pi/2].

    The coupling formulas below assume the first octant; the returned record
    lets callers unfold outcome signs and axis labels afterwards.
    """
    phi = math.fmod(phi, _TWO_PI)
    if phi < 0.0:
        phi += _TWO_PI
    antipodal = conjugated = reflected = False
    if theta > _HALF_PI:
        theta = math.pi - theta
        phi = math.fmod(phi + math.pi, _TWO_PI)
        antipodal = True
    if phi > math.pi:
        phi = _TWO_PI - phi
        conjugated = True
    if phi > _HALF_PI:
        phi = math.pi - phi
        reflected = True
    return theta, phi, FoldRecord(antipodal, conjugated, reflected)


@dataclass(frozen=True)
class MeasurementBasis:
    """Uniform single-qubit measurement axis sin(theta)cos(phi) X + sin(theta)sin(phi) Y + cos(theta) Z."""
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        phi = math.fmod(self.phi, _TWO_PI)
        if phi < 0.0:
            phi += _TWO_PI
        object.__setattr__(self, "phi", phi)

    def unit_vector(self) -> tuple[float, float, float]:
        st = math.sin(self.theta)
        return (st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta))


@dataclass(frozen=True)
class MeasurementStrength:
    """Compactified strength t in [0, pi/4] with derived beta = atanh(sin 2t)."""
    t: float
    beta: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "beta", strength_from_time(self.t))

    @property
    def projective(self) -> bool:
        return is_projective(self.beta)

    @classmethod
    def from_beta(cls, beta: float) -> "MeasurementStrength":
        return cls(time_from_strength(beta))


@dataclass(frozen=True)
class ProtocolPoint:
    """One point (theta, phi, t) of the protocol with its cached couplings.

    J, K are the couplings of the two-layer model at strength t; J_eff and
    phi_d are the projective-limit circuit couplings (J_eff = atanh cos theta
    with dual (J_d, phi_d) from the duality module).  Angles are folded into
    the first octant before coupling evaluation; ``fold`` records how.
    """
    basis: MeasurementBasis
    strength: MeasurementStrength
    J: float = field(init=False)
    K: float = field(init=False)
    J_eff: float = field(init=False)
    J_d: float = field(init=False)
    phi_d: float = field(init=False)
    fold: FoldRecord = field(init=False)

    def __post_init__(self):
        from . import duality

        th, ph, rec = fold_first_octant(self.basis.theta, self.basis.phi)
        J, K = at_couplings(self.strength.t, th)
        J_eff = ising_coupling(th)
        if is_projective(J_eff):
            J_d, phi_d = 0.0, 0.0  # dual of the pure-Z projective weight
        elif J_eff == 0.0 and ph == 0.0:
            J_d, phi_d = PROJECTIVE, 0.0  # X point: dual site weight is projective
        else:
            J_d, phi_d = duality.kw_explicit(J_eff, ph)
        for name, val in (("J", J), ("K", K), ("J_eff", J_eff),
                          ("J_d", J_d), ("phi_d", phi_d), ("fold", rec)):
            object.__setattr__(self, name, val)

    @property
    def folded_theta(self) -> float:
        return fold_first_octant(self.basis.theta, self.basis.phi)[0]

    @property
    def folded_phi(self) -> float:
        return fold_first_octant(self.basis.theta, self.basis.phi)[1]

    @property
    def projective(self) -> bool:
        return self.strength.projective

    @classmethod
    def at(cls, theta: float, phi: float, t: float) -> "ProtocolPoint":
        return cls(MeasurementBasis(theta, phi), MeasurementStrength(t))
