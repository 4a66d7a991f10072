"""Gaussian Majorana circuit engine for the projective-measurement limit.

Simulates the (1+1)D monitored chain produced by projectively measuring the
rotated code, as a brickwork of two-Majorana gates exp(kappa * i g_a g_b):
bond gates act on Majorana pairs (2j+1, 2j+2) (the ZZ coupling of qubits
j, j+1 under the Jordan-Wigner dictionary X_j <-> i g_{2j} g_{2j+1},
Z_j Z_{j+1} <-> i g_{2j+1} g_{2j+2}), site gates on (2j, 2j+1).

The state is the real antisymmetric covariance matrix
Gamma_ab = (i/2) <[g_a, g_b]>, pure iff Gamma Gamma^T = 1.  Re(kappa)
drives a weak measurement of i g_a g_b, Im(kappa) a planar rotation by
2 Im(kappa) in the (a, b) plane; the two parts commute.

Weight bookkeeping: ``log_weight`` accumulates log ||G psi||^2 of the raw
gates G = exp(kappa * i g_a g_b), which is exactly zero for unitary gates
(the whole Y-point circuit), while ``log_born_probability`` subtracts the
log(2 cosh J) gate normalizations and equals the log of the product of the
sampled branch probabilities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg.blas import dger

from .protocol import ProtocolPoint, is_projective

LOG2 = math.log(2.0)

_ANTISYM_EVERY = 64     # antisymmetrize cadence, in gates
_POLAR_EVERY = 1024     # Newton-Schulz re-orthogonalization cadence, in gates


class ImpossibleOutcomeError(ValueError):
    """A projective gate recorded an outcome of probability zero."""


class StateCorruptionError(RuntimeError):
    """The covariance matrix drifted out of the physical range."""


class ArcFitError(ValueError):
    """The arc-fit design matrix is rank deficient."""


class MajoranaState:
    """Pure Gaussian state of an L-site chain (2L Majorana modes)."""

    def __init__(self, gamma: np.ndarray, log_weight: float = 0.0):
        gamma = np.asfortranarray(gamma, dtype=np.float64)
        if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
            raise ValueError(f"covariance must be even square, got {gamma.shape}")
        self.gamma = gamma
        self.L = gamma.shape[0] // 2
        self.log_weight = float(log_weight)
        self._log_norm_sum = 0.0   # sum of log(2 cosh(2x)) over sampled gates
        self.n_outcomes = 0
        self._since_antisym = 0
        self._since_polar = 0

    @property
    def log_born_probability(self) -> float:
        """log of the product of sampled branch probabilities so far."""
        return self.log_weight - self._log_norm_sum

    def purity_defect(self) -> float:
        """max-norm of Gamma Gamma^T - 1; zero for a pure state."""
        g = self.gamma
        return float(np.max(np.abs(g @ g.T - np.eye(2 * self.L))))

    def copy(self) -> "MajoranaState":
        other = MajoranaState(self.gamma.copy(order="F"), self.log_weight)
        other._log_norm_sum = self._log_norm_sum
        other.n_outcomes = self.n_outcomes
        return other

    def reorthogonalize(self) -> None:
        """Antisymmetrize, then one Newton-Schulz step toward the polar factor."""
        g = 0.5 * (self.gamma - self.gamma.T)
        g = 0.5 * g @ (3.0 * np.eye(2 * self.L) - g.T @ g)
        self.gamma = np.asfortranarray(0.5 * (g - g.T))
        self._since_antisym = 0
        self._since_polar = 0

    def _maintenance(self) -> None:
        self._since_antisym += 1
        self._since_polar += 1
        if self._since_polar >= _POLAR_EVERY:
            self.reorthogonalize()
        elif self._since_antisym >= _ANTISYM_EVERY:
            g = self.gamma
            gt = g.T.copy()
            np.subtract(g, gt, out=g)
            g *= 0.5
            self._since_antisym = 0


@dataclass(frozen=True)
class GateSpec:
    """One brickwork gate exp(kappa * i g_a g_b) with its recorded outcome.

    kappa = (J s + i(phi - pi (1-s)/2)) / 2 for bond gates; site gates use
    the dual couplings (J_d, phi_d).  Projective gates carry
    Re(kappa) = +-inf and are applied as exact parity projectors.
    """
    kind: str            # "bond" | "site"
    position: int        # bond j couples qubits (j, j+1); site j is qubit j
    outcome: int         # +1 | -1
    kappa: complex

    def __post_init__(self):
        if self.kind not in ("bond", "site"):
            raise ValueError(f"kind must be 'bond' or 'site', got {self.kind!r}")
        if self.outcome not in (1, -1):
            raise ValueError(f"outcome must be +-1, got {self.outcome}")

    @classmethod
    def from_couplings(cls, kind: str, position: int, outcome: int,
                       J: float, phi: float) -> "GateSpec":
        s = outcome
        if is_projective(J):
            re = math.inf if s > 0 else -math.inf
        else:
            re = 0.5 * J * s
        im = 0.5 * (phi - math.pi * (1 - s) / 2)
        return cls(kind, position, outcome, complex(re, im))

    def majorana_pair(self, L: int, periodic: bool = False) -> tuple[int, int]:
        j = self.position
        if self.kind == "site":
            if not 0 <= j < L:
                raise ValueError(f"site {j} outside chain of length {L}")
            return 2 * j, 2 * j + 1
        n_bonds = L if periodic else L - 1
        if not 0 <= j < n_bonds:
            raise ValueError(f"bond {j} outside chain of length {L}")
        return 2 * j + 1, (2 * j + 2) % (2 * L)


def init_chain(L: int, boundary: str = "open") -> MajoranaState:
    """Product state with i g_{2j} g_{2j+1} = +1 on every site ("all X up")."""
    if L % 2 or L < 4:
        raise ValueError(f"chain length must be even and >= 4, got {L}")
    if boundary not in ("open", "periodic"):
        raise ValueError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    gamma = np.kron(np.eye(L), block)
    return MajoranaState(gamma)


def outcome_probability(state: MajoranaState, pair: tuple[int, int], J: float) -> float:
    """Probability of outcome +1 when measuring i g_a g_b at strength J.

    p(+) = (1 + tanh(J) Gamma_ab) / 2; the projective sentinel uses
    tanh(inf) = 1 so p(+) = (1 + Gamma_ab) / 2.
    """
    a, b = pair
    g = state.gamma[a, b]
    if abs(g) > 1.0 + 1e-8:
        raise StateCorruptionError(f"Gamma[{a},{b}] = {g} outside [-1, 1]")
    lam = 1.0 if is_projective(J) else math.tanh(J)
    p = 0.5 * (1.0 + lam * min(1.0, max(-1.0, g)))
    return min(1.0, max(0.0, p))


def _apply_pair(state: MajoranaState, a: int, b: int,
                re_kappa: float, im_kappa: float) -> None:
    """In-place update for exp((re + i im) * i g_a g_b) with weight bookkeeping."""
    g = state.gamma
    state.n_outcomes += 1

    if im_kappa != 0.0:
        # Gamma <- R Gamma R^T, R a rotation by 2*im in the (a, b) plane
        c, s = math.cos(2.0 * im_kappa), math.sin(2.0 * im_kappa)
        ra = c * g[a, :] - s * g[b, :]
        rb = s * g[a, :] + c * g[b, :]
        g[a, :], g[b, :] = ra, rb
        ca = c * g[:, a] - s * g[:, b]
        cb = s * g[:, a] + c * g[:, b]
        g[:, a], g[:, b] = ca, cb

    if re_kappa == 0.0:
        state._log_norm_sum += LOG2  # fair-coin outcome; unit gate norm
        return

    gab = g[a, b]
    if is_projective(re_kappa):
        lam = 1.0 if re_kappa > 0 else -1.0
        denom = 1.0 + lam * gab
        if denom <= 1e-12:
            raise ImpossibleOutcomeError(
                f"projective outcome on ({a},{b}) has probability {denom / 2:.2e}")
        state.log_weight += math.log(0.5 * denom)
        scale = 0.0
    else:
        lam = math.tanh(2.0 * re_kappa)
        denom = 1.0 + lam * gab
        if denom <= 1e-14:
            raise ImpossibleOutcomeError(f"outcome on ({a},{b}) has probability ~0")
        # raw gate norm cosh(2x) + sinh(2x) Gamma_ab = cosh(2x) (1 + lam Gamma_ab)
        state.log_weight += math.log1p(lam * gab) - 0.5 * math.log1p(-lam * lam)
        state._log_norm_sum += LOG2 - 0.5 * math.log1p(-lam * lam)
        scale = math.sqrt(1.0 - lam * lam) / denom

    u = g[:, a].copy()
    v = g[:, b].copy()
    coeff = lam / denom
    dger(coeff, v, u, a=g, overwrite_a=1)
    dger(-coeff, u, v, a=g, overwrite_a=1)
    g[a, :] = -scale * u
    g[:, a] = scale * u
    g[b, :] = -scale * v
    g[:, b] = scale * v
    g[a, b] = (gab + lam) / denom
    g[b, a] = -g[a, b]
    g[a, a] = g[b, b] = 0.0
    state._maintenance()


def apply_gate(state: MajoranaState, gate: GateSpec, periodic: bool = False) -> MajoranaState:
    """Apply one gate in place (returned for chaining)."""
    a, b = gate.majorana_pair(state.L, periodic)
    _apply_pair(state, a, b, gate.kappa.real, gate.kappa.imag)
    return state


def entanglement_entropy(state: MajoranaState, l: int, base: float = 2.0,
                         check_purity: bool = False) -> float:
    """Entanglement entropy of the first l sites (bits by default).

    S = sum_k h2((1 + nu_k)/2) over the singular-value pairs +-i nu_k of
    the 2l x 2l restriction of Gamma.
    """
    if not 1 <= l < state.L:
        raise ValueError(f"cut l={l} outside 1..{state.L - 1}")
    if check_purity and state.purity_defect() > 1e-6:
        import warnings
        warnings.warn("state is not pure; entropy is the Gaussian-spectrum value")
    sub = state.gamma[: 2 * l, : 2 * l]
    nu = np.linalg.svd(sub, compute_uv=False)
    nu = np.clip(nu, 0.0, 1.0)
    p = 0.5 * (1.0 + nu)
    q = 0.5 * (1.0 - nu)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log(p), 0.0) - np.where(q > 0, q * np.log(q), 0.0)
    return float(h.sum()) * 0.5 / math.log(base)


def entropy_profile(state: MajoranaState, cuts=None, base: float = 2.0) -> np.ndarray:
    """S(l) for each cut (default l = 1..L-1)."""
    if cuts is None:
        cuts = range(1, state.L)
    return np.array([entanglement_entropy(state, l, base) for l in cuts])


def arc_entropy(state: MajoranaState, start: int, length: int, base: float = 2.0) -> float:
    """Entropy of the contiguous arc of ``length`` sites beginning at ``start``.

    Wraps around the chain end, for periodic-boundary runs.  By purity,
    arc_entropy(s, l) = arc_entropy(s + l, L - l) for any pure state.
    """
    if not 1 <= length < state.L:
        raise ValueError(f"arc length {length} outside 1..{state.L - 1}")
    idx = np.arange(2 * start, 2 * (start + length)) % (2 * state.L)
    sub = state.gamma[np.ix_(idx, idx)]
    nu = np.clip(np.linalg.svd(sub, compute_uv=False), 0.0, 1.0)
    p = 0.5 * (1.0 + nu)
    q = 0.5 * (1.0 - nu)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log(p), 0.0) - np.where(q > 0, q * np.log(q), 0.0)
    return float(h.sum()) * 0.5 / math.log(base)


@dataclass
class TrajectoryRecord:
    """Born-sampled trajectory: outcome signs, entropy data, weights."""
    seed: int
    L: int
    depth: int
    theta: float
    phi: float
    boundary: str
    outcomes: list[np.ndarray] = field(repr=False)
    entropy_history: np.ndarray = field(repr=False)   # S(L/2) after each layer, bits
    entropy_profile: np.ndarray = field(repr=False)   # S(l), l = 1..L-1, bits
    log_weight: float = 0.0
    log_born_probability: float = 0.0


def run_trajectory(point: ProtocolPoint, L: int, depth: int | None = None,
                   seed: int = 0, boundary: str = "open",
                   track_history: bool = True,
                   profile_cuts=None) -> TrajectoryRecord:
    """Sample one Born trajectory of the projective-limit brickwork circuit.

    Each layer applies bond gates on all bonds, then site gates on all
    sites, sampling every outcome from the current state.  Deterministic
    in (seed, point, L, depth, boundary).
    """
    if not point.projective:
        raise ValueError("fermion engine requires a projective point (t = pi/4)")
    if depth is None:
        depth = L
    periodic = boundary == "periodic"
    state = init_chain(L, boundary)
    rng = np.random.default_rng(seed)

    J_b, phi_b = point.J_eff, point.folded_phi
    J_s, phi_s = point.J_d, point.phi_d
    n_bonds = L if periodic else L - 1

    outcomes = []
    history = np.empty(depth) if track_history else np.empty(0)
    half = L // 2
    for layer in range(depth):
        signs = np.empty(n_bonds + L, dtype=np.int8)
        k = 0
        for j in range(n_bonds):
            a, b = 2 * j + 1, (2 * j + 2) % (2 * L)
            p_plus = outcome_probability(state, (a, b), J_b)
            s = 1 if rng.random() < p_plus else -1
            x = (0.5 * J_b * s) if not is_projective(J_b) else (math.inf if s > 0 else -math.inf)
            _apply_pair(state, a, b, x, 0.5 * (phi_b - math.pi * (1 - s) / 2))
            signs[k] = s
            k += 1
        for j in range(L):
            a, b = 2 * j, 2 * j + 1
            p_plus = outcome_probability(state, (a, b), J_s)
            s = 1 if rng.random() < p_plus else -1
            x = (0.5 * J_s * s) if not is_projective(J_s) else (math.inf if s > 0 else -math.inf)
            _apply_pair(state, a, b, x, 0.5 * (phi_s - math.pi * (1 - s) / 2))
            signs[k] = s
            k += 1
        outcomes.append(signs)
        if track_history:
            history[layer] = entanglement_entropy(state, half)

    profile = entropy_profile(state, profile_cuts)
    return TrajectoryRecord(
        seed=seed, L=L, depth=depth, theta=point.basis.theta, phi=point.basis.phi,
        boundary=boundary, outcomes=outcomes, entropy_history=history,
        entropy_profile=profile, log_weight=state.log_weight,
        log_born_probability=state.log_born_probability)


@dataclass(frozen=True)
class ArcFit:
    """Least-squares decomposition of an entanglement arc S(l)."""
    v: float         # volume-law coefficient (triangle basis min(l, L-l))
    c_prime: float   # (log R)^2 / 6 coefficient
    c: float         # log R / 6 coefficient
    a: float         # constant offset
    residual_rms: float
    window: tuple[int, int]
    unit: str


def fit_arc(profile: np.ndarray, L: int, l_values=None,
            window: tuple[int, int] | None = None,
            vol_basis=None, unit: str = "nats") -> ArcFit:
    """Fit S(l) = v*vol(l,L) + c'/6 (log R)^2 + c/6 log R + a on the fit window.

    R = (L/pi) sin(pi l / L) is the chord length; vol defaults to the
    triangular Page-curve proxy min(l, L-l).  The profile is assumed to be
    in ``unit`` already; coefficients inherit that unit.

    The default window uses the whole profile: restricting to the central
    region leaves log R nearly constant, which makes the (log R)^2 / log R /
    const columns collinear and the coefficients noise-dominated (condition
    number ~5e4 at L=128 vs ~2e3 for the full arc).
    """
    profile = np.asarray(profile, dtype=float)
    if l_values is None:
        l_values = np.arange(1, len(profile) + 1)
    l_values = np.asarray(l_values)
    if len(l_values) != len(profile):
        raise ValueError("l_values and profile length mismatch")
    if len(profile) < 8:
        raise ArcFitError(f"profile too short for a 4-parameter fit: {len(profile)}")
    if window is None:
        window = (1, L - 1)
    lo, hi = window
    mask = (l_values >= lo) & (l_values <= hi)
    l_fit = l_values[mask]
    s_fit = profile[mask]
    if len(l_fit) < 8:
        raise ArcFitError(f"fit window [{lo},{hi}] holds only {len(l_fit)} points")

    if vol_basis is None:
        vol_basis = lambda l: np.minimum(l, L - l)
    log_r = np.log((L / math.pi) * np.sin(math.pi * l_fit / L))
    design = np.column_stack(
        [vol_basis(l_fit), log_r ** 2 / 6.0, log_r / 6.0, np.ones_like(log_r)])
    if np.linalg.matrix_rank(design) < 4:
        raise ArcFitError("rank-deficient design matrix (window or L too small)")
    coef, _, _, _ = np.linalg.lstsq(design, s_fit, rcond=None)
    resid = s_fit - design @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return ArcFit(v=float(coef[0]), c_prime=float(coef[1]), c=float(coef[2]),
                  a=float(coef[3]), residual_rms=rms, window=(lo, hi), unit=unit)
