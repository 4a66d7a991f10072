"""Exact dense simulator of the measured surface code with a reference qubit.

Implements the 3-step protocol on small planar codes: prepare a logical
state (optionally maximally entangled with a reference qubit), rotate every
data qubit by exp(i theta Y/2) exp(i phi Z/2), then weak-measure every data
qubit in the computational basis at strength beta = atanh(sin 2t).

Qubit convention: data qubits first (row-major over the layout), the
reference qubit last; qubit 0 owns the most significant bit of the flat
amplitude index, so the reference is the fastest axis and
psi.reshape(-1, 2) separates it.

The logical basis for the conditional-state bookkeeping is the logical-X
eigenbasis mu = +-; the exported ensemble uses the signed Bloch vector of
the reference state (convention string "ref=(X_L, Y_L*, Z_L)"), since the
kappa tuple of the polarization record keeps only |Re| and |Im| of the
off-diagonal element.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import CapacityError, CodeLayout, make_layout
from .protocol import ProtocolPoint, is_projective

LOG2 = math.log(2.0)
BLOCH_CONVENTION = "ref=(X_L,Y_L*,Z_L); mu=+- logical-X eigenstates"

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


class CodeState:
    """Dense state over n_data (+1 reference) qubits."""

    def __init__(self, psi: np.ndarray, layout: CodeLayout, has_reference: bool):
        self.psi = np.ascontiguousarray(psi, dtype=complex)
        self.layout = layout
        self.has_reference = has_reference
        n = layout.n_data + (1 if has_reference else 0)
        if self.psi.size != 1 << n:
            raise ValueError(f"state length {self.psi.size} != 2^{n}")
        self.n_qubits = n

    def copy(self) -> "CodeState":
        return CodeState(self.psi.copy(), self.layout, self.has_reference)

    def norm(self) -> float:
        return float(np.linalg.norm(self.psi))

    def normalize(self) -> None:
        self.psi /= np.linalg.norm(self.psi)

    # -- Pauli actions; qubit q owns bit (n_qubits - 1 - q) of the flat index
    def _axes(self, q: int):
        return 1 << q, 1 << (self.n_qubits - q - 1)

    def apply_x_product(self, qubits) -> None:
        mask = 0
        for q in qubits:
            mask |= 1 << (self.n_qubits - 1 - q)
        idx = np.arange(self.psi.size) ^ mask
        self.psi = self.psi[idx]

    def z_signs(self, qubits) -> np.ndarray:
        mask = 0
        for q in qubits:
            mask |= 1 << (self.n_qubits - 1 - q)
        bits = np.bitwise_and(np.arange(self.psi.size), mask)
        pop = np.zeros(self.psi.size, dtype=np.int64)
        while mask:
            low = mask & -mask
            pop += (np.bitwise_and(np.arange(self.psi.size), low) != 0)
            mask ^= low
        return 1.0 - 2.0 * (pop % 2)

    def apply_z_product(self, qubits) -> None:
        self.psi = self.psi * self.z_signs(qubits)

    def apply_single(self, q: int, m: np.ndarray) -> None:
        front, back = self._axes(q)
        psi = self.psi.reshape(front, 2, back)
        self.psi = np.einsum("ab,ibj->iaj", m, psi).reshape(-1)

    def expectation_pauli_z(self, qubits) -> float:
        return float(np.real(np.vdot(self.psi, self.psi * self.z_signs(qubits))))

    def expectation_pauli_x(self, qubits) -> float:
        other = self.copy()
        other.apply_x_product(qubits)
        return float(np.real(np.vdot(self.psi, other.psi)))

    def reference_density(self) -> np.ndarray:
        """2x2 reduced density matrix of the reference qubit (Z-logical basis)."""
        if not self.has_reference:
            raise ValueError("state has no reference qubit")
        m = self.psi.reshape(-1, 2)
        rho = m.T @ m.conj()
        return rho / np.trace(rho).real


def _project_stabilizers(state: CodeState, stabs, pauli: str) -> None:
    for support in stabs:
        if pauli == "X":
            other = state.copy()
            other.apply_x_product(support)
            state.psi = 0.5 * (state.psi + other.psi)
        else:
            state.psi = 0.5 * (state.psi + state.psi * state.z_signs(support))
    state.normalize()


def prepare_code(layout: CodeLayout, logical_init: str = "entangled_with_reference") -> CodeState:
    """Stabilizer-project a seed product state into the requested logical state.

    logical_init: plus | minus | zero | one | entangled_with_reference.
    """
    n = layout.n_data
    if logical_init in ("zero", "one"):
        psi = np.zeros(1 << n, dtype=complex)
        psi[0] = 1.0
        state = CodeState(psi, layout, has_reference=False)
        _project_stabilizers(state, layout.x_stars, "X")
        if logical_init == "one":
            state.apply_x_product(layout.logical_x)
        return state
    if logical_init in ("plus", "minus"):
        psi = np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=complex)
        state = CodeState(psi, layout, has_reference=False)
        _project_stabilizers(state, layout.z_plaquettes, "Z")
        if logical_init == "minus":
            state.apply_z_product(layout.logical_z)
        return state
    if logical_init == "entangled_with_reference":
        zero = prepare_code(layout, "zero").psi
        one = prepare_code(layout, "one").psi
        psi = np.empty(1 << (n + 1), dtype=complex)
        psi[0::2] = zero / math.sqrt(2.0)
        psi[1::2] = one / math.sqrt(2.0)
        return CodeState(psi, layout, has_reference=True)
    raise ValueError(f"unknown logical_init {logical_init!r}")


def single_qubit_rotation(theta: float, phi: float) -> np.ndarray:
    """U1 = exp(i theta Y / 2) exp(i phi Z / 2); U1^dag Z U1 is the (theta,phi) axis."""
    cy, sy = math.cos(theta / 2), math.sin(theta / 2)
    ry = np.array([[cy, sy], [-sy, cy]], dtype=complex)
    rz = np.diag([np.exp(0.5j * phi), np.exp(-0.5j * phi)])
    return ry @ rz


def rotate_all(state: CodeState, theta: float, phi: float) -> CodeState:
    """Apply the coherent rotation to every data qubit (reference untouched)."""
    out = state.copy()
    u1 = single_qubit_rotation(theta, phi)
    for q in range(state.layout.n_data):
        out.apply_single(q, u1)
    return out


def weak_measure_all(state: CodeState, beta: float,
                     mode: str = "born", seed: int | None = None,
                     order=None, forced=None):
    """Weak-measure every data qubit at strength beta, sequentially.

    Kraus pair per qubit: exp(+-beta Z/2) / sqrt(2 cosh beta); projective
    at the infinite-strength sentinel.  Returns (signs, post_state,
    log_weight) with log_weight the log Born probability of the record.

    mode "born" samples outcomes; "post_select_plus" fixes every outcome to
    +1; ``forced`` replays an explicit sign array.  ``order`` permutes the
    sampling order (the chain rule is order independent; default row-major).
    """
    if mode not in ("born", "post_select_plus"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    out = state.copy()
    n_data = state.layout.n_data
    order = range(n_data) if order is None else order
    projective = is_projective(beta)
    signs = np.zeros(n_data, dtype=np.int8)
    log_weight = 0.0
    if not projective:
        ep, em = math.exp(beta / 2), math.exp(-beta / 2)
        norm = math.sqrt(2.0 * math.cosh(beta))
        kraus_plus = np.diag([ep, em]) / norm
        kraus_minus = np.diag([em, ep]) / norm

    for q in order:
        front, back = out._axes(q)
        psi = out.psi.reshape(front, 2, back)
        w_up = float(np.sum(np.abs(psi[:, 0, :]) ** 2))   # Z = +1 component
        w_dn = float(np.sum(np.abs(psi[:, 1, :]) ** 2))
        if projective:
            p_plus = w_up / (w_up + w_dn)
        else:
            e2 = math.exp(beta)
            p_plus = (e2 * w_up + w_dn / e2) / (2.0 * math.cosh(beta) * (w_up + w_dn))
        if forced is not None:
            s = int(forced[q])
        elif mode == "post_select_plus":
            s = 1
        else:
            s = 1 if rng.random() < p_plus else -1
        p = p_plus if s == 1 else 1.0 - p_plus
        if p <= 1e-300:
            raise ValueError(f"outcome {s} on qubit {q} has probability 0")
        log_weight += math.log(p)
        if projective:
            keep = 0 if s == 1 else 1
            psi[:, 1 - keep, :] = 0.0
            out.psi = psi.reshape(-1)
        else:
            out.apply_single(q, kraus_plus if s == 1 else kraus_minus)
        out.normalize()
        signs[q] = s
    return signs, out, log_weight


@dataclass(frozen=True)
class LogicalRecord:
    """Per-trajectory logical-qubit data conditioned on the outcome record."""
    outcomes: np.ndarray = field(repr=False)
    P_pp: float
    P_mm: float
    P_pm: complex
    kappa: tuple          # (kappa_X, kappa_Y, kappa_Z), |.| on Y and Z entries
    C: float
    I_s: float            # bits
    bloch: tuple          # signed reference Bloch vector (X_L, Y_L*, Z_L)
    weight: float         # Born probability P(s)
    log_weight: float


def h2_bits(p: float) -> float:
    """Binary entropy in bits, with the 0 log 0 = 0 convention."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-(p * math.log2(p) + (1 - p) * math.log2(1 - p)))


def logical_density(state: CodeState, log_weight: float = 0.0,
                    outcomes: np.ndarray | None = None) -> LogicalRecord:
    """Polarization record of the reference qubit of a measured state.

    P_{mu nu} is reported in the logical-X basis with overall scale
    2 P(s) = 2 exp(log_weight); kappa, C and I_s follow from it, and the
    signed Bloch vector comes from the reference density matrix directly.
    """
    rho_z = state.reference_density()
    rho_x = _HADAMARD @ rho_z @ _HADAMARD
    total = math.exp(log_weight)
    p_matrix = 2.0 * total * rho_x.T
    p_pp, p_mm = float(p_matrix[0, 0].real), float(p_matrix[1, 1].real)
    p_pm = complex(p_matrix[0, 1])
    if p_pp < -1e-8 * total or p_mm < -1e-8 * total:
        raise FloatingPointError(f"PSD violation: diag = ({p_pp}, {p_mm})")
    sigma = p_pp + p_mm
    kappa = ((p_pp - p_mm) / sigma,
             2.0 * abs(p_pm.imag) / sigma,
             2.0 * abs(p_pm.real) / sigma)
    c = min(1.0, math.hypot(*kappa))
    i_s = h2_bits(0.5 * (1.0 + c))
    bloch = (float(2.0 * rho_z[0, 1].real),
             float(-2.0 * rho_z[0, 1].imag),
             float((rho_z[0, 0] - rho_z[1, 1]).real))
    return LogicalRecord(
        outcomes=outcomes if outcomes is not None else np.zeros(0, dtype=np.int8),
        P_pp=p_pp, P_mm=p_mm, P_pm=p_pm, kappa=kappa, C=c, I_s=i_s,
        bloch=bloch, weight=0.5 * sigma, log_weight=log_weight)


def sample_record(point: ProtocolPoint, layout: CodeLayout, seed=None,
                  mode: str = "born", rotated: CodeState | None = None) -> LogicalRecord:
    """One full protocol run on the reference-entangled code."""
    if rotated is None:
        rotated = rotated_entangled_state(point, layout)
    signs, post, logw = weak_measure_all(rotated, point.strength.beta, mode, seed)
    return logical_density(post, logw, outcomes=signs)


def rotated_entangled_state(point: ProtocolPoint, layout: CodeLayout) -> CodeState:
    return rotate_all(prepare_code(layout, "entangled_with_reference"),
                      point.basis.theta, point.basis.phi)


# ---------------------------------------------------------------------------
# exhaustive coherent information via the Walsh-Hadamard transform
# ---------------------------------------------------------------------------

def walsh_hadamard(v: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform (self-inverse up to 2^n)."""
    v = v.copy()
    n = v.size
    h = 1
    while h < n:
        v = v.reshape(-1, 2, h)
        a = v[:, 0, :].copy()
        b = v[:, 1, :].copy()
        v[:, 0, :] = a + b
        v[:, 1, :] = a - b
        v = v.reshape(-1)
        h *= 2
    return v


def _logical_x_pair(layout: CodeLayout, theta: float, phi: float):
    """Rotated logical-X basis states U|+bar>, U|-bar> over the data qubits."""
    plus = rotate_all(prepare_code(layout, "plus"), theta, phi).psi
    minus = rotate_all(prepare_code(layout, "minus"), theta, phi).psi
    return plus, minus


def exhaustive_records(point: ProtocolPoint, layout: CodeLayout):
    """(P_pp, P_mm, P_pm, P) over all 2^N outcome strings.

    Outcome string s maps to the flat index with bit (N-1-q) = (1-s_q)/2.
    Weak strength enters through the Walsh spectrum: the correlator
    sum_z prod_j [(1 + s_j z_j tanh(beta))/2] X(z) is diagonal in the
    Walsh basis with weight tanh(beta)^|T|.
    """
    n = layout.n_data
    if n > 13:
        raise CapacityError(f"exhaustive mode supports <= 13 data qubits, got {n}")
    plus, minus = _logical_x_pair(layout, point.basis.theta, point.basis.phi)
    fields = [np.abs(plus) ** 2, np.abs(minus) ** 2, np.conj(plus) * minus]
    beta = point.strength.beta
    if is_projective(beta):
        p_pp, p_mm, p_pm = fields
    else:
        tb = math.tanh(beta)
        popcount = np.zeros(1 << n, dtype=np.int64)
        for b in range(n):
            popcount += (np.arange(1 << n) >> b) & 1
        weights = tb ** popcount
        out = []
        for f in fields:
            if np.iscomplexobj(f):
                re = walsh_hadamard(walsh_hadamard(f.real) * weights) / (1 << n)
                im = walsh_hadamard(walsh_hadamard(f.imag) * weights) / (1 << n)
                out.append(re + 1j * im)
            else:
                out.append(walsh_hadamard(walsh_hadamard(f) * weights) / (1 << n))
        p_pp, p_mm, p_pm = out
    p_pp = np.maximum(p_pp.real, 0.0)
    p_mm = np.maximum(p_mm.real, 0.0)
    prob = 0.5 * (p_pp + p_mm)
    return p_pp, p_mm, p_pm, prob


def coherent_information(point: ProtocolPoint, layout: CodeLayout,
                         plan: str = "exhaustive", n_samples: int = 10_000,
                         seed: int | None = None) -> tuple[float, float]:
    """Born-averaged conditional reference entropy I_c, in bits.

    plan "exhaustive" sums all outcome strings (<= 13 data qubits);
    "monte_carlo" averages I_s over Born-sampled records and returns the
    standard error (exhaustive returns std_err = 0).
    """
    if plan == "exhaustive":
        p_pp, p_mm, p_pm, prob = exhaustive_records(point, layout)
        sigma = p_pp + p_mm
        with np.errstate(divide="ignore", invalid="ignore"):
            kx = (p_pp - p_mm) / sigma
            ky = 2.0 * np.abs(p_pm.imag) / sigma
            kz = 2.0 * np.abs(p_pm.real) / sigma
        c = np.minimum(1.0, np.sqrt(kx * kx + ky * ky + kz * kz))
        p_up = 0.5 * (1.0 + c)
        p_dn = 0.5 * (1.0 - c)
        with np.errstate(divide="ignore", invalid="ignore"):
            i_s = -(np.where(p_up > 0, p_up * np.log2(p_up), 0.0)
                    + np.where(p_dn > 0, p_dn * np.log2(p_dn), 0.0))
        return float(np.sum(prob * i_s)), 0.0
    if plan == "monte_carlo":
        rng = np.random.default_rng(seed)
        rotated = rotated_entangled_state(point, layout)
        vals = np.empty(n_samples)
        for k in range(n_samples):
            rec = sample_record(point, layout, seed=rng.integers(2 ** 63),
                                rotated=rotated)
            vals[k] = rec.I_s
        return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples))
    raise ValueError(f"unknown plan {plan!r}")


def projected_ensemble(point: ProtocolPoint, layout: CodeLayout,
                       n_samples: int, seed: int | None = None):
    """Signed Bloch vectors of the purified reference state at t = pi/4.

    Projectively measuring all data qubits collapses the reference to the
    pure state whose amplitudes are the two logical components of the
    sampled bit string; sampling the string is a categorical draw from the
    rotated state's probability vector.  Returns (vectors, weights).
    """
    if not point.projective:
        raise ValueError("projected ensemble requires the projective point t = pi/4")
    rng = np.random.default_rng(seed)
    state = rotated_entangled_state(point, layout)
    amps = state.psi.reshape(-1, 2)
    probs = np.sum(np.abs(amps) ** 2, axis=1)
    probs = probs / probs.sum()
    draws = rng.choice(len(probs), size=n_samples, p=probs)
    a0 = amps[draws, 0]
    a1 = amps[draws, 1]
    norm = np.abs(a0) ** 2 + np.abs(a1) ** 2
    cross = a0 * np.conj(a1)
    bloch = np.column_stack([2.0 * cross.real / norm,
                             -2.0 * cross.imag / norm,
                             (np.abs(a0) ** 2 - np.abs(a1) ** 2) / norm])
    weights = np.full(n_samples, 1.0 / n_samples)
    return bloch, weights


def dephasing_channel_reference(rho: np.ndarray, layout: CodeLayout,
                                theta: float, phi: float, t: float,
                                n_total: int) -> np.ndarray:
    """Apply U then the per-qubit dephasing cos^2(t) rho + sin^2(t) Z rho Z.

    Reference implementation of the outcome-averaged channel, used to check
    that summing unnormalized post-states over all outcome records
    reproduces the dephasing channel.
    """
    u1 = single_qubit_rotation(theta, phi)
    big = np.array([[1.0]], dtype=complex)
    for q in range(n_total):
        big = np.kron(big, u1 if q < layout.n_data else np.eye(2, dtype=complex))
    rho = big @ rho @ big.conj().T
    c2, s2 = math.cos(t) ** 2, math.sin(t) ** 2
    dim = rho.shape[0]
    for q in range(layout.n_data):
        signs = np.ones(dim)
        step = 1 << (n_total - 1 - q)
        idx = (np.arange(dim) // step) % 2
        signs[idx == 1] = -1.0
        rho = c2 * rho + s2 * (signs[:, None] * rho * signs[None, :])
    return rho
