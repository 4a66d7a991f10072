import math

import numpy as np
import pytest

import chain_oracle as oracle
from codelearn import majorana
from codelearn.majorana import (
    ArcFitError,
    GateSpec,
    ImpossibleOutcomeError,
    MajoranaState,
    apply_gate,
    entanglement_entropy,
    entropy_profile,
    fit_arc,
    init_chain,
    outcome_probability,
    run_trajectory,
)
from codelearn.protocol import PROJECTIVE, ProtocolPoint

Y_POINT = ProtocolPoint.at(math.pi / 2, math.pi / 2, math.pi / 4)
Z_POINT = ProtocolPoint.at(0.0, 0.0, math.pi / 4)
XZ_POINT = ProtocolPoint.at(math.pi / 4, 0.0, math.pi / 4)
XYZ_POINT = ProtocolPoint.at(math.atan(math.sqrt(2)), math.pi / 4, math.pi / 4)


def random_evolved_pair(L, n_gates, seed):
    """Evolve engine state and oracle statevector through the same random gates."""
    rng = np.random.default_rng(seed)
    state = init_chain(L)
    psi = oracle.plus_state(L)
    for _ in range(n_gates):
        kind = "bond" if rng.random() < 0.5 else "site"
        j = int(rng.integers(0, L - 1 if kind == "bond" else L))
        J = float(rng.uniform(0.1, 1.5))
        phi = float(rng.uniform(-2.0, 2.0))
        s = 1 if rng.random() < 0.5 else -1
        gate = GateSpec.from_couplings(kind, j, s, J, phi)
        apply_gate(state, gate)
        kappa = complex(0.5 * J * s, 0.5 * (phi - math.pi * (1 - s) / 2))
        if kind == "bond":
            psi = oracle.apply_bond(psi, L, j, kappa)
        else:
            psi = oracle.apply_site(psi, L, j, kappa)
        psi = psi / np.linalg.norm(psi)
    return state, psi


class TestInitChain:
    def test_block_structure(self):
        state = init_chain(4)
        block = np.array([[0.0, 1.0], [-1.0, 0.0]])
        np.testing.assert_allclose(state.gamma, np.kron(np.eye(4), block))

    def test_zero_entropy_everywhere(self):
        state = init_chain(8)
        assert np.allclose(entropy_profile(state), 0.0, atol=1e-12)

    def test_purity(self):
        assert init_chain(16).purity_defect() < 1e-12

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            init_chain(5)

    def test_matches_oracle_covariance(self):
        state = init_chain(4)
        np.testing.assert_allclose(
            state.gamma, oracle.covariance(oracle.plus_state(4), 4), atol=1e-12)


class TestOutcomeProbability:
    def test_unbiased(self):
        state = init_chain(6)
        assert outcome_probability(state, (1, 2), 0.7) == 0.5

    def test_projective_eigenstate(self):
        state = init_chain(6)
        assert outcome_probability(state, (0, 1), PROJECTIVE) == 1.0

    def test_corruption_detected(self):
        state = init_chain(4)
        state.gamma[1, 2] = 1.5
        with pytest.raises(majorana.StateCorruptionError):
            outcome_probability(state, (1, 2), 1.0)

    def test_matches_oracle_on_random_state(self):
        state, psi = random_evolved_pair(6, 20, seed=42)
        for j in range(5):
            J = 0.8
            p_eng = outcome_probability(state, (2 * j + 1, 2 * j + 2), J)
            p_orc, _ = oracle.branch_probabilities(psi, 6, "bond", j, J, 0.3)
            assert p_eng == pytest.approx(p_orc, abs=1e-9)
        for j in range(6):
            J = 1.1
            p_eng = outcome_probability(state, (2 * j, 2 * j + 1), J)
            p_orc, _ = oracle.branch_probabilities(psi, 6, "site", j, J, -0.4)
            assert p_eng == pytest.approx(p_orc, abs=1e-9)


class TestApplyGate:
    def test_unitary_gate_zero_weight(self):
        state = init_chain(8)
        gate = GateSpec("bond", 2, 1, 1j * math.pi / 4)
        apply_gate(state, gate)
        assert state.log_weight == 0.0
        assert state.purity_defect() < 1e-12

    def test_projective_pins_parity(self):
        state, _ = random_evolved_pair(6, 15, seed=1)
        gate = GateSpec.from_couplings("bond", 1, -1, PROJECTIVE, 0.0)
        apply_gate(state, gate)
        assert state.gamma[3, 4] == pytest.approx(-1.0, abs=1e-12)

    def test_impossible_outcome(self):
        state = init_chain(6)
        # site parity is +1 exactly; recording -1 projectively is impossible
        gate = GateSpec.from_couplings("site", 0, -1, PROJECTIVE, 0.0)
        with pytest.raises(ImpossibleOutcomeError):
            apply_gate(state, gate)

    def test_covariance_matches_oracle(self):
        for seed in range(5):
            state, psi = random_evolved_pair(6, 25, seed=seed)
            np.testing.assert_allclose(
                state.gamma, oracle.covariance(psi, 6), atol=1e-9)

    def test_entropy_matches_oracle(self):
        state, psi = random_evolved_pair(6, 25, seed=7)
        for l in range(1, 6):
            assert entanglement_entropy(state, l) == pytest.approx(
                oracle.entropy(psi, 6, l), abs=1e-9)

    def test_rotation_preserves_far_entanglement_spectrum(self):
        # purely imaginary kappa on a pair inside the left block must leave
        # any cut to its right unchanged
        state, _ = random_evolved_pair(8, 30, seed=3)
        before = [entanglement_entropy(state, l) for l in (3, 4, 5)]
        apply_gate(state, GateSpec("bond", 0, 1, 0.9j))
        apply_gate(state, GateSpec("site", 1, -1, -1.2j))
        after = [entanglement_entropy(state, l) for l in (3, 4, 5)]
        np.testing.assert_allclose(before, after, atol=1e-10)

    def test_born_weight_bookkeeping(self):
        state = init_chain(6)
        rng = np.random.default_rng(9)
        log_p = 0.0
        for _ in range(40):
            kind = "bond" if rng.random() < 0.5 else "site"
            j = int(rng.integers(0, 5 if kind == "bond" else 6))
            J = float(rng.uniform(0.0, 2.0))
            pair = (2 * j + 1, 2 * j + 2) if kind == "bond" else (2 * j, 2 * j + 1)
            p_plus = outcome_probability(state, pair, J)
            s = 1 if rng.random() < p_plus else -1
            log_p += math.log(p_plus if s == 1 else 1.0 - p_plus)
            apply_gate(state, GateSpec.from_couplings(kind, j, s, J, 0.4))
        assert state.log_born_probability == pytest.approx(log_p, abs=1e-12)


class TestRunTrajectory:
    def test_y_point_ballistic(self):
        rec = run_trajectory(Y_POINT, L=16, depth=3, seed=5)
        assert rec.entropy_history[-1] == pytest.approx(3.0, abs=1e-9)
        assert rec.log_weight == pytest.approx(0.0, abs=1e-12)

    def test_y_point_linear_history(self):
        rec = run_trajectory(Y_POINT, L=16, depth=6, seed=11)
        np.testing.assert_allclose(rec.entropy_history, np.arange(1, 7), atol=1e-9)

    def test_z_point_no_growth(self):
        # projective ZZ measurements on the X-up boundary pin every bond after
        # the first layer; only the global-flip cat bit survives (exactly 1 bit,
        # constant in time -- no entanglement growth)
        rec = run_trajectory(Z_POINT, L=8, depth=4, seed=2)
        assert np.max(rec.entropy_profile) <= 1.0 + 1e-9
        np.testing.assert_allclose(rec.entropy_history,
                                   rec.entropy_history[0], atol=1e-9)

    def test_z_point_deterministic_after_first_layer(self):
        state = init_chain(8)
        rng = np.random.default_rng(4)
        for layer in range(3):
            for j in range(7):
                pair = (2 * j + 1, 2 * j + 2)
                p = outcome_probability(state, pair, PROJECTIVE)
                if layer > 0:
                    assert p < 1e-9 or p > 1 - 1e-9
                s = 1 if rng.random() < p else -1
                apply_gate(state, GateSpec.from_couplings("bond", j, s, PROJECTIVE, 0.0))
            for j in range(8):
                p = outcome_probability(state, (2 * j, 2 * j + 1), 0.0)
                s = 1 if rng.random() < p else -1
                apply_gate(state, GateSpec.from_couplings("site", j, s, 0.0, 0.0))

    def test_deterministic_in_seed(self):
        a = run_trajectory(XZ_POINT, L=8, depth=4, seed=123)
        b = run_trajectory(XZ_POINT, L=8, depth=4, seed=123)
        np.testing.assert_array_equal(
            np.concatenate(a.outcomes), np.concatenate(b.outcomes))
        np.testing.assert_allclose(a.entropy_profile, b.entropy_profile, atol=0)

    def test_requires_projective_point(self):
        with pytest.raises(ValueError):
            run_trajectory(ProtocolPoint.at(0.5, 0.2, 0.3), L=8)

    def test_reflection_symmetry_periodic(self):
        # S(l) = S(L-l) in the complement-arc sense: every length-l arc has the
        # entropy of its length-(L-l) complement (purity of the trajectory state)
        from codelearn.majorana import arc_entropy
        point = XYZ_POINT
        state = init_chain(12, "periodic")
        rng = np.random.default_rng(17)
        for _ in range(6):
            for j in range(12):
                a, b = 2 * j + 1, (2 * j + 2) % 24
                p = outcome_probability(state, (a, b), point.J_eff)
                s = 1 if rng.random() < p else -1
                apply_gate(state, GateSpec.from_couplings("bond", j, s, point.J_eff,
                                                          point.folded_phi),
                           periodic=True)
            for j in range(12):
                p = outcome_probability(state, (2 * j, 2 * j + 1), point.J_d)
                s = 1 if rng.random() < p else -1
                apply_gate(state, GateSpec.from_couplings("site", j, s, point.J_d,
                                                          point.phi_d))
        for l in range(1, 12):
            for start in (0, 3, 7):
                assert arc_entropy(state, start, l) == pytest.approx(
                    arc_entropy(state, (start + l) % 12, 12 - l), abs=1e-8)

    def test_born_probability_consistency(self):
        # replay the recorded outcomes, accumulating branch probabilities
        # independently of the engine's bookkeeping
        point = XYZ_POINT
        rec = run_trajectory(point, L=8, depth=3, seed=21)
        state = init_chain(8)
        log_p = 0.0
        for signs in rec.outcomes:
            k = 0
            for j in range(7):
                pair = (2 * j + 1, 2 * j + 2)
                p = outcome_probability(state, pair, point.J_eff)
                s = int(signs[k]); k += 1
                log_p += math.log(p if s == 1 else 1 - p)
                apply_gate(state, GateSpec.from_couplings(
                    "bond", j, s, point.J_eff, point.folded_phi))
            for j in range(8):
                p = outcome_probability(state, (2 * j, 2 * j + 1), point.J_d)
                s = int(signs[k]); k += 1
                log_p += math.log(p if s == 1 else 1 - p)
                apply_gate(state, GateSpec.from_couplings(
                    "site", j, s, point.J_d, point.phi_d))
        assert rec.log_born_probability == pytest.approx(log_p, abs=1e-12)


class TestTrajectoryDistribution:
    """Engine sampling agrees with exhaustive statevector enumeration."""

    @staticmethod
    def exact_distribution(point, L):
        """Born probabilities of all outcome strings of one layer, from the oracle."""
        J_b, phi_b = point.J_eff, point.folded_phi
        J_s, phi_s = point.J_d, point.phi_d
        gates = [("bond", j, J_b, phi_b) for j in range(L - 1)]
        gates += [("site", j, J_s, phi_s) for j in range(L)]
        dist = {}

        def walk(psi, idx, logp, bits):
            if idx == len(gates):
                dist[bits] = math.exp(logp)
                return
            kind, j, J, phi = gates[idx]
            p_plus, _ = oracle.branch_probabilities(psi, L, kind, j, J, phi)
            for s, p in ((1, p_plus), (-1, 1.0 - p_plus)):
                if p < 1e-14:
                    continue
                nxt, _ = oracle.apply_outcome(psi, L, kind, j, s, J, phi)
                walk(nxt, idx + 1, logp + math.log(p), bits + ((s + 1) >> 1 << idx))

        walk(oracle.plus_state(L), 0, 0.0, 0)
        return dist

    def test_total_probability_one(self):
        dist = self.exact_distribution(XYZ_POINT, 6)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-10)

    def test_sampled_matches_exact(self):
        # L=4, one layer: 7 outcome bits, 128 strings; 2e5 samples put the
        # sampling-noise TV floor near 0.010, well under the 0.02 budget
        L, n_samples = 4, 200_000
        dist = self.exact_distribution(XYZ_POINT, L)
        counts = {}
        for seed in range(n_samples):
            rec = run_trajectory(XYZ_POINT, L=L, depth=1, seed=seed,
                                 track_history=False, profile_cuts=[1])
            signs = np.concatenate(rec.outcomes)
            bits = sum(((int(s) + 1) >> 1) << i for i, s in enumerate(signs))
            counts[bits] = counts.get(bits, 0) + 1
        tv = 0.5 * sum(abs(counts.get(b, 0) / n_samples - p)
                       for b, p in dist.items())
        tv += 0.5 * sum(c / n_samples for b, c in counts.items() if b not in dist)
        assert tv < 0.02


class TestOracleTrajectories:
    """Per-gate probabilities, states, entropies vs the oracle along Born runs."""

    @pytest.mark.parametrize("L", [4, 6, 8])
    def test_seeded_trajectories(self, L):
        thetas = [0.3, math.pi / 4, 1.2]
        phis = [0.0, 0.7, 1.9]
        n_traj = 4
        for theta in thetas:
            for phi in phis:
                point = ProtocolPoint.at(theta, phi, math.pi / 4)
                for seed in range(n_traj):
                    self._one_trajectory(point, L, seed)

    @staticmethod
    def _one_trajectory(point, L, seed):
        rng = np.random.default_rng(seed)
        state = init_chain(L)
        psi = oracle.plus_state(L)
        J_b, phi_b = point.J_eff, point.folded_phi
        J_s, phi_s = point.J_d, point.phi_d
        for layer in range(2):
            for kind, n, J, phi in (("bond", L - 1, J_b, phi_b),
                                    ("site", L, J_s, phi_s)):
                for j in range(n):
                    pair = (2 * j + 1, 2 * j + 2) if kind == "bond" else (2 * j, 2 * j + 1)
                    p_eng = outcome_probability(state, pair, J)
                    p_orc, _ = oracle.branch_probabilities(psi, L, kind, j, J, phi)
                    assert p_eng == pytest.approx(p_orc, abs=1e-9)
                    s = 1 if rng.random() < p_eng else -1
                    apply_gate(state, GateSpec.from_couplings(kind, j, s, J, phi))
                    psi, _ = oracle.apply_outcome(psi, L, kind, j, s, J, phi)
        np.testing.assert_allclose(state.gamma, oracle.covariance(psi, L), atol=1e-9)
        for l in range(1, L):
            assert entanglement_entropy(state, l) == pytest.approx(
                oracle.entropy(psi, L, l), abs=1e-9)


class TestPurityMaintenance:
    def test_long_run_purity(self):
        # 10^4 gates at L=256 with periodic re-orthogonalization
        state = init_chain(256)
        rng = np.random.default_rng(0)
        for _ in range(10_000):
            kind = "bond" if rng.random() < 0.5 else "site"
            j = int(rng.integers(0, 255 if kind == "bond" else 256))
            J = float(rng.uniform(0.2, 1.2))
            pair = (2 * j + 1, 2 * j + 2) if kind == "bond" else (2 * j, 2 * j + 1)
            p = outcome_probability(state, pair, J)
            s = 1 if rng.random() < p else -1
            apply_gate(state, GateSpec.from_couplings(kind, j, s, J, 0.9))
        assert state.purity_defect() < 1e-6


class TestEntropy:
    def test_bell_pair_across_cut(self):
        # pairs (0,3) and (1,2): one complex fermion shared across the cut
        gamma = np.zeros((4, 4))
        gamma[0, 3], gamma[3, 0] = 1.0, -1.0
        gamma[1, 2], gamma[2, 1] = 1.0, -1.0
        state = MajoranaState(gamma)
        assert entanglement_entropy(state, 1) == pytest.approx(1.0, abs=1e-12)
        assert entanglement_entropy(state, 1, base=math.e) == pytest.approx(
            math.log(2), abs=1e-12)

    def test_product_zero(self):
        assert entanglement_entropy(init_chain(8), 3) == 0.0

    def test_cut_bounds(self):
        with pytest.raises(ValueError):
            entanglement_entropy(init_chain(8), 8)


class TestFitArc:
    def test_recovers_pure_log(self):
        L = 64
        l = np.arange(1, L)
        r = (L / math.pi) * np.sin(math.pi * l / L)
        s = np.log(r) / 6.0
        fit = fit_arc(s, L)
        assert fit.c == pytest.approx(1.0, abs=1e-8)
        for x in (fit.v, fit.c_prime, fit.a):
            assert x == pytest.approx(0.0, abs=1e-8)

    def test_recovers_volume_and_log_squared(self):
        L = 64
        l = np.arange(1, L)
        r = (L / math.pi) * np.sin(math.pi * l / L)
        s = 0.3 * np.minimum(l, L - l) + (2.0 / 6.0) * np.log(r) ** 2
        fit = fit_arc(s, L)
        assert fit.v == pytest.approx(0.3, abs=1e-6)
        assert fit.c_prime == pytest.approx(2.0, abs=1e-6)

    def test_rank_deficient(self):
        # degenerate l grid collapses the design matrix
        with pytest.raises(ArcFitError):
            fit_arc(np.ones(8), L=64, l_values=np.full(8, 32), window=(1, 63))

    def test_short_profile(self):
        with pytest.raises(ArcFitError):
            fit_arc(np.ones(5), L=6)
