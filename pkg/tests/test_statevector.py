import itertools
import math

import numpy as np
import pytest

from codelearn import statevector as sv
from codelearn.lattice import CapacityError, make_layout
from codelearn.protocol import PROJECTIVE, ProtocolPoint

D2 = make_layout(2)
D3 = make_layout(3)


class TestLayout:
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_counts(self, d):
        lay = make_layout(d)
        assert lay.n_data == d * d + (d - 1) ** 2
        assert lay.n_stabilizers == lay.n_data - 1  # exactly one logical qubit

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_stabilizers_commute(self, d):
        lay = make_layout(d)
        for star in lay.x_stars:
            for plaq in lay.z_plaquettes:
                assert len(set(star) & set(plaq)) % 2 == 0

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_logicals(self, d):
        lay = make_layout(d)
        assert len(lay.logical_x) == d and len(lay.logical_z) == d
        # logical strings commute with every stabilizer ...
        for string, stabs in ((lay.logical_x, lay.z_plaquettes),
                              (lay.logical_z, lay.x_stars)):
            for stab in stabs:
                assert len(set(string) & set(stab)) % 2 == 0
        # ... and anticommute with each other
        assert len(set(lay.logical_x) & set(lay.logical_z)) % 2 == 1

    def test_capacity(self):
        with pytest.raises(CapacityError):
            make_layout(5)


class TestPrepareCode:
    def test_zero_state_expectations(self):
        st = sv.prepare_code(D2, "zero")
        for star in D2.x_stars:
            assert st.expectation_pauli_x(star) == pytest.approx(1.0, abs=1e-12)
        for plaq in D2.z_plaquettes:
            assert st.expectation_pauli_z(plaq) == pytest.approx(1.0, abs=1e-12)
        assert st.expectation_pauli_z(D2.logical_z) == pytest.approx(1.0, abs=1e-12)

    def test_plus_state_logicals(self):
        st = sv.prepare_code(D2, "plus")
        assert st.expectation_pauli_x(D2.logical_x) == pytest.approx(1.0, abs=1e-12)
        assert st.expectation_pauli_z(D2.logical_z) == pytest.approx(0.0, abs=1e-12)

    def test_d3_stabilizers(self):
        st = sv.prepare_code(D3, "plus")
        for star in D3.x_stars:
            assert st.expectation_pauli_x(star) == pytest.approx(1.0, abs=1e-12)
        for plaq in D3.z_plaquettes:
            assert st.expectation_pauli_z(plaq) == pytest.approx(1.0, abs=1e-12)

    def test_reference_maximally_entangled(self):
        st = sv.prepare_code(D2, "entangled_with_reference")
        rho = st.reference_density()
        np.testing.assert_allclose(rho, np.eye(2) / 2, atol=1e-12)

    def test_logical_basis_orthonormal(self):
        plus = sv.prepare_code(D3, "plus").psi
        minus = sv.prepare_code(D3, "minus").psi
        assert abs(np.vdot(plus, minus)) < 1e-12
        assert np.linalg.norm(plus) == pytest.approx(1.0, abs=1e-12)


class TestRotateAll:
    def test_identity(self):
        st = sv.prepare_code(D2, "plus")
        out = sv.rotate_all(st, 0.0, 0.0)
        np.testing.assert_allclose(out.psi, st.psi, atol=1e-15)

    def test_norm_preserved(self):
        st = sv.prepare_code(D2, "entangled_with_reference")
        out = sv.rotate_all(st, 1.1, 2.3)
        assert out.norm() == pytest.approx(1.0, abs=1e-12)

    def test_single_qubit_axis(self):
        # U1^dag Z U1 must equal the (theta, phi) measurement axis
        theta, phi = 0.7, 1.9
        u1 = sv.single_qubit_rotation(theta, phi)
        Z = np.diag([1.0, -1.0]).astype(complex)
        X = np.array([[0, 1], [1, 0]], dtype=complex)
        Y = np.array([[0, -1j], [1j, 0]])
        axis = (math.sin(theta) * math.cos(phi) * X
                + math.sin(theta) * math.sin(phi) * Y + math.cos(theta) * Z)
        np.testing.assert_allclose(u1.conj().T @ Z @ u1, axis, atol=1e-12)

    def test_plus_rotation(self):
        # single qubit |0>, theta=pi/2: amplitudes (1, -1)/sqrt(2) up to phase
        u1 = sv.single_qubit_rotation(math.pi / 2, 0.0)
        out = u1 @ np.array([1.0, 0.0], dtype=complex)
        overlap = abs(np.vdot(np.array([1, -1]) / math.sqrt(2), out))
        assert overlap == pytest.approx(1.0, abs=1e-12)


class TestWeakMeasure:
    def test_beta_zero_identity(self):
        st = sv.rotate_all(sv.prepare_code(D2, "entangled_with_reference"), 0.4, 0.9)
        signs, post, logw = sv.weak_measure_all(st, 0.0, seed=3)
        np.testing.assert_allclose(np.abs(post.psi), np.abs(st.psi), atol=1e-12)
        assert logw == pytest.approx(D2.n_data * math.log(0.5), abs=1e-12)

    def test_branch_probabilities_sum(self):
        st = sv.rotate_all(sv.prepare_code(D2, "entangled_with_reference"), 0.8, 0.3)
        total = 0.0
        for bits in itertools.product([1, -1], repeat=D2.n_data):
            _, _, logw = sv.weak_measure_all(st, 1.2, forced=np.array(bits))
            total += math.exp(logw)
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_projective_plaquette_parity(self):
        # Z-basis projective outcomes satisfy every Z-plaquette parity
        st = sv.prepare_code(D3, "entangled_with_reference")
        for seed in range(20):
            signs, _, _ = sv.weak_measure_all(st, PROJECTIVE, seed=seed)
            for plaq in D3.z_plaquettes:
                assert np.prod(signs[list(plaq)]) == 1

    def test_order_independence(self):
        # Born chain rule gives the same record weight in any sampling order
        st = sv.rotate_all(sv.prepare_code(D2, "entangled_with_reference"), 1.0, 0.7)
        rng = np.random.default_rng(0)
        for _ in range(10):
            signs = rng.choice([1, -1], size=D2.n_data)
            _, post_a, logw_a = sv.weak_measure_all(st, 0.9, forced=signs)
            perm = rng.permutation(D2.n_data)
            _, post_b, logw_b = sv.weak_measure_all(st, 0.9, forced=signs, order=perm)
            assert logw_a == pytest.approx(logw_b, abs=1e-12)
            np.testing.assert_allclose(post_a.psi, post_b.psi, atol=1e-12)

    def test_post_select_accrues_weight(self):
        st = sv.rotate_all(sv.prepare_code(D2, "entangled_with_reference"), 0.6, 0.2)
        signs, _, logw = sv.weak_measure_all(st, 1.0, mode="post_select_plus")
        assert np.all(signs == 1)
        assert logw < 0.0

    def test_impossible_projective_outcome(self):
        st = sv.prepare_code(D2, "zero")  # Z_L = +1 exactly
        forced = -np.ones(D2.n_data, dtype=int)
        forced_full = forced.copy()
        with pytest.raises(ValueError):
            # all-minus record violates a plaquette parity with probability 0
            sv.weak_measure_all(st, PROJECTIVE, forced=forced_full)


class TestChannelIdentity:
    @pytest.mark.parametrize("theta,phi,t", [
        (0.0, 0.0, 0.2), (0.8, 0.5, 0.5), (math.pi / 4, 0.0, math.pi / 4),
        (1.2, 2.0, 0.1), (math.pi / 2, math.pi / 2, 0.6),
    ])
    def test_outcome_average_is_dephasing(self, theta, phi, t):
        # sum_s M_s U rho U^dag M_s^dag == U [tensor_j N_j(rho)] U^dag
        point = ProtocolPoint.at(theta, phi, t)
        state = sv.prepare_code(D2, "entangled_with_reference")
        rho = np.outer(state.psi, state.psi.conj())
        rotated = sv.rotate_all(state, theta, phi)
        n = state.n_qubits
        summed = np.zeros_like(rho)
        for bits in itertools.product([1, -1], repeat=D2.n_data):
            signs = np.array(bits)
            _, post, logw = sv.weak_measure_all(rotated, point.strength.beta,
                                                forced=signs)
            summed += math.exp(logw) * np.outer(post.psi, post.psi.conj())
        expect = sv.dephasing_channel_reference(rho, D2, theta, phi, t, n)
        np.testing.assert_allclose(summed, expect, atol=1e-10)


class TestLogicalDensity:
    def test_no_measurement_record(self):
        st = sv.rotate_all(sv.prepare_code(D2, "entangled_with_reference"), 0.9, 0.4)
        rec = sv.logical_density(st, 0.0)
        assert rec.kappa == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)
        assert rec.I_s == pytest.approx(1.0, abs=1e-12)

    def test_projective_z_collapses(self):
        point = ProtocolPoint.at(0.0, 0.0, math.pi / 4)
        for seed in range(10):
            rec = sv.sample_record(point, D2, seed=seed)
            assert rec.C == pytest.approx(1.0, abs=1e-9)
            assert rec.I_s == pytest.approx(0.0, abs=1e-9)
            assert abs(rec.bloch[2]) == pytest.approx(1.0, abs=1e-9)

    def test_record_consistency(self):
        point = ProtocolPoint.at(0.7, 1.1, 0.5)
        rec = sv.sample_record(point, D2, seed=5)
        # P(s) = (P_pp + P_mm)/2 and the record weight agree
        assert rec.weight == pytest.approx(
            0.5 * (rec.P_pp + rec.P_mm), abs=1e-12)
        assert rec.weight == pytest.approx(math.exp(rec.log_weight), abs=1e-12)
        assert 0.0 <= rec.C <= 1.0
        assert 0.0 <= rec.I_s <= 1.0
        # Bloch vector magnitude equals C (pure-state polarization) only at
        # t=pi/4; here it is bounded by 1
        assert np.linalg.norm(rec.bloch) <= 1.0 + 1e-9

    def test_reference_purity_at_projective(self):
        point = ProtocolPoint.at(1.0, 0.8, math.pi / 4)
        for seed in range(10):
            rotated = sv.rotated_entangled_state(point, D2)
            _, post, _ = sv.weak_measure_all(rotated, PROJECTIVE, seed=seed)
            rho = post.reference_density()
            evals = np.linalg.eigvalsh(rho)
            np.testing.assert_allclose(sorted(evals), [0.0, 1.0], atol=1e-9)


class TestCoherentInformation:
    @pytest.mark.parametrize("theta,phi", [
        (0.0, 0.0), (math.pi / 4, 0.0), (math.atan(math.sqrt(2)), math.pi / 4),
        (math.pi / 2, math.pi / 2), (1.1, 0.6),
    ])
    def test_limits(self, theta, phi):
        lay = D2
        ic0, _ = sv.coherent_information(ProtocolPoint.at(theta, phi, 0.0), lay)
        assert ic0 == pytest.approx(1.0, abs=1e-10)
        icp, _ = sv.coherent_information(ProtocolPoint.at(theta, phi, math.pi / 4), lay)
        assert icp == pytest.approx(0.0, abs=1e-10)

    def test_monotone_in_t_z_basis(self):
        lay = D2
        values = [sv.coherent_information(ProtocolPoint.at(0.0, 0.0, t), lay)[0]
                  for t in np.linspace(0.0, math.pi / 4, 20)]
        assert all(a >= b - 1e-10 for a, b in zip(values, values[1:]))

    def test_born_normalization(self):
        for lay in (D2, D3):
            point = ProtocolPoint.at(0.9, 0.4, 0.3)
            _, _, _, prob = sv.exhaustive_records(point, lay)
            assert prob.sum() == pytest.approx(1.0, abs=1e-10)

    def test_monte_carlo_matches_exhaustive(self):
        point = ProtocolPoint.at(0.0, 0.0, 0.1 * math.pi)
        exact, _ = sv.coherent_information(point, D2)
        mc, err = sv.coherent_information(point, D2, "monte_carlo",
                                          n_samples=10_000, seed=7)
        assert abs(mc - exact) < 3.0 * err

    def test_basis_covariance(self):
        # rotating the basis and counter-rotating the initial logical state
        # leaves the outcome distribution invariant: P(s) depends on the
        # basis only through the rotated code state
        t = 0.3
        p1 = ProtocolPoint.at(0.0, 0.0, t)
        p2 = ProtocolPoint.at(math.pi / 2, 0.0, t)
        _, _, _, prob1 = sv.exhaustive_records(p1, D2)
        _, _, _, prob2 = sv.exhaustive_records(p2, D2)
        # the X-basis distribution of the code equals the Z-basis one of the
        # Hadamard-rotated code; both are normalized Born distributions
        assert prob1.sum() == pytest.approx(prob2.sum(), abs=1e-10)
        ic1, _ = sv.coherent_information(p1, D2)
        ic2, _ = sv.coherent_information(p2, D2)
        # X and Z bases are exchanged by the lattice duality; I_c agrees
        assert ic1 == pytest.approx(ic2, abs=1e-10)

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            sv.exhaustive_records(ProtocolPoint.at(0.3, 0.2, 0.2), make_layout(4))


class TestProjectedEnsemble:
    def test_unit_norm(self):
        point = ProtocolPoint.at(1.0, 0.7, math.pi / 4)
        bloch, w = sv.projected_ensemble(point, D2, 500, seed=0)
        np.testing.assert_allclose(np.linalg.norm(bloch, axis=1), 1.0, atol=1e-9)
        assert w.sum() == pytest.approx(1.0)

    def test_z_basis_bimodal(self):
        point = ProtocolPoint.at(0.0, 0.0, math.pi / 4)
        bloch, _ = sv.projected_ensemble(point, D3, 400, seed=1)
        np.testing.assert_allclose(np.abs(bloch[:, 2]), 1.0, atol=1e-9)

    def test_xz_basis_in_plane(self):
        point = ProtocolPoint.at(math.pi / 4, 0.0, math.pi / 4)
        bloch, _ = sv.projected_ensemble(point, D3, 400, seed=2)
        assert np.max(np.abs(bloch[:, 1])) < 1e-9

    def test_requires_projective(self):
        with pytest.raises(ValueError):
            sv.projected_ensemble(ProtocolPoint.at(0.3, 0.2, 0.2), D2, 10)
