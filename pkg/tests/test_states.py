import math

import numpy as np
import pytest

from autotherm import (CompositeOperator, ContractError, LayoutError,
                       ParameterError, SubsystemLayout)
from autotherm.states import (DensityMatrix, WernerBasis, cmaybe_state,
                              gibbs_state, pure_state_from_amplitudes,
                              relative_entropy, von_neumann_entropy,
                              werner_like_state, werner_separability_edge)
from autotherm.tensor import partial_trace, trace_norm

from conftest import PAULI_Z, random_density, random_hermitian

L1 = SubsystemLayout.of(("a", 2))


def dm(matrix, layout=None):
    return DensityMatrix(CompositeOperator(np.asarray(matrix, dtype=complex),
                                           layout or SubsystemLayout.of(("a", matrix.shape[0]))))


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ContractError):
            dm(np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_rejects_wrong_trace(self):
        with pytest.raises(ContractError):
            dm(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ContractError):
            dm(np.diag([1.5, -0.5]))

    def test_purity(self, rng):
        rho = dm(random_density(rng, 4))
        assert 1.0 / 4 - 1e-12 <= rho.purity() <= 1.0 + 1e-12


class TestGibbs:
    def test_flat_hamiltonian_gives_maximally_mixed(self):
        h = CompositeOperator(np.eye(4), SubsystemLayout.of(("a", 4)))
        rho = gibbs_state(h, beta=2.7)
        np.testing.assert_allclose(rho.matrix, np.eye(4) / 4, atol=1e-14)

    def test_qubit_thermal_weights(self):
        rho = gibbs_state(CompositeOperator(PAULI_Z, L1), beta=1.0)
        z = math.exp(-1.0) + math.exp(1.0)
        np.testing.assert_allclose(rho.matrix,
                                   np.diag([math.exp(-1.0) / z, math.exp(1.0) / z]),
                                   atol=1e-14)

    def test_low_temperature_projects_on_ground_state(self):
        rho = gibbs_state(CompositeOperator(PAULI_Z, L1), beta=50.0)
        np.testing.assert_allclose(rho.matrix, np.diag([0.0, 1.0]), atol=1e-8)

    def test_commutes_with_hamiltonian(self, rng):
        h = CompositeOperator(random_hermitian(rng, 4), SubsystemLayout.of(("a", 4)))
        rho = gibbs_state(h, beta=0.8)
        comm = h.matrix @ rho.matrix - rho.matrix @ h.matrix
        assert np.abs(comm).max() <= 1e-12

    def test_no_overflow_at_extreme_beta(self):
        h = CompositeOperator(np.diag([0.0, 500.0]).astype(complex), L1)
        rho = gibbs_state(h, beta=10.0)
        np.testing.assert_allclose(rho.matrix, np.diag([1.0, 0.0]), atol=1e-15)

    def test_rejects_nonpositive_beta(self):
        with pytest.raises(ParameterError):
            gibbs_state(CompositeOperator(PAULI_Z, L1), beta=0.0)

    def test_maximizes_entropy_at_fixed_energy(self, rng):
        # perturb the thermal populations within the trace- and
        # energy-preserving diagonal manifold: entropy must not increase
        h = random_hermitian(rng, 4)
        layout = SubsystemLayout.of(("a", 4))
        gibbs_state(CompositeOperator(h, layout), beta=1.3)  # contract check
        w = np.linalg.eigvalsh(h)
        p = np.exp(-1.3 * (w - w.min()))
        p /= p.sum()
        s0 = float(-(p * np.log(p)).sum())
        constraints = np.linalg.qr(np.stack([np.ones(4), w], axis=1))[0]
        for _ in range(20):
            v = rng.normal(size=4)
            v -= constraints @ (constraints.T @ v)
            if np.abs(v).max() < 1e-12:
                continue
            v *= p.min() / (2 * np.abs(v).max())
            for eps in (1.0, -1.0):
                q = p + eps * v
                assert q.min() > 0
                assert float(-(q * np.log(q)).sum()) <= s0 + 1e-12


class TestEntropy:
    def test_pure_state_zero(self):
        assert von_neumann_entropy(dm(np.diag([1.0, 0.0]))) == pytest.approx(0.0, abs=1e-14)

    def test_maximally_mixed(self):
        assert von_neumann_entropy(dm(np.eye(4) / 4)) == pytest.approx(math.log(4))

    def test_two_level_value(self):
        # -(0.75 ln 0.75 + 0.25 ln 0.25)
        s = von_neumann_entropy(dm(np.diag([0.75, 0.25])))
        assert s == pytest.approx(0.5623351446188083, abs=1e-14)

    def test_bounds(self, rng):
        for _ in range(50):
            rho = dm(random_density(rng, 8))
            s = von_neumann_entropy(rho)
            assert -1e-12 <= s <= math.log(8) + 1e-12


class TestRelativeEntropy:
    def test_self_distance_zero(self, rng):
        rho = dm(random_density(rng, 4))
        assert abs(relative_entropy(rho, rho)) <= 1e-10

    def test_classical_kl_oracle(self):
        rho = dm(np.eye(2) / 2)
        sigma = dm(np.diag([0.25, 0.75]))
        expected = 0.5 * (math.log(0.5 / 0.25) + math.log(0.5 / 0.75))
        assert expected == pytest.approx(0.1438410362258904, abs=1e-15)
        assert relative_entropy(rho, sigma) == pytest.approx(expected, abs=1e-12)

    def test_disjoint_support_infinite(self, rng):
        inner = random_density(rng, 2)
        layout = SubsystemLayout.qubits("a", "b")
        rho = dm(np.kron(np.diag([1.0, 0.0]), inner), layout)
        sigma = dm(np.kron(np.diag([0.0, 1.0]), inner), layout)
        assert relative_entropy(rho, sigma) == math.inf

    def test_klein_inequality(self, rng):
        for _ in range(200):
            rho = dm(random_density(rng, 4))
            sigma = dm(random_density(rng, 4))
            val = relative_entropy(rho, sigma)
            assert val >= -1e-9
            if val <= 1e-10:
                assert trace_norm(rho.op - sigma.op) <= 1e-8

    def test_layout_mismatch(self, rng):
        rho = dm(random_density(rng, 2))
        sigma = dm(random_density(rng, 2), SubsystemLayout.of(("b", 2)))
        with pytest.raises(LayoutError):
            relative_entropy(rho, sigma)


def _cmaybe_marginals(theta):
    s, c = math.sin(theta), math.cos(theta)
    rho_s = np.diag([math.cos(theta / 2) ** 2, math.sin(theta / 2) ** 2])
    rho_m = 0.5 * np.array([[1 + s * c, -c * c], [-c * c, 1 - s * c]])
    return rho_s, rho_m


class TestCmaybe:
    def test_theta_zero_product(self):
        rho = cmaybe_state(0.0)
        rs = partial_trace(rho.op, ["system"]).matrix
        np.testing.assert_allclose(rs, np.diag([1.0, 0.0]), atol=1e-14)

    def test_pure_for_all_theta(self):
        for theta in np.linspace(0, 2 * math.pi, 9):
            assert cmaybe_state(theta).purity() == pytest.approx(1.0, abs=1e-12)

    def test_memory_marginal_at_half_pi(self):
        rho = cmaybe_state(math.pi / 2)
        rm = partial_trace(rho.op, ["memory"]).matrix
        np.testing.assert_allclose(rm, np.eye(2) / 2, atol=1e-14)

    def test_marginals_match_closed_forms(self):
        for theta in np.linspace(0.0, 2 * math.pi, 25):
            rho = cmaybe_state(theta)
            rs = partial_trace(rho.op, ["system"]).matrix
            rm = partial_trace(rho.op, ["memory"]).matrix
            exp_s, exp_m = _cmaybe_marginals(theta)
            assert np.abs(rs - exp_s).max() <= 1e-12
            assert np.abs(rm - exp_m).max() <= 1e-12


class TestWerner:
    def test_lam_zero_maximally_mixed(self):
        rho = werner_like_state(0.0, 1.3, WernerBasis.ZX)
        np.testing.assert_allclose(rho.matrix, np.eye(4) / 4, atol=1e-14)

    def test_pure_product_limit(self):
        rho = werner_like_state(1.0, 0.0, WernerBasis.ZX)
        plus = np.array([1, 1]) / math.sqrt(2)
        psi = np.kron([1, 0], plus)
        np.testing.assert_allclose(rho.matrix, np.outer(psi, psi), atol=1e-14)

    def test_lambda_out_of_range(self):
        with pytest.raises(ParameterError):
            werner_like_state(1.5, 0.0, WernerBasis.XX)

    def test_marginal_linear_in_mixture(self):
        lam, phi = 0.4, 0.9
        mixed = werner_like_state(lam, phi, WernerBasis.XX)
        pure = werner_like_state(1.0, phi, WernerBasis.XX)
        flat = werner_like_state(0.0, phi, WernerBasis.XX)
        for lab in ("system", "memory"):
            got = partial_trace(mixed.op, [lab]).matrix
            expect = (lam * partial_trace(pure.op, [lab]).matrix
                      + (1 - lam) * partial_trace(flat.op, [lab]).matrix)
            assert np.abs(got - expect).max() <= 1e-14

    def test_separability_edge_metadata(self):
        assert werner_separability_edge(math.pi / 4) == pytest.approx(1.0 / 3.0)
        assert werner_separability_edge(0.0) == pytest.approx(1.0)


class TestPureStateFromAmplitudes:
    def test_basis_ket(self):
        rho = pure_state_from_amplitudes([0.0, 1.0], L1)
        np.testing.assert_allclose(rho.matrix, np.diag([0.0, 1.0]), atol=1e-15)

    def test_plus_ket(self):
        rho = pure_state_from_amplitudes([1 / math.sqrt(2), 1 / math.sqrt(2)], L1)
        np.testing.assert_allclose(rho.matrix, np.full((2, 2), 0.5), atol=1e-14)

    def test_random_vector_idempotent(self, rng):
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        layout = SubsystemLayout.of(("a", 4))
        rho = pure_state_from_amplitudes(amps, layout, normalize=True)
        assert np.abs(rho.matrix @ rho.matrix - rho.matrix).max() <= 1e-12

    def test_zero_vector_rejected(self):
        with pytest.raises(ParameterError):
            pure_state_from_amplitudes([0.0, 0.0], L1)

    def test_unnormalized_needs_flag(self):
        with pytest.raises(ParameterError):
            pure_state_from_amplitudes([1.0, 1.0], L1)
