import numpy as np
import pytest

from autotherm import (CompositeOperator, ParameterError, ScenarioError,
                       SubsystemLayout)
from autotherm.hamiltonian import (BlockTerm, PauliTerm, Scenario, build,
                                   builtin_scenario, check_energy_conservation,
                                   check_ideal_memory, swap_counterexample)
from autotherm.layout import BATH, MEMORY, SYSTEM, WORK
from autotherm.states import DensityMatrix, cmaybe_state, gibbs_state
from autotherm.tensor import partial_trace

from conftest import PAULI_Z, random_density


def _thermal_qubit(beta=1.0):
    return gibbs_state(CompositeOperator(PAULI_Z, SubsystemLayout.qubits(BATH)), beta)


def _work_one():
    return DensityMatrix(CompositeOperator(np.diag([0.0, 1.0]).astype(complex),
                                           SubsystemLayout.qubits(WORK)), _validate=False)


def _scenario(bare, interactions, rho_sm=None, beta=1.0):
    layout = SubsystemLayout.four_qubits()
    rho_sm = rho_sm if rho_sm is not None else cmaybe_state(0.8)
    if bare.get(BATH):
        bath = _thermal_qubit(abs(beta)).matrix
    else:
        bath = np.eye(2, dtype=complex) / 2.0
    wbar = DensityMatrix(CompositeOperator(
        np.kron(bath, rho_sm.matrix),
        layout.restrict([BATH, SYSTEM, MEMORY]), _validate=False), _validate=False)
    return Scenario(layout=layout, beta=beta, bare_terms=bare,
                    interaction_terms=interactions, initial_wbar=wbar,
                    initial_work=_work_one())


BARE = {
    SYSTEM: [PauliTerm(1.0, {SYSTEM: "Z"})],
    BATH: [PauliTerm(1.0, {BATH: "Z"})],
    MEMORY: [PauliTerm(1.0, {MEMORY: "I"})],
    WORK: [PauliTerm(1.0, {WORK: "Z"})],
}


class TestBuild:
    def test_empty_terms_give_zero(self):
        scen = _scenario({BATH: []}, {}, beta=1.0)
        built = build(scen)
        assert np.abs(built.h_total.matrix).max() == 0.0
        assert np.abs(built.h_bare.matrix).max() == 0.0

    def test_builtin_bare_structure(self):
        built = build(builtin_scenario("cmaybe", theta=0.4))
        # only the identity string on the memory contributes a trace
        assert np.trace(built.h_bare.matrix).real == pytest.approx(16.0)
        np.testing.assert_allclose(built.parts["bare.memory"].matrix, np.eye(16),
                                   atol=1e-15)
        for name in ("bare.system", "bare.bath", "bare.work"):
            assert np.trace(built.parts[name].matrix) == pytest.approx(0.0)

    def test_builtin_total_is_diagonal(self):
        built = build(builtin_scenario("cmaybe", theta=0.4))
        off = built.h_total.matrix - np.diag(np.diag(built.h_total.matrix))
        assert np.abs(off).max() == 0.0

    def test_linear_in_coefficients(self):
        s1 = _scenario(BARE, {"sm": [PauliTerm(0.3, {SYSTEM: "Z", MEMORY: "Z"})]})
        s2 = _scenario(BARE, {"sm": [PauliTerm(0.6, {SYSTEM: "Z", MEMORY: "Z"})]})
        h1 = build(s1).parts["int.sm"].matrix
        h2 = build(s2).parts["int.sm"].matrix
        np.testing.assert_allclose(2.0 * h1, h2, atol=1e-15)

    def test_unknown_label_rejected(self):
        with pytest.raises(ScenarioError):
            _scenario(BARE, {"zz": [PauliTerm(1.0, {"nope": "Z"})]})

    def test_non_hermitian_block_rejected(self):
        with pytest.raises(ParameterError):
            BlockTerm(1.0, {SYSTEM: np.array([[0, 1], [0, 0]], dtype=complex)})

    def test_dense_block_term(self, rng):
        block = np.array([[0.0, 1j], [-1j, 0.0]])
        scen = _scenario(BARE, {"sx": [BlockTerm(0.5, {SYSTEM: block})]})
        part = build(scen).parts["int.sx"].matrix
        expect = 0.5 * np.kron(np.kron(np.eye(2), block), np.eye(4))
        np.testing.assert_allclose(part, expect, atol=1e-15)


class TestBuiltins:
    def test_cmaybe_zero_theta_marginal(self):
        scen = builtin_scenario("cmaybe", theta=0.0)
        rs = partial_trace(scen.initial_wbar.op, [SYSTEM]).matrix
        np.testing.assert_allclose(rs, np.diag([1.0, 0.0]), atol=1e-14)

    def test_werner_lam_zero(self):
        scen = builtin_scenario("werner_zx", lam=0.0, phi=1.1)
        sm = partial_trace(scen.initial_wbar.op, [SYSTEM, MEMORY]).matrix
        np.testing.assert_allclose(sm, np.eye(4) / 4, atol=1e-14)

    def test_all_builtins_validate(self):
        for scen in (builtin_scenario("cmaybe", theta=1.0),
                     builtin_scenario("werner_zx", lam=0.5, phi=0.6),
                     builtin_scenario("werner_xx", lam=0.7, phi=0.8)):
            built = build(scen)
            assert check_energy_conservation(built) == 0.0
            ok, dev = check_ideal_memory(built)
            assert ok and dev <= 1e-12

    def test_unknown_name(self):
        with pytest.raises(ParameterError):
            builtin_scenario("nope", theta=1.0)
        with pytest.raises(ParameterError):
            builtin_scenario("cmaybe")


class TestChecks:
    def test_total_equals_bare_conserves(self):
        scen = _scenario(BARE, {})
        assert check_energy_conservation(build(scen)) == 0.0

    def test_transverse_term_breaks_conservation(self):
        coeff = 0.37
        scen = _scenario(BARE, {"kick": [PauliTerm(coeff, {SYSTEM: "X"})]})
        assert check_energy_conservation(build(scen)) == pytest.approx(2.0 * coeff)

    def test_ideal_memory_scaled_identity(self):
        bare = dict(BARE)
        bare[MEMORY] = [PauliTerm(3.0, {MEMORY: "I"})]
        ok, dev = check_ideal_memory(build(_scenario(bare, {})))
        assert ok and dev <= 1e-12

    def test_non_ideal_memory_detected(self):
        bare = dict(BARE)
        bare[MEMORY] = [PauliTerm(1.0, {MEMORY: "Z"})]
        ok, dev = check_ideal_memory(build(_scenario(bare, {})))
        assert not ok
        assert dev == pytest.approx(1.0)


class TestScenarioValidation:
    def test_bath_marginal_must_be_thermal(self):
        layout = SubsystemLayout.four_qubits()
        bad_bath = np.diag([0.5, 0.5]).astype(complex)
        wbar = DensityMatrix(CompositeOperator(
            np.kron(bad_bath, cmaybe_state(0.3).matrix),
            layout.restrict([BATH, SYSTEM, MEMORY]), _validate=False), _validate=False)
        with pytest.raises(ScenarioError, match="bath marginal"):
            Scenario(layout=layout, beta=1.0, bare_terms=BARE, interaction_terms={},
                     initial_wbar=wbar, initial_work=_work_one())

    def test_bare_term_must_stay_on_its_label(self):
        bad = dict(BARE)
        bad[SYSTEM] = [PauliTerm(1.0, {SYSTEM: "Z", MEMORY: "Z"})]
        with pytest.raises(ScenarioError, match="touches other labels"):
            _scenario(bad, {})

    def test_correlated_wbar_accepted(self, rng):
        # classically correlated bath-system block (synthetic; no such
        # example exists among the built-ins) with a thermal bath marginal
        layout = SubsystemLayout.four_qubits()
        p = np.exp([-1.0, 1.0])
        p /= p.sum()
        sm0 = random_density(rng, 4)
        sm1 = random_density(rng, 4)
        wbar_m = np.zeros((8, 8), dtype=complex)
        wbar_m[:4, :4] = p[0] * sm0
        wbar_m[4:, 4:] = p[1] * sm1
        wbar = DensityMatrix(CompositeOperator(
            wbar_m, layout.restrict([BATH, SYSTEM, MEMORY]), _validate=False),
            _validate=False)
        scen = Scenario(layout=layout, beta=1.0, bare_terms=BARE, interaction_terms={},
                        initial_wbar=wbar, initial_work=_work_one())
        from autotherm.thermo import initial_mutual_information
        assert initial_mutual_information(scen) > 1e-3

    def test_beta_positive(self):
        with pytest.raises(ScenarioError):
            _scenario(BARE, {}, beta=-1.0)


class TestSwapCounterexample:
    def test_conserves_energy_but_exists(self):
        scen = swap_counterexample()
        assert check_energy_conservation(build(scen)) == 0.0
