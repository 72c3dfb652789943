import numpy as np
import pytest

from autotherm import ScenarioParseError, builtin_scenario
from autotherm.hamiltonian import build, swap_counterexample
from autotherm.scenario_io import (parse_scenario_file, parse_scenario_text,
                                   write_scenario_text)

MINIMAL = """
[layout]
subsystems = bath:2 system:2 memory:2 work:2

[hamiltonian.bare]
system = 1.0 * Zs
bath   = 1.0 * Zb
memory = 1.0 * Im
work   = 1.0 * Zw

[hamiltonian.interaction]
sw = 1.0 * Zs Zw
sm = 1.0 * Zs Zm
bm = 1.0 * Zb Zm

[initial]
beta = 1.0
bath = gibbs
sm   = cmaybe(1.0471975511965976)
work = basis(1)
"""


def test_shipped_files_match_builtins():
    parsed = parse_scenario_file("scenarios/cmaybe.scn")
    ref = builtin_scenario("cmaybe", theta=1.0471975511965976)
    np.testing.assert_array_equal(build(parsed).h_total.matrix,
                                  build(ref).h_total.matrix)
    np.testing.assert_allclose(parsed.initial_wbar.matrix, ref.initial_wbar.matrix,
                               atol=1e-15)
    np.testing.assert_array_equal(parsed.initial_work.matrix, ref.initial_work.matrix)

    swap = parse_scenario_file("scenarios/swap_counterexample.scn")
    ref_swap = swap_counterexample()
    np.testing.assert_allclose(build(swap).h_total.matrix,
                               build(ref_swap).h_total.matrix, atol=1e-15)


def test_parse_minimal_text():
    scen = parse_scenario_text(MINIMAL)
    assert scen.beta == 1.0
    assert scen.layout.labels == ("bath", "system", "memory", "work")
    built = build(scen)
    assert np.abs(built.h_total.matrix - np.diag(np.diag(built.h_total.matrix))).max() == 0


def test_round_trip_bit_exact():
    scen = builtin_scenario("werner_zx", lam=0.5, phi=0.6)
    text = write_scenario_text(scen)
    back = parse_scenario_text(text)
    assert back.beta == scen.beta
    np.testing.assert_array_equal(back.initial_wbar.matrix, scen.initial_wbar.matrix)
    np.testing.assert_array_equal(back.initial_work.matrix, scen.initial_work.matrix)
    np.testing.assert_array_equal(build(back).h_total.matrix,
                                  build(scen).h_total.matrix)
    # a second round trip is a fixed point
    assert write_scenario_text(back) == text


def test_dense_block_factor():
    text = MINIMAL.replace(
        "sw = 1.0 * Zs Zw",
        "sw = 0.25 * s:[[[0,0],[0,-1]],[[0,1],[0,0]]] Zw")
    scen = parse_scenario_text(text)
    term = scen.interaction_terms["sw"][0]
    expect = np.array([[0, -1j], [1j, 0]])
    np.testing.assert_array_equal(term.blocks["system"], expect)
    np.testing.assert_array_equal(term.blocks["work"],
                                  np.array([[1, 0], [0, -1]], dtype=complex))


@pytest.mark.parametrize("mutation,fragment", [
    (("[initial]", "[initial]\nnonsense = 1"), "unknown initial key"),
    (("[layout]", "[stuff]\nx = 1\n[layout]"), "unknown section"),
    (("1.0 * Zs Zw", "1.0 * Qs Zw"), "bad Pauli factor"),
    (("1.0 * Zs Zw", "one * Zs Zw"), "bad coefficient"),
    (("beta = 1.0", "beta = warm"), "bad beta"),
    (("subsystems = bath:2 system:2 memory:2 work:2",
      "subsystems = bath:2 sys:2 silly:2 work:2"), "no subsystem label matches"),
])
def test_rejects_malformed_input(mutation, fragment):
    old, new = mutation
    with pytest.raises(ScenarioParseError, match=fragment):
        parse_scenario_text(MINIMAL.replace(old, new))


def test_ambiguous_suffix_rejected():
    text = MINIMAL.replace("subsystems = bath:2 system:2 memory:2 work:2",
                           "subsystems = bath:2 system:2 memory:2 work:2")
    # 'Z' alone has no suffix at all
    with pytest.raises(ScenarioParseError):
        parse_scenario_text(text.replace("1.0 * Zs Zw", "1.0 * Z Zw"))


def test_wbar_conflicts_with_parts():
    text = MINIMAL.replace("bath = gibbs", "bath = gibbs\nwbar = matrix [[[1,0]]]")
    with pytest.raises(ScenarioParseError, match="wbar excludes"):
        parse_scenario_text(text)


def test_missing_sections_rejected():
    with pytest.raises(ScenarioParseError, match="missing section"):
        parse_scenario_text("[layout]\nsubsystems = bath:2 system:2 memory:2 work:2\n")
