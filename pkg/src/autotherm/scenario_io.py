"""Scenario file format: parsing and writing.

The format is line based with ``key = value`` pairs grouped into the four
sections ``[layout]``, ``[hamiltonian.bare]``, ``[hamiltonian.interaction]``
and ``[initial]``; ``#`` starts a comment. Unknown sections or keys are
rejected.

Hamiltonian values are sums of terms, each ``coeff * factor factor ...``
joined by ``+``. A factor is either a Pauli letter with a label suffix
(``Zs``, ``Xwork``; the suffix may be any unambiguous prefix of a label) or
a dense block ``label:[[[re,im],...],...]`` written as nested JSON-style
rows of ``[re, im]`` pairs. Initial states are constructor calls
(``gibbs``, ``basis(k)``, ``cmaybe(theta)``, ``werner_zx(lam, phi)``,
``werner_xx(lam, phi)``) or ``matrix [[[re,im],...],...]`` literals.
Floats round-trip through ``repr`` so writing and re-parsing a scenario is
bit exact. The full grammar is documented in the README.
"""

from __future__ import annotations

import ast
from typing import Sequence

import numpy as np

from .errors import ScenarioParseError
from .hamiltonian import (BATH, MEMORY, SYSTEM, WORK, BlockTerm, PauliTerm,
                          Scenario, Term)
from .layout import CompositeOperator, SubsystemLayout
from .states import (DensityMatrix, WernerBasis, cmaybe_state, gibbs_state,
                     werner_like_state)

_SECTIONS = ("layout", "hamiltonian.bare", "hamiltonian.interaction", "initial")
_INITIAL_KEYS = ("beta", "bath", "sm", "work", "wbar")


def _fail(line_no: int, msg: str) -> ScenarioParseError:
    return ScenarioParseError(f"line {line_no}: {msg}")


def _split_sections(text: str) -> dict[str, list[tuple[int, str, str]]]:
    sections: dict[str, list[tuple[int, str, str]]] = {}
    current: str | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise _fail(line_no, f"unknown section [{name}]")
            if name in sections:
                raise _fail(line_no, f"duplicate section [{name}]")
            sections[name] = []
            current = name
            continue
        if current is None:
            raise _fail(line_no, "content before the first section header")
        if "=" not in line:
            raise _fail(line_no, f"expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        sections[current].append((line_no, key.strip(), value.strip()))
    return sections


def _resolve_label(token: str, labels: Sequence[str], line_no: int) -> str:
    matches = [lab for lab in labels if lab == token or lab.startswith(token)]
    if len(matches) == 1:
        return matches[0]
    if not matches:
        raise _fail(line_no, f"no subsystem label matches suffix {token!r}")
    raise _fail(line_no, f"label suffix {token!r} is ambiguous: {matches}")


def _parse_matrix_literal(text: str, line_no: int) -> np.ndarray:
    try:
        data = ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        raise _fail(line_no, f"bad matrix literal: {exc}") from None
    try:
        rows = [[complex(re, im) for re, im in row] for row in data]
        m = np.array(rows, dtype=complex)
    except (TypeError, ValueError):
        raise _fail(line_no, "matrix entries must be [re, im] pairs") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise _fail(line_no, f"matrix literal is not square: shape {m.shape}")
    return m


def _split_factors(text: str, line_no: int) -> list[str]:
    """Split factor tokens on whitespace, keeping bracket groups intact."""
    tokens = []
    depth = 0
    cur = ""
    for ch in text:
        if ch in "[":
            depth += 1
        elif ch in "]":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                tokens.append(cur)
                cur = ""
        else:
            cur += ch
    if depth != 0:
        raise _fail(line_no, "unbalanced brackets in term")
    if cur:
        tokens.append(cur)
    return tokens


def _parse_term(text: str, labels: Sequence[str], line_no: int) -> Term:
    if "*" not in text:
        raise _fail(line_no, f"term {text!r} is missing 'coeff *'")
    coeff_text, rest = text.split("*", 1)
    try:
        coeff = float(coeff_text.strip())
    except ValueError:
        raise _fail(line_no, f"bad coefficient {coeff_text.strip()!r}") from None
    pauli_factors: dict[str, str] = {}
    block_factors: dict[str, np.ndarray] = {}
    for token in _split_factors(rest.strip(), line_no):
        if ":" in token:
            lab_text, mat_text = token.split(":", 1)
            lab = _resolve_label(lab_text, labels, line_no)
            if lab in block_factors or lab in pauli_factors:
                raise _fail(line_no, f"duplicate factor on {lab!r}")
            block_factors[lab] = _parse_matrix_literal(mat_text, line_no)
        else:
            letter, suffix = token[:1], token[1:]
            if letter not in "IXYZ" or not suffix:
                raise _fail(line_no, f"bad Pauli factor {token!r}")
            lab = _resolve_label(suffix, labels, line_no)
            if lab in block_factors or lab in pauli_factors:
                raise _fail(line_no, f"duplicate factor on {lab!r}")
            pauli_factors[lab] = letter
    if block_factors and pauli_factors:
        for lab, letter in pauli_factors.items():
            block_factors[lab] = np.array(
                {"I": np.eye(2), "X": [[0, 1], [1, 0]],
                 "Y": [[0, -1j], [1j, 0]], "Z": [[1, 0], [0, -1]]}[letter],
                dtype=complex)
        return BlockTerm(coeff, block_factors)
    if block_factors:
        return BlockTerm(coeff, block_factors)
    return PauliTerm(coeff, pauli_factors)


def _parse_terms(value: str, labels: Sequence[str], line_no: int) -> list[Term]:
    parts = []
    depth = 0
    cur = ""
    for ch in value:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [_parse_term(p.strip(), labels, line_no) for p in parts if p.strip()]


def _parse_call(value: str, line_no: int) -> tuple[str, list[float]]:
    name = value.split("(", 1)[0].strip()
    if "(" not in value:
        return name, []
    if not value.endswith(")"):
        raise _fail(line_no, f"malformed constructor {value!r}")
    args_text = value[value.index("(") + 1:-1].strip()
    args = []
    if args_text:
        for a in args_text.split(","):
            try:
                args.append(float(a))
            except ValueError:
                raise _fail(line_no, f"bad constructor argument {a!r}") from None
    return name, args


def parse_scenario_text(text: str, name: str = "scenario") -> Scenario:
    sections = _split_sections(text)
    for required in _SECTIONS:
        if required not in sections:
            raise ScenarioParseError(f"missing section [{required}]")

    entries = []
    for line_no, key, value in sections["layout"]:
        if key != "subsystems":
            raise _fail(line_no, f"unknown layout key {key!r}")
        for token in value.split():
            if ":" not in token:
                raise _fail(line_no, f"bad subsystem entry {token!r}, expected label:dim")
            lab, dim_text = token.split(":", 1)
            try:
                entries.append((lab, int(dim_text)))
            except ValueError:
                raise _fail(line_no, f"bad dimension in {token!r}") from None
    if not entries:
        raise ScenarioParseError("layout section defines no subsystems")
    layout = SubsystemLayout(tuple(entries))
    labels = layout.labels

    bare: dict[str, list[Term]] = {}
    for line_no, key, value in sections["hamiltonian.bare"]:
        lab = _resolve_label(key, labels, line_no)
        if lab in bare:
            raise _fail(line_no, f"duplicate bare entry for {lab!r}")
        bare[lab] = _parse_terms(value, labels, line_no)

    interactions: dict[str, list[Term]] = {}
    for line_no, key, value in sections["hamiltonian.interaction"]:
        if key in interactions:
            raise _fail(line_no, f"duplicate interaction {key!r}")
        interactions[key] = _parse_terms(value, labels, line_no)

    raw_initial: dict[str, tuple[int, str]] = {}
    for line_no, key, value in sections["initial"]:
        if key not in _INITIAL_KEYS:
            raise _fail(line_no, f"unknown initial key {key!r}")
        if key in raw_initial:
            raise _fail(line_no, f"duplicate initial key {key!r}")
        raw_initial[key] = (line_no, value)

    if "beta" not in raw_initial:
        raise ScenarioParseError("initial section must set beta")
    line_no, beta_text = raw_initial["beta"]
    try:
        beta = float(beta_text)
    except ValueError:
        raise _fail(line_no, f"bad beta {beta_text!r}") from None

    if "work" not in raw_initial:
        raise ScenarioParseError("initial section must set the work state")
    work_state = _parse_state(raw_initial["work"], layout.restrict([WORK]), beta,
                              scenario_bare=bare)

    if "wbar" in raw_initial:
        if "bath" in raw_initial or "sm" in raw_initial:
            raise ScenarioParseError("wbar excludes separate bath/sm entries")
        wbar_layout = layout.restrict([lab for lab in labels if lab != WORK])
        wbar = _parse_state(raw_initial["wbar"], wbar_layout, beta, scenario_bare=bare)
    else:
        if "bath" not in raw_initial or "sm" not in raw_initial:
            raise ScenarioParseError("initial section needs either wbar or bath + sm")
        bath = _parse_state(raw_initial["bath"], layout.restrict([BATH]), beta,
                            scenario_bare=bare)
        sm = _parse_state(raw_initial["sm"], layout.restrict([SYSTEM, MEMORY]), beta,
                          scenario_bare=bare)
        wbar_layout = layout.restrict([lab for lab in labels if lab != WORK])
        wbar = DensityMatrix(
            CompositeOperator(np.kron(bath.matrix, sm.matrix), wbar_layout,
                              _validate=False), _validate=False)

    return Scenario(layout=layout, beta=beta, bare_terms=bare,
                    interaction_terms=interactions, initial_wbar=wbar,
                    initial_work=work_state, name=name)


def _parse_state(entry: tuple[int, str], layout: SubsystemLayout, beta: float,
                 scenario_bare: dict[str, list[Term]]) -> DensityMatrix:
    line_no, value = entry
    if value.startswith("matrix"):
        m = _parse_matrix_literal(value[len("matrix"):].strip(), line_no)
        if m.shape != (layout.dim, layout.dim):
            raise _fail(line_no, f"state shape {m.shape} != layout dim {layout.dim}")
        return DensityMatrix(CompositeOperator(m, layout))
    name, args = _parse_call(value, line_no)
    if name == "gibbs":
        if len(layout) != 1:
            raise _fail(line_no, "gibbs constructor applies to a single factor")
        lab = layout.labels[0]
        d = layout.dim
        h = np.zeros((d, d), dtype=complex)
        for t in scenario_bare.get(lab, ()):
            h += t.coefficient * t.block(lab, d)
        return gibbs_state(CompositeOperator(h, layout), beta)
    if name == "basis":
        if len(args) != 1:
            raise _fail(line_no, "basis(k) takes one index")
        k = int(args[0])
        if not 0 <= k < layout.dim:
            raise _fail(line_no, f"basis index {k} out of range for dim {layout.dim}")
        m = np.zeros((layout.dim, layout.dim), dtype=complex)
        m[k, k] = 1.0
        return DensityMatrix(CompositeOperator(m, layout), _validate=False)
    if name == "cmaybe":
        if len(args) != 1:
            raise _fail(line_no, "cmaybe(theta) takes one argument")
        return _place_sm(cmaybe_state(args[0]), layout, line_no)
    if name in ("werner_zx", "werner_xx"):
        if len(args) != 2:
            raise _fail(line_no, f"{name}(lam, phi) takes two arguments")
        basis = WernerBasis.ZX if name.endswith("zx") else WernerBasis.XX
        return _place_sm(werner_like_state(args[0], args[1], basis), layout, line_no)
    raise _fail(line_no, f"unknown state constructor {name!r}")


def _place_sm(state: DensityMatrix, layout: SubsystemLayout,
              line_no: int) -> DensityMatrix:
    # the two-qubit constructors carry (system, memory) factor order; a file
    # that orders these factors differently must not silently transpose them
    if layout.labels != state.layout.labels:
        raise _fail(line_no,
                    f"this constructor provides factors {state.layout.labels}; "
                    f"the layout orders them {layout.labels}")
    return _relabel(state, layout, line_no)


def _relabel(state: DensityMatrix, layout: SubsystemLayout, line_no: int) -> DensityMatrix:
    if state.layout.dims != layout.dims:
        raise _fail(line_no, f"constructor dims {state.layout.dims} != layout {layout.dims}")
    return DensityMatrix(CompositeOperator(state.matrix, layout, _validate=False),
                         _validate=False)


def parse_scenario_file(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_scenario_text(text, name=path)


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------

def _matrix_literal(m: np.ndarray) -> str:
    rows = []
    for row in np.asarray(m, dtype=complex):
        rows.append("[" + ",".join(f"[{float(x.real)!r},{float(x.imag)!r}]" for x in row)
                    + "]")
    return "[" + ",".join(rows) + "]"


def _term_text(term: Term, fallback_label: str) -> str:
    coeff = float(term.coefficient)
    if isinstance(term, PauliTerm):
        factors = " ".join(f"{p}{lab}" for lab, p in sorted(term.factors.items()))
        if not factors:
            factors = f"I{fallback_label}"
        return f"{coeff!r} * {factors}"
    factors = " ".join(f"{lab}:{_matrix_literal(b)}"
                       for lab, b in sorted(term.blocks.items()))
    return f"{coeff!r} * {factors}"


def write_scenario_text(scenario: Scenario) -> str:
    lines = ["[layout]"]
    lines.append("subsystems = " +
                 " ".join(f"{lab}:{d}" for lab, d in scenario.layout.entries))
    lines.append("")
    lines.append("[hamiltonian.bare]")
    for lab in scenario.layout.labels:
        terms = scenario.bare_terms.get(lab)
        if terms:
            lines.append(f"{lab} = " + " + ".join(_term_text(t, lab) for t in terms))
    lines.append("")
    lines.append("[hamiltonian.interaction]")
    first = scenario.layout.labels[0]
    for name, terms in scenario.interaction_terms.items():
        lines.append(f"{name} = " + " + ".join(_term_text(t, first) for t in terms))
    lines.append("")
    lines.append("[initial]")
    lines.append(f"beta = {scenario.beta!r}")
    lines.append(f"wbar = matrix {_matrix_literal(scenario.initial_wbar.matrix)}")
    lines.append(f"work = matrix {_matrix_literal(scenario.initial_work.matrix)}")
    lines.append("")
    return "\n".join(lines)


def write_scenario_file(scenario: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_scenario_text(scenario))
