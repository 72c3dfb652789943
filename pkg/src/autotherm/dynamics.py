"""Exact unitary evolution of a scenario and its reduced channels.

The Hamiltonian is eigendecomposed once per scenario; states, derivatives
and reduced-derivative norms at any time are then elementwise phase
evolutions in the eigenbasis. Derivatives are computed exactly through the
commutator with the Hamiltonian, never by finite differences.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import LayoutError
from .hamiltonian import BATH, BuiltHamiltonians, Scenario, build
from .layout import CompositeOperator
from .states import DensityMatrix, gibbs_state
from .tensor import partial_trace, tensor_many

#: Derivative frequency components with relative magnitude below this are dropped.
_COMPONENT_CUT = 1e-15


class Evolution:
    """Shared read-only evolution data for one scenario.

    Safe for concurrent use after construction; every method is a pure
    function of its arguments.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.built: BuiltHamiltonians = build(scenario)
        w, v = np.linalg.eigh(self.built.h_total.matrix)
        self.eigvals = w
        self.eigvecs = v
        rho0 = scenario.initial_total()
        self.rho0 = rho0
        self._rho0_eig = v.conj().T @ rho0.matrix @ v
        self._freq = w[:, None] - w[None, :]
        self._deriv_eig = (-1j * self._freq) * self._rho0_eig
        self._trace_maps: dict[str, np.ndarray] = {}
        self._norm_components: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        layout = scenario.layout
        self._bath_thermal = gibbs_state(
            CompositeOperator(scenario.bare_block(BATH), layout.restrict([BATH])),
            scenario.beta)

    # -- state evaluation ---------------------------------------------------

    def _rho_eig_at(self, t: float) -> np.ndarray:
        return self._rho0_eig * np.exp(-1j * self._freq * t)

    def total_state(self, t: float) -> DensityMatrix:
        v = self.eigvecs
        m = v @ self._rho_eig_at(t) @ v.conj().T
        return DensityMatrix(CompositeOperator(m, self.scenario.layout, _validate=False),
                             _validate=False)

    def unitary(self, t: float) -> CompositeOperator:
        v = self.eigvecs
        u = (v * np.exp(-1j * self.eigvals * t)) @ v.conj().T
        return CompositeOperator(u, self.scenario.layout, _validate=False)

    def reduced_state(self, t: float, label: str) -> DensityMatrix:
        if label not in self.scenario.layout:
            raise LayoutError(f"unknown subsystem {label!r}")
        red = partial_trace(self.total_state(t).op, [label])
        return DensityMatrix(red, _validate=False)

    def state_derivative(self, t: float, label: str | None = None) -> CompositeOperator:
        """Exact ``d rho / dt`` at ``t``, optionally reduced to one subsystem."""
        v = self.eigvecs
        d_eig = self._deriv_eig * np.exp(-1j * self._freq * t)
        m = v @ d_eig @ v.conj().T
        op = CompositeOperator(m, self.scenario.layout, _validate=False)
        if label is None:
            return op
        return partial_trace(op, [label])

    def weak_coupling_reference(self, t: float) -> DensityMatrix:
        """Frozen thermal bath tensored with the evolved other marginals,
        in the scenario's factor order."""
        factors = []
        for lab in self.scenario.layout.labels:
            if lab == BATH:
                factors.append(self._bath_thermal.op)
            else:
                factors.append(self.reduced_state(t, lab).op)
        return DensityMatrix(tensor_many(factors), _validate=False)

    # -- derivative norms for quadrature ------------------------------------

    def _trace_map(self, label: str) -> np.ndarray:
        """Map from eigenbasis matrix entries to the reduced matrix on ``label``."""
        tm = self._trace_maps.get(label)
        if tm is None:
            layout = self.scenario.layout
            pos = layout.position(label)
            dims = layout.dims
            d = dims[pos]
            D = layout.dim
            v = self.eigvecs.reshape(dims + (D,))
            v = np.moveaxis(v, pos, 0).reshape(d, D // d, D)
            tm = np.einsum("iea,jeb->ijab", v, v.conj()).reshape(d * d, D * D)
            self._trace_maps[label] = tm
        return tm

    def _norm_data(self, label: str) -> tuple[np.ndarray, np.ndarray]:
        data = self._norm_components.get(label)
        if data is None:
            tm = self._trace_map(label)
            w = self._deriv_eig.reshape(-1)
            scale = np.abs(w).max(initial=0.0)
            keep = np.abs(w) > _COMPONENT_CUT * max(scale, 1.0)
            freqs = self._freq.reshape(-1)[keep]
            coeffs = tm[:, keep] * w[keep][None, :]
            data = (np.ascontiguousarray(freqs), np.ascontiguousarray(coeffs))
            self._norm_components[label] = data
        return data

    def derivative_norms(self, label: str, times: np.ndarray, p: float) -> np.ndarray:
        """Schatten p-norm of the reduced state derivative at each time."""
        freqs, coeffs = self._norm_data(label)
        d = self.scenario.layout.dim_of(label)
        if freqs.size == 0:
            return np.zeros(np.asarray(times, dtype=float).shape)
        return kernels.derivative_norms(freqs, coeffs, np.asarray(times, dtype=float), p, d)


_CACHE: "weakref.WeakKeyDictionary[Scenario, Evolution]" = weakref.WeakKeyDictionary()


def evolution_for(scenario: Scenario) -> Evolution:
    """Cached :class:`Evolution` for a scenario (keyed by object identity)."""
    ev = _CACHE.get(scenario)
    if ev is None:
        ev = Evolution(scenario)
        _CACHE[scenario] = ev
    return ev


def total_state(scenario: Scenario, t: float) -> DensityMatrix:
    return evolution_for(scenario).total_state(t)


def reduced_state(scenario: Scenario, t: float, label: str) -> DensityMatrix:
    return evolution_for(scenario).reduced_state(t, label)


def state_derivative(scenario: Scenario, t: float, label: str | None = None) -> CompositeOperator:
    return evolution_for(scenario).state_derivative(t, label)


def weak_coupling_reference(scenario: Scenario, t: float) -> DensityMatrix:
    return evolution_for(scenario).weak_coupling_reference(t)


@dataclass(frozen=True)
class Trajectory:
    """Sampled evolution: total states plus requested reduced states."""

    times: tuple[float, ...]
    total_states: tuple[DensityMatrix, ...]
    reduced: Mapping[str, tuple[DensityMatrix, ...]]


def compute_trajectory(scenario: Scenario, times: Sequence[float],
                       labels: Iterable[str] = ()) -> Trajectory:
    ev = evolution_for(scenario)
    ts = tuple(float(t) for t in times)
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise LayoutError("trajectory times must be ascending")
    totals = tuple(ev.total_state(t) for t in ts)
    reduced = {lab: tuple(ev.reduced_state(t, lab) for t in ts) for lab in labels}
    return Trajectory(times=ts, total_states=totals, reduced=reduced)


def write_trajectory_csv(traj: Trajectory, path: str) -> None:
    """Write a trajectory as CSV: time, then per reduced label the real and
    imaginary part of every matrix entry in row-major order."""
    header, rows = trajectory_rows(traj)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def trajectory_rows(traj: Trajectory) -> tuple[list[str], list[list[float]]]:
    """Flatten a trajectory for CSV export.

    Columns: time then, per reduced label, the real and imaginary part of
    every matrix entry in row-major order.
    """
    header = ["time"]
    labels = sorted(traj.reduced)
    for lab in labels:
        d = traj.reduced[lab][0].dim
        for i in range(d):
            for j in range(d):
                header += [f"{lab}_{i}{j}_re", f"{lab}_{i}{j}_im"]
    rows = []
    for k, t in enumerate(traj.times):
        row = [t]
        for lab in labels:
            m = traj.reduced[lab][k].matrix
            for i in range(m.shape[0]):
                for j in range(m.shape[1]):
                    row += [float(m[i, j].real), float(m[i, j].imag)]
        rows.append(row)
    return header, rows
