import math

import numpy as np
import pytest

from autotherm import _speed_kernel_py, kernels


def random_components(rng, dim, n_components):
    freqs = rng.normal(scale=3.0, size=n_components)
    coeffs = (rng.normal(size=(dim * dim, n_components))
              + 1j * rng.normal(size=(dim * dim, n_components)))
    # make the implied matrix curve Hermitian: coeffs of entry (i,j) at
    # frequency f must conjugate-pair with entry (j,i) at frequency -f
    full_f = np.concatenate([freqs, -freqs])
    c = np.zeros((dim * dim, 2 * n_components), dtype=complex)
    c[:, :n_components] = coeffs
    swap = np.arange(dim * dim).reshape(dim, dim).T.reshape(-1)
    c[:, n_components:] = coeffs.conj()[swap]
    return full_f, c


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf, 2.7])
def test_python_kernel_matches_direct_eigensolve(rng, p):
    dim = 2
    freqs, coeffs = random_components(rng, dim, 6)
    times = np.linspace(0.0, 4.0, 37)
    got = _speed_kernel_py.derivative_norms(freqs, coeffs, times, p, dim)
    for k, t in enumerate(times):
        m = (coeffs @ np.exp(-1j * freqs * t)).reshape(dim, dim)
        lam = np.abs(np.linalg.eigvalsh((m + m.conj().T) / 2))
        if p == 1:
            expect = lam.sum()
        elif math.isinf(p):
            expect = lam.max()
        else:
            expect = (lam**p).sum() ** (1 / p)
        assert got[k] == pytest.approx(expect, abs=1e-12)


def test_python_kernel_general_dimension(rng):
    dim = 3
    freqs, coeffs = random_components(rng, dim, 5)
    times = np.linspace(0.0, 2.0, 11)
    got = _speed_kernel_py.derivative_norms(freqs, coeffs, times, 2.0, dim)
    for k, t in enumerate(times):
        m = (coeffs @ np.exp(-1j * freqs * t)).reshape(dim, dim)
        expect = np.linalg.norm(np.abs(np.linalg.eigvalsh((m + m.conj().T) / 2)))
        assert got[k] == pytest.approx(expect, abs=1e-12)


@pytest.mark.skipif(not kernels.HAVE_COMPILED, reason="compiled kernel not built")
@pytest.mark.parametrize("p", [1.0, 2.0, math.inf, 3.3])
def test_compiled_matches_python(rng, p):
    from autotherm import _speed_kernel
    freqs, coeffs = random_components(rng, 2, 8)
    times = np.linspace(0.0, 7.0, 101)
    fast = _speed_kernel.derivative_norms(freqs, coeffs, times, float(p), 2)
    slow = _speed_kernel_py.derivative_norms(freqs, coeffs, times, p, 2)
    assert np.abs(fast - slow).max() <= 1e-13


@pytest.mark.skipif(not kernels.HAVE_COMPILED, reason="compiled kernel not built")
def test_env_var_forces_python(monkeypatch):
    monkeypatch.setenv("AUTOTHERM_PURE_PYTHON", "1")
    assert kernels.active_kernel_name() == "python"
    monkeypatch.setenv("AUTOTHERM_PURE_PYTHON", "0")
    assert kernels.active_kernel_name() == "compiled"


def test_dispatcher_handles_non_qubit(rng):
    freqs, coeffs = random_components(rng, 3, 4)
    times = np.linspace(0.0, 1.0, 5)
    out = kernels.derivative_norms(freqs, coeffs, times, 1.0, 3)
    assert out.shape == times.shape
    assert (out >= 0).all()
