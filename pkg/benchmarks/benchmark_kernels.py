#!/usr/bin/env python3
"""Compare the compiled derivative-norm kernel against the numpy fallback.

Times the raw kernel on batched evaluations and a full adaptive-quadrature
averaged-norm computation, which is the hot path of every parameter sweep.

Run from the repository root:

    python benchmarks/benchmark_kernels.py
"""

import os
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from autotherm import builtin_scenario  # noqa: E402
from autotherm.dynamics import evolution_for  # noqa: E402
from autotherm.quadrature import QuadratureConfig  # noqa: E402
from autotherm.speed_limits import time_averaged_norm  # noqa: E402
from autotherm import kernels  # noqa: E402


def time_call(fn, repeat: int = 5) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    if not kernels.HAVE_COMPILED:
        print("compiled kernel not built; run 'python setup.py build_ext --inplace'")
    scenario = builtin_scenario("cmaybe", theta=1.0)
    ev = evolution_for(scenario)
    times = np.linspace(0.0, 6.0, 4096)
    cfg = QuadratureConfig(abs_tol=1e-11, rel_tol=1e-11)

    def batch():
        ev.derivative_norms("system", times, 1.0)
        ev.derivative_norms("memory", times, 1.0)

    def sweep():
        for tau in np.linspace(0.4, 6.0, 24):
            time_averaged_norm(scenario, "system", 1.0, float(tau), cfg)
            time_averaged_norm(scenario, "memory", 1.0, float(tau), cfg)

    rows = []
    for mode, env in (("python", "1"), ("compiled", "0")):
        if mode == "compiled" and not kernels.HAVE_COMPILED:
            continue
        os.environ["AUTOTHERM_PURE_PYTHON"] = env
        assert kernels.active_kernel_name() == mode
        rows.append((mode, time_call(batch), time_call(sweep)))
    os.environ.pop("AUTOTHERM_PURE_PYTHON", None)

    print(f"{'kernel':<10} {'batch 2x4096 norms':>20} {'24-point norm sweep':>20}")
    for mode, t_batch, t_sweep in rows:
        print(f"{mode:<10} {t_batch * 1e3:>17.2f} ms {t_sweep * 1e3:>17.2f} ms")
    if len(rows) == 2:
        print(f"{'speedup':<10} {rows[0][1] / rows[1][1]:>18.2f}x "
              f"{rows[0][2] / rows[1][2]:>18.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
