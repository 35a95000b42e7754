"""Timing comparison: compiled kernels vs the pure-numpy fallback.

Runs the three hot kernels on representative workloads and prints a
small table of per-call times and speedups.  Usage:

    python3 benchmarks/bench_kernels.py [--repeat N]

The compiled extension must be built (it is, for a normal editable
install); the fallback is imported directly so both backends run in
one process regardless of CQM_KERNEL_BACKEND.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cqm._kernels import _fallback

try:
    from cqm._kernels import _native
except ImportError:
    _native = None


def _time(fn, *args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads():
    rng = np.random.default_rng(7)
    n = 1024
    x = np.linspace(-10.0, 10.0, n)
    g = (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    yield ("chirp_transform  (n=1024)",
           lambda impl: impl.chirp_transform(g, x, x, 0.7, 1.3))

    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    psi /= np.linalg.norm(psi)
    yield ("wigner_correlation (n=1024)",
           lambda impl: impl.wigner_correlation(psi))

    nsteps = 400
    frames = rng.standard_normal((2 * nsteps + 1, n))
    x0 = np.linspace(-3.0, 3.0, 64)
    yield ("rk4_paths (64 paths, 400 steps)",
           lambda impl: impl.rk4_paths(x0, frames, -10.0, 20.0 / (n - 1),
                                       1e-3))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions; best time is reported")
    args = parser.parse_args()

    print(f"{'kernel':34s} {'fallback':>12s} {'native':>12s} "
          f"{'speedup':>8s}")
    for name, call in _workloads():
        t_fb = _time(call, _fallback, repeat=args.repeat)
        if _native is None:
            print(f"{name:34s} {t_fb * 1e3:9.2f} ms {'absent':>12s}")
            continue
        t_nat = _time(call, _native, repeat=args.repeat)
        print(f"{name:34s} {t_fb * 1e3:9.2f} ms {t_nat * 1e3:9.2f} ms "
              f"{t_fb / t_nat:7.1f}x")


if __name__ == "__main__":
    main()
