"""Pure-numpy implementations of the hot kernels.

Same call signatures as the compiled module ``_native``; one of the two
is selected at import time by :mod:`cqm._kernels`.  These versions favor
clarity: the oscillatory transform materializes the full phase matrix,
the trajectory integrator loops over time steps in Python with the
per-step work vectorized over trajectories.
"""

from __future__ import annotations

import numpy as np

BACKEND = "fallback"


def chirp_transform(g: np.ndarray, x: np.ndarray, X: np.ndarray,
                    a: float, b: float) -> np.ndarray:
    """out[j] = exp(i a X[j]^2) * sum_k exp(-i b X[j] x[k]) g[k].

    ``g`` carries the input-side chirp and quadrature weights; the caller
    applies any overall modulus factor.
    """
    g = np.ascontiguousarray(g, dtype=np.complex128)
    phase = np.exp(-1j * b * np.outer(X, x))
    out = phase @ g
    out *= np.exp(1j * a * np.asarray(X) ** 2)
    return out


def wigner_correlation(psi: np.ndarray) -> np.ndarray:
    """C[i, n-1+j] = conj(psi[i+j]) * psi[i-j], zero where i+-j leaves the grid."""
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    n = psi.shape[0]
    corr = np.zeros((n, 2 * n - 1), dtype=np.complex128)
    for j in range(-(n - 1), n):
        i0, i1 = abs(j), n - 1 - abs(j)
        if i0 > i1:
            continue
        corr[i0:i1 + 1, n - 1 + j] = (np.conj(psi[i0 + j:i1 + 1 + j])
                                      * psi[i0 - j:i1 + 1 - j])
    return corr


def _lerp_frame(frame: np.ndarray, pos: np.ndarray, lo: float,
                step: float) -> np.ndarray:
    n = frame.shape[0]
    t = np.clip((pos - lo) / step, 0.0, n - 1.000000000001)
    i = t.astype(np.intp)
    f = t - i
    return frame[i] * (1.0 - f) + frame[i + 1] * f


def rk4_paths(x0: np.ndarray, frames: np.ndarray, lo: float, step: float,
              dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Integrate dx/dt = v(x, t) with classic RK4.

    ``frames`` holds the velocity field sampled on the spatial grid at
    times t_r and the half-step midpoints, interleaved: frames[2r] is
    t_r, frames[2r+1] is t_r + dt/2.  Returns (paths, escaped_at) where
    escaped_at[i] is the first step index at which trajectory i left the
    grid, or -1.  Escaped trajectories are clamped and kept integrating
    so output shapes stay deterministic.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    nsteps = (frames.shape[0] - 1) // 2
    n = frames.shape[1]
    hi = lo + step * (n - 1)
    paths = np.empty((x0.shape[0], nsteps + 1), dtype=np.float64)
    paths[:, 0] = x0
    escaped = np.full(x0.shape[0], -1, dtype=np.int64)
    x = np.clip(x0, lo, hi)
    for r in range(nsteps):
        f0, fm, f1 = frames[2 * r], frames[2 * r + 1], frames[2 * r + 2]
        k1 = _lerp_frame(f0, x, lo, step)
        k2 = _lerp_frame(fm, x + 0.5 * dt * k1, lo, step)
        k3 = _lerp_frame(fm, x + 0.5 * dt * k2, lo, step)
        k4 = _lerp_frame(f1, x + dt * k3, lo, step)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out = (x < lo) | (x > hi)
        np.copyto(escaped, r + 1, where=out & (escaped < 0))
        x = np.clip(x, lo, hi)
        paths[:, r + 1] = x
    return paths, escaped
