"""Native extension vs pure-Python fallback: identical numerics."""

import importlib

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cqm._kernels import _fallback

_native = None
try:
    _native = importlib.import_module("cqm._kernels._native")
except ImportError:
    pass

needs_native = pytest.mark.skipif(_native is None,
                                  reason="compiled kernels not built")


def _chirp_case(rng, n):
    g = rng.normal(size=n) + 1j * rng.normal(size=n)
    x = np.linspace(-8.0, 8.0, n)
    return g, x, x.copy(), rng.uniform(0.3, 2.0), rng.uniform(-1.0, 1.0)


@needs_native
class TestParity:
    def test_chirp_transform(self):
        rng = np.random.default_rng(3)
        for n in (64, 257, 1024):
            g, x, xo, a, b = _chirp_case(rng, n)
            got = _native.chirp_transform(g, x, xo, a, b)
            ref = _fallback.chirp_transform(g, x, xo, a, b)
            assert_allclose(got, ref, rtol=1e-10, atol=1e-12)

    def test_wigner_correlation(self):
        rng = np.random.default_rng(5)
        for n in (64, 255):
            psi = rng.normal(size=n) + 1j * rng.normal(size=n)
            got = _native.wigner_correlation(psi)
            ref = _fallback.wigner_correlation(psi)
            assert got.shape == ref.shape == (n, 2 * n - 1)
            assert_allclose(got, ref, rtol=1e-10, atol=1e-12)

    def test_rk4_paths(self):
        rng = np.random.default_rng(7)
        n, nsteps = 128, 40
        frames = rng.normal(size=(2 * nsteps + 1, n))
        x0 = rng.uniform(-3.0, 3.0, size=16)
        got_p, got_e = _native.rk4_paths(x0, frames, -8.0, 16.0 / (n - 1),
                                         0.01)
        ref_p, ref_e = _fallback.rk4_paths(x0, frames, -8.0, 16.0 / (n - 1),
                                           0.01)
        assert_allclose(got_p, ref_p, rtol=1e-12, atol=1e-12)
        assert np.array_equal(got_e, ref_e)


class TestBackendSelection:
    def test_backend_reported(self):
        import cqm
        assert cqm.kernel_backend in ("native", "fallback")

    def test_env_override(self):
        # a fresh import honours CQM_KERNEL_BACKEND=fallback
        import os, subprocess, sys
        env = dict(os.environ, CQM_KERNEL_BACKEND="fallback")
        out = subprocess.run(
            [sys.executable, "-c",
             "import cqm; print(cqm.kernel_backend)"],
            capture_output=True, text=True, env=env)
        assert out.stdout.strip() == "fallback"


class TestEscapeFlag:
    def test_runaway_velocity_flags_escape(self):
        n, nsteps = 64, 10
        frames = np.full((2 * nsteps + 1, n), 50.0)
        paths, escaped = _fallback.rk4_paths(
            np.array([0.0]), frames, -8.0, 16.0 / (n - 1), 0.1)
        assert escaped[0] >= 0
        assert paths.shape == (1, nsteps + 1)
        # escaped paths are clamped, not NaN
        assert np.all(np.isfinite(paths))
