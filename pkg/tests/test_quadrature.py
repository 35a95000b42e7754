"""Quadrature (tomogram) transform X(θ) = x cosθ + p sinθ/(mω)."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cqm import (
    excited_quadrature_density_exact,
    momentum_representation,
    quadrature_density,
    quadrature_transform,
    quadrature_value_at_zero,
    reduce_angle,
    rotate_phase_point,
    sho_eigenstate,
)

FIVE_ANGLES = (np.pi / 6, np.pi / 3, np.pi / 4, 2 * np.pi / 3, 5 * np.pi / 6)


class TestClosedForm:
    @pytest.mark.parametrize("theta", FIVE_ANGLES)
    def test_first_excited_tomogram(self, grid, psi1, theta):
        # |⟨X(θ)|ψ₁⟩|² = (2/√π) X² e^{-X²}, independent of θ
        exact = excited_quadrature_density_exact(grid)
        got = quadrature_density(psi1, theta)
        assert np.max(np.abs(got.values - exact.values)) < 1e-6

    def test_vacuum_invariance(self, grid, psi0):
        ref = np.abs(psi0.amplitudes) ** 2
        for theta in (0.3, 1.1, 2.5, 4.2):
            got = quadrature_density(psi0, theta)
            assert np.max(np.abs(got.values - ref)) < 1e-10


class TestUnitarity:
    def test_norm_preserved(self, grid, superposition):
        for k in range(24):
            q = quadrature_transform(superposition, k * np.pi / 12)
            norm2 = np.dot(grid.weights, np.abs(q.amplitudes) ** 2)
            assert abs(norm2 - 1.0) < 1e-6


class TestSpecialAngles:
    def test_zero_is_identity(self, superposition):
        q = quadrature_transform(superposition, 0.0)
        assert np.max(np.abs(q.amplitudes
                             - superposition.amplitudes)) < 1e-12

    def test_pi_is_parity(self, superposition):
        q = quadrature_transform(superposition, np.pi)
        assert np.max(np.abs(np.abs(q.amplitudes)
                             - np.abs(superposition.amplitudes[::-1]))) < 1e-10

    def test_half_pi_is_momentum(self, grid, superposition):
        q = quadrature_transform(superposition, np.pi / 2)
        phi = momentum_representation(superposition, grid)
        assert np.max(np.abs(np.abs(q.amplitudes)
                             - np.abs(phi.amplitudes))) < 1e-6


class TestZeroOfExcitedState:
    def test_vanishes_at_origin_for_all_angles(self, psi1):
        # ψ₁ tomograms share the node at X = 0 in every context
        for k in range(24):
            assert quadrature_value_at_zero(psi1, k * np.pi / 12) < 1e-8


class TestPhasePointRotation:
    def test_quarter_turn(self):
        assert_allclose(rotate_phase_point(1.0, 0.0, np.pi / 2),
                        (0.0, -1.0), atol=1e-12)

    def test_eighth_turn(self):
        assert_allclose(rotate_phase_point(1.0, 1.0, np.pi / 4),
                        (np.sqrt(2.0), 0.0), atol=1e-12)

    def test_composition(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            x, p, a, b = rng.uniform(-3.0, 3.0, size=4)
            one = rotate_phase_point(*rotate_phase_point(x, p, a), b)
            two = rotate_phase_point(x, p, a + b)
            assert_allclose(one, two, atol=1e-12)

    def test_norm_preserved(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            x, p, t = rng.uniform(-4.0, 4.0, size=3)
            xr, pr = rotate_phase_point(x, p, t)
            assert abs(xr * xr + pr * pr - (x * x + p * p)) < 1e-10


class TestAngleReduction:
    def test_reduce_angle_period(self):
        assert_allclose(reduce_angle(2 * np.pi + 0.3), 0.3, atol=1e-12)
        assert_allclose(reduce_angle(-0.3), 2 * np.pi - 0.3, atol=1e-12)

    def test_transform_periodic(self, grid, psi1):
        a = quadrature_density(psi1, np.pi / 5)
        b = quadrature_density(psi1, np.pi / 5 + 2 * np.pi)
        assert np.max(np.abs(a.values - b.values)) < 1e-9
