"""Two-particle curve densities: three marginals per context θ."""

import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cqm import (
    Grid1D,
    GridMismatch,
    InterpolationLoss,
    RepresentationMismatch,
    UnitsParams,
    WaveFunction2D,
    ZeroNorm,
    compare_densities_2d,
    gaussian_packet,
    marginals_2d,
    momentum_representation_2d,
    product_state_2d,
    rotate_coords_2d,
    rotated_representations,
    sho_eigenstate,
    superpose_2d,
    transport_density_2d,
)

N2D = 256


@pytest.fixture(scope="module")
def grid2():
    return Grid1D(-10.0, 10.0, N2D)


@pytest.fixture(scope="module")
def vacuum2(grid2):
    v0 = sho_eigenstate(0, grid2)
    return product_state_2d(v0, v0)


@pytest.fixture(scope="module")
def excited2(grid2):
    return product_state_2d(sho_eigenstate(1, grid2),
                            sho_eigenstate(0, grid2))


@pytest.fixture(scope="module")
def excited2_curve0(excited2):
    return transport_density_2d(excited2, 0.0)


class TestRotateCoords:
    def test_zero_identity(self):
        assert rotate_coords_2d(1.3, -0.4, 0.0) == (1.3, -0.4)

    def test_quarter_turn(self):
        assert_allclose(rotate_coords_2d(1.0, 0.0, np.pi / 2),
                        (0.0, -1.0), atol=1e-12)

    def test_norm_preserved(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            a, b, t = rng.uniform(-4.0, 4.0, size=3)
            ar, br = rotate_coords_2d(a, b, t)
            assert abs(ar * ar + br * br - (a * a + b * b)) < 1e-10


class TestStates2D:
    def test_product_normalized(self, grid2, vacuum2):
        w = grid2.weights
        mass = float(w @ np.abs(vacuum2.amplitudes) ** 2 @ w)
        assert abs(mass - 1.0) < 1e-10

    def test_shape_validated(self, grid2):
        with pytest.raises(ValueError):
            WaveFunction2D((grid2, grid2),
                           np.zeros((4, 4), dtype=complex),
                           ("position", "position"), UnitsParams())

    def test_superpose_2d(self, grid2, excited2):
        other = product_state_2d(sho_eigenstate(0, grid2),
                                 sho_eigenstate(1, grid2))
        s = superpose_2d([excited2, other], [1.0, 1.0])
        w = grid2.weights
        assert abs(float(w @ np.abs(s.amplitudes) ** 2 @ w) - 1.0) < 1e-10
        with pytest.raises(ZeroNorm):
            superpose_2d([excited2, excited2], [1.0, -1.0])
        with pytest.raises(ValueError):
            superpose_2d([excited2, other], [1.0])

    def test_units_must_match(self, grid2):
        a = sho_eigenstate(0, grid2)
        b = sho_eigenstate(0, grid2, UnitsParams(omega=2.0))
        with pytest.raises(GridMismatch):
            product_state_2d(a, b)

    def test_momentum_representation_2d(self, grid2, excited2):
        phi = momentum_representation_2d(excited2)
        w = grid2.weights
        assert abs(float(w @ np.abs(phi.amplitudes) ** 2 @ w) - 1.0) < 1e-8
        with pytest.raises(RepresentationMismatch):
            momentum_representation_2d(phi)


class TestRotatedRepresentations:
    def test_zero_angle_closed_forms(self, grid2, excited2):
        pos, mix, mom = rotated_representations(excited2, 0.0)
        x1 = grid2.points[:, None]
        x2 = grid2.points[None, :]
        exact = (2.0 / np.sqrt(np.pi)) * x1 ** 2 * np.exp(-x1 ** 2) \
            * np.exp(-x2 ** 2) / np.sqrt(np.pi)
        assert np.max(np.abs(pos.values - exact)) < 1e-10
        # |φ₁| is Fourier-invariant: the mixed and momentum densities match
        assert np.max(np.abs(mix.values - exact)) < 1e-10
        assert np.max(np.abs(mom.values - exact)) < 1e-10

    def test_half_pi_swaps_axes(self, grid2, excited2):
        pos0, _, _ = rotated_representations(excited2, 0.0)
        pos1, _, _ = rotated_representations(excited2, np.pi / 2)
        # (x1,x2) -> (x2,-x1); densities are even in each variable here
        assert np.max(np.abs(pos1.values - pos0.values.T)) < 1e-10

    def test_densities_normalized(self, grid2, vacuum2):
        w = grid2.weights
        for d in rotated_representations(vacuum2, np.pi / 5):
            assert abs(float(w @ d.values @ w) - 1.0) < 1e-3

    def test_mass_outside_window_rejected(self, grid2):
        corner = product_state_2d(gaussian_packet(7.0, 0.0, 0.3, grid2),
                                  gaussian_packet(7.0, 0.0, 0.3, grid2))
        with pytest.raises(InterpolationLoss):
            rotated_representations(corner, np.pi / 4)


class TestTransportMaps:
    def test_vacuum_identity_at_zero_angle(self, vacuum2):
        c = transport_density_2d(vacuum2, 0.0)
        live = c.weights > 1e-12
        assert np.max(np.abs(c.p1 - c.x1)[live]) < 1e-6
        assert np.max(np.abs(c.p2 - c.x2)[live]) < 1e-6

    def test_vacuum_identity_generic_angle(self, vacuum2):
        # rotation-invariant state: identity map up to resampling noise
        c = transport_density_2d(vacuum2, np.pi / 5)
        assert float(np.sum(c.weights * np.abs(c.p1 - c.x1))) < 2e-3
        assert float(np.sum(c.weights * np.abs(c.p2 - c.x2))) < 2e-3
        live = c.weights > 1e-6
        assert np.max(np.abs(c.p1 - c.x1)[live]) < 1e-2
        assert np.max(np.abs(c.p2 - c.x2)[live]) < 1e-2

    def test_excited_identity_at_zero_angle(self, excited2_curve0):
        c = excited2_curve0
        live = c.weights > 1e-12
        assert np.max(np.abs(c.p1 - c.x1)[live]) < 1e-6
        assert np.max(np.abs(c.p2 - c.x2)[live]) < 1e-6

    def test_weights_normalized(self, excited2_curve0):
        assert abs(excited2_curve0.weights.sum() - 1.0) < 1e-9

    def test_theta_dependence(self, excited2, excited2_curve0):
        # the θ=0 and θ=π/6 curves are genuinely different contexts
        c6 = transport_density_2d(excited2, np.pi / 6)
        both = (excited2_curve0.weights > 1e-12) & (c6.weights > 1e-12)
        gap = np.max(np.abs(excited2_curve0.p1 - c6.p1)[both])
        assert gap > 0.05

    def test_curve_validation(self, excited2_curve0):
        with pytest.raises(ValueError):
            dataclasses.replace(excited2_curve0,
                                weights=-excited2_curve0.weights)
        with pytest.raises(ValueError):
            dataclasses.replace(excited2_curve0,
                                p1=-excited2_curve0.p1)


class TestMarginals:
    def test_excited_zero_angle(self, grid2, excited2, excited2_curve0):
        quantum = rotated_representations(excited2, 0.0)
        pushed = marginals_2d(excited2_curve0)
        for got, want in zip(pushed, quantum):
            assert compare_densities_2d(got, want) < 5e-3

    def test_momentum_marginal_closed_form(self, grid2, excited2,
                                           excited2_curve0):
        # (p₁,p₂) marginal at θ=0: (2/√π) p₁² e^{-p₁²} · e^{-p₂²}/√π
        _, _, mom = marginals_2d(excited2_curve0)
        p1 = grid2.points[:, None]
        p2 = grid2.points[None, :]
        exact = (2.0 / np.sqrt(np.pi)) * p1 ** 2 * np.exp(-p1 ** 2) \
            * np.exp(-p2 ** 2) / np.sqrt(np.pi)
        w = grid2.weights
        l1 = float(w @ np.abs(mom.values - exact) @ w)
        assert l1 < 5e-3

    def test_vacuum_generic_angle(self, grid2, vacuum2):
        c = transport_density_2d(vacuum2, np.pi / 5)
        quantum = rotated_representations(vacuum2, np.pi / 5)
        for got, want in zip(marginals_2d(c), quantum):
            assert compare_densities_2d(got, want) < 5e-3
