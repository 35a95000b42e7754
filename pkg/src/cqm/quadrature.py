"""Rotated-quadrature representations.

For X(θ) = cos θ · x + sin θ · p/(mω) the transform to the X(θ)
eigenbasis solves

    X ⟨x|X(θ)⟩ = x cos θ ⟨x|X(θ)⟩ - iħ (sin θ / mω) ∂_x ⟨x|X(θ)⟩,

giving the oscillatory kernel

    ⟨X|x⟩ = √(mω / 2πħ|sin θ|) · exp[ i (mω/ħ) ( (x² + X²) cot θ / 2
                                                  - x X / sin θ ) ]

up to a θ-dependent global phase (library contract covers moduli only).
θ = 0 is the identity and θ = π a parity flip; inside the |sin θ| < 1e-3
band around those angles the direct kernel aliases on any finite grid,
so the transform is composed as U(θ) = U(θ - π/2) ∘ U(π/2), both factors
being far from singular.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import (Density1D, Grid1D, Representation, UnitsParams,
                   WaveFunction)
from .errors import RepresentationMismatch

SIN_BAND = 1e-3
_TWO_PI = 2.0 * np.pi


def reduce_angle(theta: float) -> float:
    """Reduce an angle to [0, 2π)."""
    t = float(theta) % _TWO_PI
    if t < 0.0 or t >= _TWO_PI:  # guard the t == 2π rounding corner
        t = 0.0
    return t


@dataclass(frozen=True)
class QuadratureContext:
    """A rotation angle θ (reduced mod 2π) together with its units."""

    theta: float
    units: UnitsParams = field(default_factory=UnitsParams)

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", reduce_angle(self.theta))


def rotate_phase_point(x: float, p: float, theta: float,
                       units: UnitsParams | None = None) -> tuple[float, float]:
    """Rotate a phase-space point into (X(θ), P(θ)).

    The rotation acts on the rescaled pair (x, p/(mω)):
        X(θ)      =  cos θ · x + sin θ · p/(mω)
        P(θ)/(mω) = -sin θ · x + cos θ · p/(mω)
    """
    units = units or UnitsParams()
    c, s = np.cos(theta), np.sin(theta)
    pm = p / units.mw
    return (c * x + s * pm, units.mw * (-s * x + c * pm))


def _kernel_values(amps: np.ndarray, grid: Grid1D, targets: np.ndarray,
                   theta: float, units: UnitsParams) -> np.ndarray:
    """Direct oscillatory-kernel evaluation at arbitrary targets."""
    mw_h = units.mw / units.hbar
    sin_t = np.sin(theta)
    a = 0.5 * mw_h / np.tan(theta)
    b = mw_h / sin_t
    g = amps * grid.weights * np.exp(1j * a * grid.points ** 2)
    out = _kernels.chirp_transform(np.ascontiguousarray(g), grid.points,
                                   np.ascontiguousarray(targets,
                                                        dtype=np.float64),
                                   a, b)
    return out * np.sqrt(mw_h / (_TWO_PI * abs(sin_t)))


def _interp_complex(targets: np.ndarray, grid: Grid1D,
                    amps: np.ndarray) -> np.ndarray:
    re = np.interp(targets, grid.points, amps.real, left=0.0, right=0.0)
    im = np.interp(targets, grid.points, amps.imag, left=0.0, right=0.0)
    return re + 1j * im


def _amplitudes_at(psi: WaveFunction, theta: float,
                   targets: np.ndarray) -> np.ndarray:
    """⟨X(θ)|ψ⟩ at arbitrary quadrature values (θ already reduced)."""
    if theta == 0.0:
        return _interp_complex(targets, psi.grid, psi.amplitudes)
    if theta == np.pi:
        return _interp_complex(-np.asarray(targets, dtype=np.float64),
                               psi.grid, psi.amplitudes)
    if abs(np.sin(theta)) < SIN_BAND:
        half = _kernel_values(psi.amplitudes, psi.grid, psi.grid.points,
                              0.5 * np.pi, psi.units)
        return _kernel_values(half, psi.grid, targets,
                              reduce_angle(theta - 0.5 * np.pi), psi.units)
    return _kernel_values(psi.amplitudes, psi.grid, targets, theta, psi.units)


def quadrature_transform(psi: WaveFunction, theta: float,
                         out_grid: Grid1D | None = None) -> WaveFunction:
    """Transform a position-representation state to the X(θ) eigenbasis.

    Output lives on ``out_grid`` (default: the input grid).  Unitarity is
    inherited from the continuum kernel; no renormalization is applied,
    so the output norm is itself a quadrature-accuracy diagnostic.
    """
    if psi.representation.kind != "position":
        raise RepresentationMismatch(
            f"quadrature_transform expects a position-representation state, "
            f"got {psi.representation.kind}")
    t = reduce_angle(theta)
    grid = out_grid or psi.grid
    rep = Representation("quadrature", t)
    if t == 0.0 and grid == psi.grid:
        return WaveFunction(grid, psi.amplitudes, psi.units, rep)
    if t == np.pi and grid == psi.grid and _symmetric(grid):
        return WaveFunction(grid, psi.amplitudes[::-1].copy(), psi.units, rep)
    amps = _amplitudes_at(psi, t, grid.points)
    return WaveFunction(grid, amps, psi.units, rep)


def _symmetric(grid: Grid1D) -> bool:
    return abs(grid.min + grid.max) <= 1e-12 * (grid.max - grid.min)


def quadrature_density(psi: WaveFunction, theta: float,
                       out_grid: Grid1D | None = None) -> Density1D:
    """|⟨X(θ)|ψ⟩|² on the output grid."""
    psi_t = quadrature_transform(psi, theta, out_grid)
    return Density1D(psi_t.grid, np.abs(psi_t.amplitudes) ** 2)


def quadrature_value_at_zero(psi: WaveFunction, theta: float) -> float:
    """|⟨X(θ) = 0|ψ⟩|², evaluated exactly at X = 0.

    The default grid has an even node count, so X = 0 is not a node;
    the kernel paths evaluate the transform integral at X = 0 directly
    and the identity/parity paths interpolate the amplitude (odd states
    interpolate to zero between symmetric nodes, as they should).
    """
    amp = _amplitudes_at(psi, reduce_angle(theta), np.array([0.0]))
    return float(np.abs(amp[0]) ** 2)


def excited_quadrature_density_exact(grid: Grid1D,
                                     units: UnitsParams | None = None
                                     ) -> Density1D:
    """Closed-form |⟨X(θ)|first excited state⟩|²; θ-independent.

    √(mω/πħ) · (2mω/ħ) · X² · exp(-mω X² / ħ).
    """
    units = units or UnitsParams()
    mw_h = units.mw / units.hbar
    X = grid.points
    vals = np.sqrt(mw_h / np.pi) * 2.0 * mw_h * X ** 2 * np.exp(-mw_h * X ** 2)
    return Density1D(grid, vals)
