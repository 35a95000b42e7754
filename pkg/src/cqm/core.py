"""Core state types on a uniform 1D grid.

Wavefunctions are complex amplitude arrays over a uniform grid, tagged
with physical units (ħ, m, ω) and a representation label.  The momentum
representation uses the symmetric continuum normalization

    φ(p) = (2πħ)^(-1/2) ∫ exp(-i p x / ħ) ψ(x) dx,

so position and momentum densities are both probability densities with
respect to dx and dp and Parseval holds without extra factors.  All
integrals are trapezoid rules on the grid; oscillator eigenstates come
from the stable three-term recurrence on *normalized* Hermite functions
(raw Hermite polynomials overflow long before n = 30).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import (GridMismatch, GridTooNarrow, RepresentationMismatch,
                     ZeroNorm)

MAX_EIGENSTATE = 30
_BOUNDARY_AMP = 1e-10
_NORM_TOL = 1e-6
_DENSITY_TOL = 1e-4


def trapezoid_weights(n: int, step: float) -> np.ndarray:
    """Trapezoid quadrature weights for n uniformly spaced nodes."""
    w = np.full(n, step)
    w[0] = w[-1] = 0.5 * step
    return w


@dataclass(frozen=True)
class UnitsParams:
    """Physical constants; defaults are natural units ħ = m = ω = 1."""

    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0

    def __post_init__(self) -> None:
        for name in ("hbar", "mass", "omega"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")

    @property
    def mw(self) -> float:
        """m·ω, the scale that converts momentum to quadrature length."""
        return self.mass * self.omega


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of n nodes on [min, max], step (max - min)/(n - 1)."""

    min: float
    max: float
    n: int

    def __post_init__(self) -> None:
        if not self.max > self.min:
            raise ValueError("grid max must exceed min")
        if self.n < 8:
            raise ValueError("grid needs at least 8 nodes")

    @cached_property
    def points(self) -> np.ndarray:
        pts = np.linspace(self.min, self.max, self.n)
        pts.setflags(write=False)
        return pts

    @property
    def step(self) -> float:
        return (self.max - self.min) / (self.n - 1)

    @cached_property
    def weights(self) -> np.ndarray:
        w = trapezoid_weights(self.n, self.step)
        w.setflags(write=False)
        return w


@dataclass(frozen=True)
class Representation:
    """Which observable's eigenbasis the amplitudes refer to."""

    kind: str  # "position" | "momentum" | "quadrature"
    theta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("position", "momentum", "quadrature"):
            raise ValueError(f"unknown representation {self.kind!r}")
        if (self.kind == "quadrature") != (self.theta is not None):
            raise ValueError("theta is set iff kind is 'quadrature'")


POSITION = Representation("position")
MOMENTUM = Representation("momentum")


@dataclass(frozen=True)
class WaveFunction:
    """Normalized complex amplitudes on a grid; immutable after construction."""

    grid: Grid1D
    amplitudes: np.ndarray
    units: UnitsParams = field(default_factory=UnitsParams)
    representation: Representation = POSITION

    def __post_init__(self) -> None:
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.grid.n,):
            raise ValueError("amplitude array does not match grid")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        norm2 = self.norm_squared()
        if abs(norm2 - 1.0) > _NORM_TOL:
            raise ValueError(f"state not normalized: |psi|^2 = {norm2!r}")

    def norm_squared(self) -> float:
        return float(np.dot(self.grid.weights,
                            np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class Density1D:
    """Nonnegative density integrating to one on its grid.

    ``point_mass`` marks densities produced by pushing an entire curve
    into a single grid step; their shape is a deposition artifact and
    only the location carries meaning.
    """

    grid: Grid1D
    values: np.ndarray
    point_mass: bool = False

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.n,):
            raise ValueError("density array does not match grid")
        if np.any(vals < -1e-12):
            raise ValueError("density has negative values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        total = float(np.dot(self.grid.weights, vals))
        if abs(total - 1.0) > _DENSITY_TOL:
            raise ValueError(f"density integrates to {total!r}, not 1")


def _normalized(amps: np.ndarray, grid: Grid1D) -> np.ndarray:
    norm2 = float(np.dot(grid.weights, np.abs(amps) ** 2))
    if norm2 < 1e-12:
        raise ZeroNorm("amplitudes have (numerically) zero norm")
    return amps / np.sqrt(norm2)


def _check_boundary(amps: np.ndarray) -> None:
    edge = max(abs(amps[0]), abs(amps[-1]))
    if edge > _BOUNDARY_AMP:
        raise GridTooNarrow(
            f"boundary amplitude {edge:.3e} exceeds {_BOUNDARY_AMP:.0e}; "
            "widen the grid")


def hermite_functions(xi: np.ndarray, nmax: int) -> np.ndarray:
    """Normalized Hermite functions h_0..h_nmax evaluated at ξ.

    h_n(ξ) = (2^n n! √π)^(-1/2) H_n(ξ) exp(-ξ²/2) via the recurrence
    h_n = ξ √(2/n) h_{n-1} - √((n-1)/n) h_{n-2}, which stays O(1).
    """
    out = np.empty((nmax + 1, xi.shape[0]))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi ** 2)
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * xi * out[0]
    for n in range(2, nmax + 1):
        out[n] = (np.sqrt(2.0 / n) * xi * out[n - 1]
                  - np.sqrt((n - 1) / n) * out[n - 2])
    return out


def sho_eigenstate(n: int, grid: Grid1D,
                   units: UnitsParams | None = None) -> WaveFunction:
    """n-th harmonic-oscillator eigenstate on the grid."""
    if not 0 <= n <= MAX_EIGENSTATE:
        raise ValueError(f"eigenstate index must be in [0, {MAX_EIGENSTATE}]")
    units = units or UnitsParams()
    scale = np.sqrt(units.mw / units.hbar)
    xi = scale * grid.points
    h = hermite_functions(xi, n)[n]
    amps = np.sqrt(scale) * h.astype(np.complex128)
    _check_boundary(amps)
    return WaveFunction(grid, _normalized(amps, grid), units, POSITION)


def gaussian_packet(x0: float, p0: float, sigma: float, grid: Grid1D,
                    units: UnitsParams | None = None) -> WaveFunction:
    """Gaussian packet with position mean x0, std sigma, momentum mean p0."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    units = units or UnitsParams()
    x = grid.points
    amps = np.exp(-((x - x0) ** 2) / (4.0 * sigma ** 2)
                  + 1j * p0 * x / units.hbar)
    amps = amps.astype(np.complex128) * (2.0 * np.pi * sigma ** 2) ** -0.25
    _check_boundary(amps)
    return WaveFunction(grid, _normalized(amps, grid), units, POSITION)


def superpose(states: list[WaveFunction] | tuple[WaveFunction, ...],
              coefficients) -> WaveFunction:
    """Normalized linear combination of states on a common grid."""
    if len(states) == 0 or len(states) != len(coefficients):
        raise ValueError("need one coefficient per state")
    first = states[0]
    for s in states[1:]:
        if s.grid != first.grid:
            raise GridMismatch("superposition operands on different grids")
        if s.representation != first.representation:
            raise GridMismatch("superposition operands in different "
                               "representations")
        if s.units != first.units:
            raise GridMismatch("superposition operands with different units")
    amps = np.zeros(first.grid.n, dtype=np.complex128)
    for c, s in zip(coefficients, states):
        amps += complex(c) * s.amplitudes
    return WaveFunction(first.grid, _normalized(amps, first.grid),
                        first.units, first.representation)


def inner_product(a: WaveFunction, b: WaveFunction) -> complex:
    """Trapezoid approximation of <a|b>."""
    if a.grid != b.grid or a.representation != b.representation:
        raise GridMismatch("inner product needs matching grids and "
                           "representations")
    return complex(np.dot(a.grid.weights, np.conj(a.amplitudes) * b.amplitudes))


def density(psi: WaveFunction) -> Density1D:
    return Density1D(psi.grid, np.abs(psi.amplitudes) ** 2)


def momentum_representation(psi: WaveFunction,
                            out_grid: Grid1D | None = None) -> WaveFunction:
    """Momentum-representation amplitudes of a position-representation state.

    Direct O(N·M) quadrature of the continuum kernel on the output grid
    (default: the numeric range of the input grid, read as momenta).
    """
    if psi.representation != POSITION:
        raise RepresentationMismatch("momentum_representation expects a "
                                     "position-representation state")
    grid = out_grid or psi.grid
    hbar = psi.units.hbar
    g = psi.amplitudes * psi.grid.weights
    out = _kernels.chirp_transform(np.ascontiguousarray(g),
                                   psi.grid.points,
                                   np.ascontiguousarray(grid.points),
                                   0.0, 1.0 / hbar)
    out = out / np.sqrt(2.0 * np.pi * hbar)
    return WaveFunction(grid, out, psi.units, MOMENTUM)


def position_representation(phi: WaveFunction,
                            out_grid: Grid1D | None = None) -> WaveFunction:
    """Inverse of :func:`momentum_representation`."""
    if phi.representation != MOMENTUM:
        raise RepresentationMismatch("position_representation expects a "
                                     "momentum-representation state")
    grid = out_grid or phi.grid
    hbar = phi.units.hbar
    g = phi.amplitudes * phi.grid.weights
    out = _kernels.chirp_transform(np.ascontiguousarray(g),
                                   phi.grid.points,
                                   np.ascontiguousarray(grid.points),
                                   0.0, -1.0 / hbar)
    out = out / np.sqrt(2.0 * np.pi * hbar)
    return WaveFunction(grid, out, phi.units, POSITION)


DEFAULT_GRID = Grid1D(-10.0, 10.0, 1024)
