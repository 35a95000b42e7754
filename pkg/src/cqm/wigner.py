"""Wigner quasiprobability map on a position × momentum grid.

W(x, p) = (1/πħ) ∫ ψ*(x+y) ψ(x-y) e^{2ipy/ħ} dy, discretized with y on
the offsets the position grid already provides.  Negative regions
are the point: W is not a probability density, which is what forces the
curve-supported transport construction in the first place.  Both
marginals still integrate to the quantum densities, and that pair of
checks is the contract this module is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import (Density1D, Grid1D, UnitsParams, WaveFunction,
                   momentum_representation)
from .errors import RepresentationMismatch


@dataclass(frozen=True)
class WignerMap:
    """W sampled on the outer grid x × p; values are real, may be < 0."""

    x_grid: Grid1D
    p_grid: Grid1D
    values: np.ndarray
    units: UnitsParams = field(default_factory=UnitsParams)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.x_grid.n, self.p_grid.n):
            raise ValueError("values must be shaped (x_grid.n, p_grid.n)")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def value_at(self, x: float, p: float) -> float:
        """Bilinear interpolation of W at an arbitrary phase-space point."""
        xi = np.clip((x - self.x_grid.min) / self.x_grid.step,
                     0, self.x_grid.n - 1)
        pj = np.clip((p - self.p_grid.min) / self.p_grid.step,
                     0, self.p_grid.n - 1)
        i0 = min(int(xi), self.x_grid.n - 2)
        j0 = min(int(pj), self.p_grid.n - 2)
        tx, tp = xi - i0, pj - j0
        v = self.values
        return float((1 - tx) * ((1 - tp) * v[i0, j0] + tp * v[i0, j0 + 1])
                     + tx * ((1 - tp) * v[i0 + 1, j0] + tp * v[i0 + 1, j0 + 1]))


def _default_p_grid(grid: Grid1D) -> Grid1D:
    return Grid1D(grid.min, grid.max, grid.n)


def wigner(psi: WaveFunction, p_grid: Grid1D | None = None) -> WignerMap:
    """Wigner map of a position-representation state.

    The y integral runs over the node offsets ±k·Δ reachable without
    leaving the grid, so ψ*(x+y)ψ(x-y) needs no interpolation; building
    the correlation table is the compiled kernel's job.
    """
    if psi.representation.kind != "position":
        raise RepresentationMismatch("wigner expects a position-"
                                     "representation state")
    grid = psi.grid
    pg = _default_p_grid(grid) if p_grid is None else p_grid
    hbar = psi.units.hbar
    corr = _kernels.wigner_correlation(np.ascontiguousarray(psi.amplitudes))
    n = grid.n
    y = grid.step * np.arange(-(n - 1), n)  # offsets matching corr columns
    kernel = np.exp(2j * np.outer(y, pg.points) / hbar)
    w = np.real(corr @ kernel) * (grid.step / (np.pi * hbar))
    return WignerMap(grid, pg, w, psi.units)


def wigner_marginal_position(wmap: WignerMap) -> Density1D:
    vals = wmap.values @ wmap.p_grid.weights
    return Density1D(wmap.x_grid, np.maximum(vals, 0.0))


def wigner_marginal_momentum(wmap: WignerMap) -> Density1D:
    vals = wmap.x_grid.weights @ wmap.values
    return Density1D(wmap.p_grid, np.maximum(vals, 0.0))


def wigner_marginal_errors(psi: WaveFunction,
                           wmap: WignerMap | None = None
                           ) -> tuple[float, float]:
    """L1 distances of the two Wigner marginals from |ψ|² and |φ|²."""
    if wmap is None:
        wmap = wigner(psi)
    rho_x = np.abs(psi.amplitudes) ** 2
    mx = wmap.values @ wmap.p_grid.weights
    err_x = float(np.dot(wmap.x_grid.weights, np.abs(mx - rho_x)))
    phi = momentum_representation(psi, wmap.p_grid)
    rho_p = np.abs(phi.amplitudes) ** 2
    mp = wmap.x_grid.weights @ wmap.values
    err_p = float(np.dot(wmap.p_grid.weights, np.abs(mp - rho_p)))
    return err_x, err_p
