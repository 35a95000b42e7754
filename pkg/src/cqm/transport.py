"""Positive phase-space densities on CDF-matching transport curves.

A 1D curve density realizes a quantum state's position and momentum
statistics simultaneously: samples (xᵢ, pᵢ, wᵢ) lie on the graph of the
monotone map T defined by matching cumulative distributions,

    F_p(T(x)) = F_x(x)        (ε = +1)
    F_p(T(x)) = 1 - F_x(x)    (ε = -1, anti-monotone coupling),

so both marginals are reproduced by construction while every joint
moment beyond them depends on the chosen context.  Sampling is
deterministic and quantile-based: equal weights 1/M at the M mid-level
quantiles of F_x, which keeps pushforward deposits mass-adapted on both
axes (grid-node sampling combs badly wherever the map stretches across
a zero of the target density).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (Density1D, Grid1D, UnitsParams, WaveFunction, density,
                   momentum_representation)
from .errors import DegenerateDensity

DEFAULT_SAMPLES = 32768
_FLAT_INCREMENT = 1e-14
_FLAT_FRACTION = 0.10
_TAIL_LEVEL = 1e-9


@dataclass(frozen=True)
class CDF:
    """Cumulative distribution sampled at grid nodes, clamped to [0, 1]."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.n,):
            raise ValueError("CDF array does not match grid")
        if np.any(np.diff(vals) < -1e-12):
            raise ValueError("CDF not monotone")
        if vals[0] > 1e-6:
            raise ValueError("CDF does not start near 0")
        if not 1.0 - 1e-4 <= vals[-1] <= 1.0:
            raise ValueError("CDF does not end near 1")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def cdf(dens: Density1D) -> CDF:
    """Cumulative trapezoid integral of a density, clamped to [0, 1]."""
    vals = dens.values
    inc = 0.5 * dens.grid.step * (vals[1:] + vals[:-1])
    cum = np.concatenate(([0.0], np.cumsum(inc)))
    return CDF(dens.grid, np.clip(cum, 0.0, 1.0))


def pseudo_inverse(cdf_values: np.ndarray, points: np.ndarray,
                   u) -> np.ndarray:
    """Left-continuous pseudo-inverse inf{x : C(x) >= u}, linear between nodes."""
    u = np.asarray(u, dtype=np.float64)
    if np.any(u < 0.0) or np.any(u > 1.0):
        raise ValueError("quantile levels must lie in [0, 1]")
    idx = np.clip(np.searchsorted(cdf_values, u, side="left"),
                  0, len(points) - 1)
    lo = np.maximum(idx - 1, 0)
    c_lo, c_hi = cdf_values[lo], cdf_values[idx]
    gap = c_hi - c_lo
    # gap == 0 with idx > 0 implies u above a terminal flat stretch; push
    # to the idx node (searchsorted already lands left edges of interior
    # flats, preserving infimum semantics)
    frac = np.where(gap > 0.0,
                    np.clip((u - c_lo) / np.where(gap > 0.0, gap, 1.0),
                            0.0, 1.0),
                    1.0)
    out = points[lo] + frac * (points[idx] - points[lo])
    out = np.where(u <= cdf_values[0], points[0], out)
    return np.clip(out, points[0], points[-1])


def quantile(c: CDF, u) -> np.ndarray:
    """Quantile function of a CDF (left-continuous pseudo-inverse)."""
    return pseudo_inverse(c.values, c.grid.points, u)


def interior_flat_width(c: CDF) -> float:
    """Widest flat stretch of the CDF strictly between its tails."""
    vals = c.values
    inside = np.flatnonzero((vals > _TAIL_LEVEL) & (vals < 1.0 - _TAIL_LEVEL))
    if inside.size < 2:
        return 0.0
    inc = np.diff(vals[inside[0]:inside[-1] + 1])
    flat = inc < _FLAT_INCREMENT
    if not np.any(flat):
        return 0.0
    # longest run of consecutive flat increments
    padded = np.concatenate(([False], flat, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    runs = edges[1::2] - edges[0::2]
    return float(runs.max()) * c.grid.step


def _check_invertible(c: CDF) -> None:
    width = interior_flat_width(c)
    limit = _FLAT_FRACTION * (c.grid.max - c.grid.min)
    if width > limit:
        raise DegenerateDensity(
            f"CDF has an interior flat stretch of width {width:.3g}, wider "
            f"than {_FLAT_FRACTION:.0%} of the grid range; the transport map "
            "is ill-conditioned")


@dataclass(frozen=True)
class CurveDensity:
    """Weighted samples of a phase-space curve p = T(x).

    ``epsilon`` is +1/-1 for monotone/anti-monotone transport couplings
    (enforced), or None for dynamical (Bohmian) curves whose momentum
    field need not be monotone.  ``context`` records which observable
    pair the density realizes.
    """

    grid: Grid1D
    x: np.ndarray
    p: np.ndarray
    weights: np.ndarray
    epsilon: int | None = 1
    context: str = "x-p"
    units: UnitsParams = field(default_factory=UnitsParams)

    def __post_init__(self) -> None:
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        p = np.ascontiguousarray(self.p, dtype=np.float64)
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if not (x.shape == p.shape == w.shape) or x.ndim != 1:
            raise ValueError("x, p, weights must be 1D arrays of equal length")
        if np.any(w < 0.0):
            raise ValueError("curve weights must be nonnegative")
        total = float(w.sum())
        if abs(total - 1.0) > 1e-4:
            raise ValueError(f"curve weights sum to {total!r}, not 1")
        if self.epsilon is not None:
            if self.epsilon not in (1, -1):
                raise ValueError("epsilon must be +1, -1 or None")
            dp = np.diff(p) * self.epsilon
            if np.any(dp < -1e-9):
                raise ValueError("curve momenta violate the monotonicity "
                                 "required by epsilon")
        for arr in (x, p, w):
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "weights", w)


def transport_density_1d(psi: WaveFunction, epsilon: int = 1,
                         n_samples: int = DEFAULT_SAMPLES,
                         context: str = "x-p") -> CurveDensity:
    """Curve density whose marginals reproduce |ψ(x)|² and |φ(p)|²."""
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    rho_x = density(psi)
    phi = momentum_representation(psi)
    rho_p = Density1D(phi.grid, np.abs(phi.amplitudes) ** 2)
    f_x, f_p = cdf(rho_x), cdf(rho_p)
    _check_invertible(f_x)
    _check_invertible(f_p)
    u = (np.arange(n_samples) + 0.5) / n_samples
    x = quantile(f_x, u)
    p = quantile(f_p, u if epsilon == 1 else 1.0 - u)
    w = np.full(n_samples, 1.0 / n_samples)
    return CurveDensity(psi.grid, x, p, w, epsilon, context, psi.units)


def deposit_points(pos: np.ndarray, w: np.ndarray,
                   grid: Grid1D) -> tuple[np.ndarray, float]:
    """Mass-conserving linear split of point masses onto grid nodes.

    Returns (node masses, mass lost outside the grid).
    """
    t = (np.asarray(pos, dtype=np.float64) - grid.min) / grid.step
    w = np.asarray(w, dtype=np.float64)
    ok = (t >= 0.0) & (t <= grid.n - 1)
    lost = float(w[~ok].sum())
    t = t[ok]
    ww = w[ok]
    i = np.minimum(t.astype(np.intp), grid.n - 2)
    f = t - i
    out = np.zeros(grid.n)
    np.add.at(out, i, ww * (1.0 - f))
    np.add.at(out, i + 1, ww * f)
    return out, lost


def deposit_monotone(pos: np.ndarray, w: np.ndarray,
                     grid: Grid1D) -> np.ndarray:
    """Flux-form deposition for a monotone sequence of weighted samples.

    Builds the piecewise-linear cumulative mass along the (sorted)
    sample positions and differences it at node-centered bin edges, so
    stretched regions spread mass instead of combing.
    """
    pos = np.asarray(pos, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if pos.size and pos[0] > pos[-1]:
        pos, w = pos[::-1], w[::-1]
    cum = np.cumsum(w) - 0.5 * w  # mid-atom cumulative convention
    total = float(w.sum())
    edges = np.concatenate((grid.points - 0.5 * grid.step,
                            [grid.max + 0.5 * grid.step]))
    # strictly increasing positions required by interp; collapse ties
    keep = np.concatenate(([True], np.diff(pos) > 0.0))
    cum_at = np.interp(edges, pos[keep], cum[keep], left=0.0, right=total)
    return np.diff(cum_at)


def _as_density(masses: np.ndarray, grid: Grid1D,
                point_mass: bool = False) -> Density1D:
    return Density1D(grid, masses / grid.step, point_mass=point_mass)


def marginal_position(curve: CurveDensity) -> Density1D:
    """Pushforward of the curve weights onto the position grid."""
    return _as_density(deposit_monotone(curve.x, curve.weights, curve.grid),
                       curve.grid)


def _is_monotone(arr: np.ndarray) -> bool:
    d = np.diff(arr)
    return bool(np.all(d >= -1e-12) or np.all(d <= 1e-12))


def marginal_momentum(curve: CurveDensity) -> Density1D:
    """Pushforward of the curve weights through p onto the momentum grid.

    Monotone curves use flux-form (quantile-aligned) deposition; dynamical
    curves fall back to the linear point split.
    """
    if curve.epsilon is not None or _is_monotone(curve.p):
        return _as_density(deposit_monotone(curve.p, curve.weights,
                                            curve.grid), curve.grid)
    masses, _ = deposit_points(curve.p, curve.weights, curve.grid)
    return _as_density(masses, curve.grid)


def quadrature_marginal(curve: CurveDensity, theta: float) -> Density1D:
    """Pushforward through X(θ) = cos θ · x + sin θ · p/(mω).

    If every sample collapses within one grid step the result is flagged
    as a point mass located at the weighted mean.
    """
    mw = curve.units.mw
    X = np.cos(theta) * curve.x + np.sin(theta) * curve.p / mw
    grid = curve.grid
    if float(X.max() - X.min()) <= grid.step:
        center = float(np.dot(curve.weights, X)) / float(curve.weights.sum())
        node = int(np.clip(round((center - grid.min) / grid.step),
                           0, grid.n - 1))
        masses = np.zeros(grid.n)
        masses[node] = 1.0
        return _as_density(masses, grid, point_mass=True)
    if _is_monotone(X):
        order = slice(None) if X[0] <= X[-1] else slice(None, None, -1)
        return _as_density(deposit_monotone(X[order], curve.weights[order],
                                            grid), grid)
    masses, _ = deposit_points(X, curve.weights, grid)
    return _as_density(masses, grid)


@dataclass(frozen=True)
class MismatchReport:
    """L1 and total-variation distance between two densities on one grid."""

    l1: float
    tv: float
    mismatch: bool


def compare_densities(a: Density1D, b: Density1D,
                      flag_tv: float = 0.01) -> MismatchReport:
    if a.grid != b.grid:
        raise ValueError("compared densities must share a grid")
    l1 = float(np.dot(a.grid.weights, np.abs(a.values - b.values)))
    return MismatchReport(l1=l1, tv=0.5 * l1, mismatch=0.5 * l1 > flag_tv)


def momentum_marginal_report(curve: CurveDensity,
                             psi: WaveFunction) -> MismatchReport:
    """Compare a curve's momentum marginal against the quantum density."""
    phi = momentum_representation(psi)
    quantum = Density1D(phi.grid, np.abs(phi.amplitudes) ** 2)
    return compare_densities(marginal_momentum(curve), quantum)
