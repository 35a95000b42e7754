"""Two-particle positive phase-space densities over rotated coordinate
frames.

The frame angle θ mixes the two position coordinates by an ordinary
rotation (and the two momenta by the same rotation), giving a family of
complete commuting sets: (x₁θ, x₂θ), (p₁θ, x₂θ), (p₁θ, p₂θ).  For each
θ a curve-supported density over the rotated phase space reproduces all
three joint quantum densities at once:

    ρθ(x, p) = |Ψθ(x₁, x₂)|² δ(p₁ − P₁(x₁; x₂)) δ(p₂ − P₂(x₂; p₁))

where P₁ matches the conditional CDF of x₁ given x₂ to that of p₁ given
x₂ (mixed representation), and P₂ then matches the conditional CDF of
x₂ given p₁ to that of p₂ given p₁ (full momentum representation).
Because the construction depends on θ, densities built in different
frames are genuinely different objects: context dependence without any
negativity.

P₁ falls between momentum grid nodes, so the second constraint needs
off-node conditionals; they are interpolated linearly in CDF space
across the bracketing nodes, which keeps every quantile map monotone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Grid1D, UnitsParams, WaveFunction
from .errors import (DegenerateSlice, GridMismatch, InterpolationLoss,
                     RepresentationMismatch, ZeroNorm)
from .transport import pseudo_inverse

DEFAULT_GRID_2D = Grid1D(-10.0, 10.0, 256)
SLICE_MASS_FLOOR = 1e-10
WINDOW_LOSS_TOL = 1e-4
_CHUNK = 4096
_REFINE = 3      # sample-lattice refinement per axis for the 2D curve
_DIP_LO = 0.05   # density/max below this: pure CDF-derivative reading
_DIP_HI = 0.25   # density/max above this: pure pointwise ratio


@dataclass(frozen=True)
class WaveFunction2D:
    """Two-particle state on a product grid, one representation per axis."""

    grid1: Grid1D
    grid2: Grid1D
    amplitudes: np.ndarray
    representations: tuple[str, str] = ("position", "position")
    units: UnitsParams = field(default_factory=UnitsParams)

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.grid1.n, self.grid2.n):
            raise ValueError("amplitudes must be shaped (grid1.n, grid2.n)")
        for r in self.representations:
            if r not in ("position", "momentum"):
                raise ValueError(f"unknown representation {r!r}")
        n2 = self.norm_squared_of(amps)
        if abs(n2 - 1.0) > 1e-5:
            raise ValueError(f"state not normalized: ∬|ψ|² = {n2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm_squared_of(self, amps: np.ndarray) -> float:
        return float(self.grid1.weights
                     @ (np.abs(amps) ** 2)
                     @ self.grid2.weights)

    def norm_squared(self) -> float:
        return self.norm_squared_of(self.amplitudes)


@dataclass(frozen=True)
class Density2D:
    """Nonnegative density on a product grid, unit mass within 1e-3."""

    grid1: Grid1D
    grid2: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid1.n, self.grid2.n):
            raise ValueError("values must be shaped (grid1.n, grid2.n)")
        if v.min() < -1e-12:
            raise ValueError(f"negative density value {v.min()!r}")
        total = float(self.grid1.weights @ v @ self.grid2.weights)
        if abs(total - 1.0) > 1e-3:
            raise ValueError(f"density mass {total!r} not within 1e-3 of 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class CurveDensity2D:
    """Weighted samples (x₁ᵢ, x₂ᵢ, p₁ᵢ, p₂ᵢ) in the rotated frame.

    Samples sit on a uniform refinement of the representation grids
    (which remain the grids the marginals are evaluated on); all five
    sample arrays share that lattice shape.  Zero-weight rows mark
    skipped degenerate slices.  p₁ is monotone in x₁ along every
    fixed-x₂ column (validated).

    ``node_fibers[k]`` holds the second-delta map x₂ ↦ p₂ at the k-th
    momentum node, tabulated at the lattice x₂ positions, with
    ``node_fiber_valid[k]`` False for fibers carrying negligible mass.
    Sample-level p₂ values cannot supply these maps: where the p₁ map
    jumps across a dip of the mixed density, interpolating samples in
    p₁ misplaces the fiber and breaks its monotonicity.  The stored
    fibers realize the spec of p₂ monotone in x₂ at fixed p₁, validated
    here on the valid rows.

    ``slice_inverse[:, j]`` and ``fiber_inverse[k]`` tabulate the
    preimages of the grid nodes under the p₁ map of slice j and the p₂
    fiber at node k.  Forward knots alone cannot place these preimages
    where a map jumps across a dip of its target density (the dip falls
    between knots); the inverses are read off the construction's CDFs,
    which resolve it.
    """

    grid1: Grid1D
    grid2: Grid1D
    x1: np.ndarray
    x2: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    weights: np.ndarray
    theta: float
    node_fibers: np.ndarray
    node_fiber_valid: np.ndarray
    slice_inverse: np.ndarray
    fiber_inverse: np.ndarray
    units: UnitsParams = field(default_factory=UnitsParams)

    def __post_init__(self) -> None:
        shape = np.asarray(self.x1).shape
        if len(shape) != 2:
            raise ValueError("curve sample arrays must be 2D lattices")
        arrays = {}
        for name in ("x1", "x2", "p1", "p2", "weights"):
            a = np.asarray(getattr(self, name), dtype=np.float64)
            if a.shape != shape:
                raise ValueError(f"{name} must be shaped {shape}")
            a.setflags(write=False)
            arrays[name] = a
        w = arrays["weights"]
        if w.min() < 0.0:
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-4:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
        live = w.sum(axis=0) > 0.0
        dp1 = np.diff(arrays["p1"][:, live], axis=0)
        if dp1.size and dp1.min() < -1e-9:
            raise ValueError("p1 must be monotone along each x2 slice")
        fibers = np.asarray(self.node_fibers, dtype=np.float64)
        valid = np.asarray(self.node_fiber_valid, dtype=bool)
        if fibers.ndim != 2 or fibers.shape[1] != shape[1]:
            raise ValueError("node_fibers must be (momentum nodes, x2 "
                             "lattice) shaped")
        if valid.shape != (fibers.shape[0],):
            raise ValueError("node_fiber_valid must flag each fiber row")
        dp2 = np.diff(fibers[valid], axis=1)
        if dp2.size and dp2.min() < -1e-9:
            raise ValueError("p2 must be monotone along each p1 fiber")
        fibers.setflags(write=False)
        valid.setflags(write=False)
        arrays["node_fibers"] = fibers
        arrays["node_fiber_valid"] = valid
        s_inv = np.asarray(self.slice_inverse, dtype=np.float64)
        f_inv = np.asarray(self.fiber_inverse, dtype=np.float64)
        if s_inv.shape != (self.grid1.n, shape[1]):
            raise ValueError("slice_inverse must be (grid1 nodes, x2 "
                             "lattice) shaped")
        if f_inv.shape != (fibers.shape[0], self.grid2.n):
            raise ValueError("fiber_inverse must be (momentum nodes, "
                             "grid2 nodes) shaped")
        s_inv.setflags(write=False)
        f_inv.setflags(write=False)
        arrays["slice_inverse"] = s_inv
        arrays["fiber_inverse"] = f_inv
        for name, a in arrays.items():
            object.__setattr__(self, name, a)


def product_state_2d(psi1: WaveFunction, psi2: WaveFunction
                     ) -> WaveFunction2D:
    if psi1.units != psi2.units:
        raise GridMismatch("product factors must share units")
    amps = np.outer(psi1.amplitudes, psi2.amplitudes)
    return WaveFunction2D(psi1.grid, psi2.grid, amps,
                          (psi1.representation.kind,
                           psi2.representation.kind), psi1.units)


def superpose_2d(states, coefficients) -> WaveFunction2D:
    if len(states) != len(coefficients) or not states:
        raise ValueError("need one coefficient per state")
    first = states[0]
    amps = np.zeros_like(first.amplitudes)
    for s, c in zip(states, coefficients):
        if s.grid1 != first.grid1 or s.grid2 != first.grid2:
            raise GridMismatch("superposed 2D states must share grids")
        if s.representations != first.representations:
            raise RepresentationMismatch(
                "superposed 2D states must share representations")
        if s.units != first.units:
            raise GridMismatch("superposed 2D states must share units")
        amps = amps + c * s.amplitudes
    n2 = first.norm_squared_of(amps)
    if n2 < 1e-12:
        raise ZeroNorm("superposition has vanishing norm")
    return WaveFunction2D(first.grid1, first.grid2, amps / np.sqrt(n2),
                          first.representations, first.units)


def rotate_coords_2d(v1, v2, theta: float):
    """Rotate a coordinate (or momentum) pair into the θ frame."""
    c, s = np.cos(theta), np.sin(theta)
    return c * v1 + s * v2, -s * v1 + c * v2


def _bilinear_complex_2d(amps: np.ndarray, g1: Grid1D, g2: Grid1D,
                         q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Sample a complex field at points (q1, q2); zero outside the grid."""
    f1 = (q1 - g1.min) / g1.step
    f2 = (q2 - g2.min) / g2.step
    inside = ((f1 > -1e-9) & (f1 < g1.n - 1 + 1e-9)
              & (f2 > -1e-9) & (f2 < g2.n - 1 + 1e-9))
    f1 = np.clip(f1, 0.0, g1.n - 1.0)
    f2 = np.clip(f2, 0.0, g2.n - 1.0)
    i = np.minimum(f1.astype(np.intp), g1.n - 2)
    j = np.minimum(f2.astype(np.intp), g2.n - 2)
    t1 = f1 - i
    t2 = f2 - j
    out = ((1 - t1) * (1 - t2) * amps[i, j]
           + (1 - t1) * t2 * amps[i, j + 1]
           + t1 * (1 - t2) * amps[i + 1, j]
           + t1 * t2 * amps[i + 1, j + 1])
    return np.where(inside, out, 0.0)


def rotated_state(psi: WaveFunction2D, theta: float) -> WaveFunction2D:
    """Amplitudes in the θ frame: Ψθ(u, v) = ψ(x₁(u,v), x₂(u,v)).

    Bilinear resampling on the same product grid, renormalized (the
    smoothing bias is quadratic in the step).  Raises
    :class:`InterpolationLoss` if more than 1e-4 of the probability
    mass sits at points whose rotated image leaves the grid window.
    """
    if psi.representations != ("position", "position"):
        raise RepresentationMismatch("rotation acts on position-"
                                     "representation amplitudes")
    if float(theta) == 0.0:
        return psi
    g1, g2 = psi.grid1, psi.grid2
    x1, x2 = np.meshgrid(g1.points, g2.points, indexing="ij")
    u, v = rotate_coords_2d(x1, x2, theta)
    outside = ((u < g1.min) | (u > g1.max) | (v < g2.min) | (v > g2.max))
    if np.any(outside):
        rho = np.abs(psi.amplitudes) ** 2
        lost = float(g1.weights @ np.where(outside, rho, 0.0) @ g2.weights)
        if lost > WINDOW_LOSS_TOL:
            raise InterpolationLoss(
                f"{lost:.3e} of the mass rotates out of the grid window")
    # preimage of each θ-frame node is the node rotated by -θ
    q1, q2 = rotate_coords_2d(x1, x2, -theta)
    amps = _bilinear_complex_2d(psi.amplitudes, g1, g2, q1, q2)
    n2 = psi.norm_squared_of(amps)
    if n2 < 1e-12:
        raise ZeroNorm("rotated amplitudes have vanishing norm")
    return WaveFunction2D(g1, g2, amps / np.sqrt(n2),
                          psi.representations, psi.units)


def _fourier_matrix(grid: Grid1D, hbar: float, sign: float) -> np.ndarray:
    """Matrix sending grid samples to momentum samples on the same grid."""
    phase = np.exp(sign * -1j * np.outer(grid.points, grid.points) / hbar)
    return phase * (grid.weights / np.sqrt(2.0 * np.pi * hbar))


def momentum_representation_2d(psi: WaveFunction2D,
                               axes: tuple[int, ...] = (0, 1)
                               ) -> WaveFunction2D:
    """Fourier transform along the requested axes (momentum grid equals
    the position grid numerically)."""
    amps = np.asarray(psi.amplitudes)
    reps = list(psi.representations)
    hbar = psi.units.hbar
    for ax in axes:
        if reps[ax] != "position":
            raise RepresentationMismatch(
                f"axis {ax} is already in the momentum representation")
        grid = psi.grid1 if ax == 0 else psi.grid2
        m = _fourier_matrix(grid, hbar, +1.0)
        amps = np.tensordot(m, amps, axes=(1, ax))
        if ax == 1:
            amps = amps.T
        reps[ax] = "momentum"
    return WaveFunction2D(psi.grid1, psi.grid2, amps,
                          (reps[0], reps[1]), psi.units)


def rotated_representations(psi: WaveFunction2D, theta: float
                            ) -> tuple[Density2D, Density2D, Density2D]:
    """The three joint densities of the θ frame.

    Returns (position, mixed, momentum): |Ψθ(x₁,x₂)|², |Φθ(p₁,x₂)|²
    from a Fourier transform along axis 0, and |Φθ(p₁,p₂)|² from the
    full 2D transform.  Momentum grids coincide numerically with the
    position grids.
    """
    rot = rotated_state(psi, theta)
    mixed = momentum_representation_2d(rot, axes=(0,))
    full = momentum_representation_2d(mixed, axes=(1,))
    return (Density2D(rot.grid1, rot.grid2, np.abs(rot.amplitudes) ** 2),
            Density2D(rot.grid1, rot.grid2, np.abs(mixed.amplitudes) ** 2),
            Density2D(rot.grid1, rot.grid2, np.abs(full.amplitudes) ** 2))


def _conditional_cdfs(values: np.ndarray, weights: np.ndarray,
                      axis_step: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-column conditional CDFs along axis 0 of a joint density.

    Returns (cdfs, masses); columns with mass below the floor keep a
    zero CDF row and are reported via masses for the caller to skip.
    """
    masses = weights @ values  # trapezoid mass of each column
    inc = 0.5 * axis_step * (values[1:, :] + values[:-1, :])
    cum = np.vstack([np.zeros((1, values.shape[1])), np.cumsum(inc, axis=0)])
    live = masses > SLICE_MASS_FLOOR
    cdfs = np.zeros_like(cum)
    np.divide(cum, masses[None, :], out=cdfs, where=live[None, :])
    np.clip(cdfs, 0.0, 1.0, out=cdfs)
    return cdfs, masses


def _quantile_rows(cdfs_t: np.ndarray, points: np.ndarray,
                   u: np.ndarray) -> np.ndarray:
    """Row-wise pseudo-inverse: cdfs_t is (m, n), u is (m,)."""
    m, n = cdfs_t.shape
    idx = np.sum(cdfs_t < u[:, None], axis=1)
    at_floor = idx == 0
    idx = np.clip(idx, 1, n - 1)
    rows = np.arange(m)
    c_hi = cdfs_t[rows, idx]
    c_lo = cdfs_t[rows, idx - 1]
    gap = c_hi - c_lo
    frac = np.where(gap > 0.0, np.clip((u - c_lo) / np.where(gap > 0.0,
                                                             gap, 1.0),
                                       0.0, 1.0), 1.0)
    out = points[idx - 1] + frac * (points[idx] - points[idx - 1])
    out[at_floor] = points[0]
    return np.clip(out, points[0], points[-1])


def _refined_axis(grid: Grid1D, r: int
                  ) -> tuple[np.ndarray, np.ndarray, float]:
    """Points, trapezoid weights and step of the ×r refined axis."""
    step = grid.step / r
    points = grid.min + step * np.arange(r * (grid.n - 1) + 1)
    w = np.full(points.shape[0], step)
    w[0] = w[-1] = 0.5 * step
    return points, w, step


def _cubic_refine_axis0(values: np.ndarray, r: int) -> np.ndarray:
    """Density samples on the ×r refinement of axis 0, from a local
    cubic interpolant.  Knot rows are reproduced exactly; undershoot
    near density zeros is clipped to zero."""
    if r == 1:
        return np.array(values, dtype=np.float64)
    n = values.shape[0]
    idx = np.arange(r * (n - 1) + 1)
    cell = np.minimum(idx // r, n - 2)
    frac = (idx - cell * r) / r
    s = np.clip(cell - 1, 0, n - 4)
    basis, _ = _lagrange_basis(cell - s + frac)
    gathered = values[s[:, None] + np.arange(4)]  # (n_r, 4, ...)
    out = np.einsum("kn,nk...->n...", basis, gathered)
    return np.clip(out, 0.0, None)


def _cubic_refine_2d(values: np.ndarray, r: int) -> np.ndarray:
    return _cubic_refine_axis0(_cubic_refine_axis0(values, r).T, r).T


def transport_density_2d(psi: WaveFunction2D,
                         theta: float) -> CurveDensity2D:
    """Curve-supported positive density reproducing the three θ-frame
    joint quantum densities as marginals.

    First constraint: along each x₂ slice, p₁ is the image of x₁ under
    the conditional quantile coupling between |Ψθ(·, x₂)|² and
    |Φθ(·, x₂)|².  Second constraint: at each sample's p₁ (generally
    off-node), the conditional CDFs of x₂ and of p₂ given p₁ are formed
    by linear interpolation in CDF space between the bracketing p₁
    nodes, and p₂ is the image of x₂ under that coupling.

    Samples live on a ×4 refined lattice, with every conditional
    density cubically refined before its CDF is formed.  Node-spaced
    sampling is too coarse wherever a quantile map crosses a deep dip
    of its target density: the whole dip then falls inside one sample
    cell and its shape is lost to the marginal pushforwards.
    Refinement keeps each map's image spacing comparable to the
    evaluation grids.

    Slices or fibers carrying conditional mass below 1e-10 are skipped
    with zero weight; :class:`DegenerateSlice` is raised only when
    nothing survives.
    """
    if psi.representations != ("position", "position"):
        raise RepresentationMismatch("transport starts from the position "
                                     "representation on both axes")
    rot = rotated_state(psi, theta)
    mixed = momentum_representation_2d(rot, axes=(0,))
    full = momentum_representation_2d(mixed, axes=(1,))
    g1, g2 = rot.grid1, rot.grid2
    pos = np.abs(rot.amplitudes) ** 2
    mix = np.abs(mixed.amplitudes) ** 2
    mom = np.abs(full.amplitudes) ** 2

    r = _REFINE
    u1, w1r, step1 = _refined_axis(g1, r)
    u2, w2r, step2 = _refined_axis(g2, r)
    pos_r = _cubic_refine_2d(pos, r)        # (x1, x2) both refined
    mix_r = _cubic_refine_2d(mix, r)        # (p1, x2) both refined
    mix_v = _cubic_refine_axis0(mix.T, r)   # (x2 refined, p1 nodes)
    mom_p = _cubic_refine_axis0(mom.T, r)   # (p2 refined, p1 nodes)
    n1r, n2r = pos_r.shape

    # first constraint, slice by slice in refined x2
    pos_cdfs, pos_mass = _conditional_cdfs(pos_r, w1r, step1)
    mix_cdfs, mix_mass = _conditional_cdfs(mix_r, w1r, step1)
    live = (pos_mass > SLICE_MASS_FLOOR) & (mix_mass > SLICE_MASS_FLOOR)
    if not np.any(live):
        raise DegenerateSlice("every x2 slice carries negligible mass")
    p1 = np.zeros((n1r, n2r))
    for j in np.flatnonzero(live):
        p1[:, j] = pseudo_inverse(mix_cdfs[:, j], u1, pos_cdfs[:, j])

    # second constraint: conditional CDFs at fixed p1, refined along
    # their own axes and blended in CDF space across the bracketing
    # momentum nodes
    v_cdfs, fiber_mass_v = _conditional_cdfs(mix_v, w2r, step2)
    p2_cdfs, fiber_mass_p = _conditional_cdfs(mom_p, w2r, step2)
    fiber_live = ((fiber_mass_v > SLICE_MASS_FLOOR)
                  & (fiber_mass_p > SLICE_MASS_FLOOR))

    weights = pos_r * np.outer(w1r, w2r)
    weights[:, ~live] = 0.0

    f = (p1 - g1.min) / g1.step
    k = np.clip(f.astype(np.intp), 0, g1.n - 2)
    t = np.clip(f - k, 0.0, 1.0)
    usable = fiber_live[k] & fiber_live[k + 1]
    weights[~usable] = 0.0
    total = weights.sum()
    if total <= 0.0:
        raise DegenerateSlice("every p1 fiber carries negligible mass")
    weights /= total

    p2 = np.zeros((n1r, n2r))
    flat = np.flatnonzero(usable.ravel())
    k_f = k.ravel()[flat]
    t_f = t.ravel()[flat]
    j_f = np.tile(np.arange(n2r), (n1r, 1)).ravel()[flat]
    p2_flat = np.zeros(flat.shape[0])
    for lo in range(0, flat.shape[0], _CHUNK):
        sl = slice(lo, min(lo + _CHUNK, flat.shape[0]))
        kk, tt, jj = k_f[sl], t_f[sl], j_f[sl]
        u_here = ((1.0 - tt) * v_cdfs[jj, kk] + tt * v_cdfs[jj, kk + 1])
        curves = ((1.0 - tt)[:, None] * p2_cdfs[:, kk].T
                  + tt[:, None] * p2_cdfs[:, kk + 1].T)
        p2_flat[sl] = _quantile_rows(curves, u2, u_here)
    p2.ravel()[flat] = p2_flat

    # second-delta fiber map tabulated at every momentum node, for the
    # marginal pushforwards and the fiber monotonicity invariant
    node_fibers = np.zeros((g1.n, n2r))
    for k0 in np.flatnonzero(fiber_live):
        node_fibers[k0] = pseudo_inverse(p2_cdfs[:, k0], u2,
                                         v_cdfs[:, k0])

    # node preimages under each map, read from the refined CDFs (the
    # forward knots cannot place them inside a map jump)
    slice_inverse = np.zeros((g1.n, n2r))
    for j in np.flatnonzero(live):
        slice_inverse[:, j] = pseudo_inverse(pos_cdfs[:, j], u1,
                                             mix_cdfs[::r, j])
    fiber_inverse = np.zeros((g1.n, g2.n))
    for k0 in np.flatnonzero(fiber_live):
        fiber_inverse[k0] = pseudo_inverse(v_cdfs[:, k0], u2,
                                           p2_cdfs[::r, k0])

    x1 = np.tile(u1[:, None], (1, n2r))
    x2 = np.tile(u2[None, :], (n1r, 1))
    return CurveDensity2D(g1, g2, x1, x2, p1, p2, weights, float(theta),
                          node_fibers, fiber_live.copy(), slice_inverse,
                          fiber_inverse, psi.units)


_L_COEF = np.array([[-1.0, 6.0, -11.0, 6.0],
                    [3.0, -15.0, 18.0, 0.0],
                    [-3.0, 12.0, -9.0, 0.0],
                    [1.0, -3.0, 2.0, 0.0]]) / 6.0  # cubic Lagrange, τ∈[0,3]


def _lagrange_basis(tau: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cubic Lagrange basis on uniform knots τ = 0, 1, 2, 3 and its
    τ-derivative, shaped (4, len(tau))."""
    powers = np.stack([tau ** 3, tau ** 2, tau, np.ones_like(tau)])
    dpowers = np.stack([3.0 * tau ** 2, 2.0 * tau, np.ones_like(tau),
                        np.zeros_like(tau)])
    return _L_COEF @ powers, _L_COEF @ dpowers


def _pushforward_monotone(map_vals: np.ndarray, dens_vals: np.ndarray,
                          step: float, targets: np.ndarray,
                          inv_pos: np.ndarray | None = None,
                          x0: float = 0.0) -> np.ndarray:
    """Density of the pushforward of dens(u) du through a nondecreasing
    map u ↦ y(u), evaluated at ``targets``.

    Knots are uniform in u with spacing ``step``; the map is inverted by
    clamped Newton iteration on a local cubic interpolant, and the
    result is dens(u*) / y'(u*).  Targets outside the map range get 0.

    The pointwise ratio is exact when the map is affine, but it fails
    two ways: near interior zeros of the source density it amplifies
    CDF-matching position noise by 1/density, and across map jumps
    (zeros of the target density) the local cubic rings, so slope and
    ratio are meaningless inside the jumped cells.  Both regions are
    blended toward the derivative of Λ(p) = C(y⁻¹(p)): Λ matches the
    target CDF up to δC with no amplification, so a wide difference
    stencil on it stays accurate through dips.  ``inv_pos`` supplies
    the target preimages y⁻¹ directly (with ``x0`` the first knot
    position); without it they are interpolated between forward knots,
    which loses the dip shape wherever the map jumps across it within
    one knot cell.
    """
    out = np.zeros(targets.shape[0])
    lo, hi = map_vals[0], map_vals[-1]
    inside = (targets >= lo) & (targets <= hi)
    if not np.any(inside):
        return out
    p = targets[inside]
    n = map_vals.shape[0]
    i = np.clip(np.searchsorted(map_vals, p, side="left"), 1, n - 1)
    gap = map_vals[i] - map_vals[i - 1]
    frac = np.where(gap > 0.0, (p - map_vals[i - 1]) / np.where(gap > 0.0,
                                                                gap, 1.0),
                    1.0)
    s = np.clip(i - 2, 0, n - 4)
    ys = map_vals[s[:, None] + np.arange(4)]  # (m, 4)
    ds = dens_vals[s[:, None] + np.arange(4)]
    t_lo = (i - 1 - s).astype(np.float64)
    tau = t_lo + np.clip(frac, 0.0, 1.0)
    for _ in range(3):
        basis, dbasis = _lagrange_basis(tau)
        val = np.einsum("mk,km->m", ys, basis)
        slope = np.einsum("mk,km->m", ys, dbasis)
        stepn = (val - p) / np.where(np.abs(slope) > 1e-14, slope, 1.0)
        tau = np.clip(tau - stepn, t_lo, t_lo + 1.0)
    basis, dbasis = _lagrange_basis(tau)
    slope = np.einsum("mk,km->m", ys, dbasis)  # dy per unit τ
    dens = np.einsum("mk,km->m", ds, basis)
    good = slope > 0.25 * gap  # cubic slope collapsing → plateau cell
    ratio = np.where(good, dens * step / np.where(good, slope, 1.0), 0.0)

    # cumulative mass at the knots; ties (clamped tails) keep the first
    # knot of each run, which carries all but ~0 of their mass
    cum = np.concatenate(([0.0],
                          np.cumsum(0.5 * (dens_vals[1:] + dens_vals[:-1]))
                          )) * step
    if inv_pos is None:
        keep = np.concatenate(([True], np.diff(map_vals) > 0.0))
        lam_t = np.interp(p, map_vals[keep], cum[keep])
    else:
        lam_t = np.interp(inv_pos[inside], x0 + step * np.arange(n), cum)
    t_step = p[1] - p[0] if p.shape[0] > 1 else step
    wide = np.gradient(lam_t, t_step)
    if p.shape[0] >= 5:
        wide[2:-2] = (8.0 * (lam_t[3:-1] - lam_t[1:-3])
                      - (lam_t[4:] - lam_t[:-4])) / (12.0 * t_step)

    dmax = dens_vals.max()
    rel = dens / dmax if dmax > 0.0 else np.zeros_like(dens)
    w_src = np.clip((_DIP_HI - rel) / (_DIP_HI - _DIP_LO), 0.0, 1.0)
    gmax = np.max(ys[:, 1:] - ys[:, :-1], axis=1)
    w_jump = np.clip(gmax / t_step - 1.0, 0.0, 1.0)
    w_dip = np.maximum(w_src, w_jump)
    out[inside] = np.maximum((1.0 - w_dip) * ratio + w_dip * wide, 0.0)
    return out




def marginals_2d(curve: CurveDensity2D
                 ) -> tuple[Density2D, Density2D, Density2D]:
    """Pushforwards of the curve onto the three θ-frame pairs.

    Results live on the curve's representation grids; the sample
    lattice (generally a refinement of those grids) supplies the maps.
    (x₁, x₂) masses sit exactly on lattice nodes, so that marginal is
    read off the rows and columns that coincide with grid nodes.  The
    (p₁, x₂) and (p₁, p₂) densities are evaluated by change of
    variables through the curve's monotone maps: per x₂ lattice slice
    for p₁, then per momentum node along the stored fiber map v ↦ p₂.
    Atom-deposition schemes smooth by O(Δ²/4), which at the default 2D
    resolution would dominate the reproduction error; the cubic change
    of variables stays well under the contract budget and is exact for
    frame-aligned product states.
    """
    g1, g2 = curve.grid1, curve.grid2
    n1r, n2r = curve.weights.shape
    step1 = curve.x1[1, 0] - curve.x1[0, 0]
    step2 = curve.x2[0, 1] - curve.x2[0, 0]
    r1 = max(1, round(g1.step / step1))
    r2 = max(1, round(g2.step / step2))
    w1r = np.full(n1r, step1)
    w1r[0] = w1r[-1] = 0.5 * step1
    w2r = np.full(n2r, step2)
    w2r[0] = w2r[-1] = 0.5 * step2
    rho = curve.weights / np.outer(w1r, w2r)

    pos = Density2D(g1, g2, rho[::r1, ::r2])

    live = curve.weights.sum(axis=0) > 0.0
    x1_0 = curve.x1[0, 0]
    x2_0 = curve.x2[0, 0]
    mix_vals = np.zeros((g1.n, n2r))
    for j in np.flatnonzero(live):
        mix_vals[:, j] = _pushforward_monotone(curve.p1[:, j], rho[:, j],
                                               step1, g1.points,
                                               curve.slice_inverse[:, j],
                                               x1_0)
    mix = Density2D(g1, g2, _renormalized(mix_vals[:, ::r2], g1, g2))

    mom_vals = np.zeros((g1.n, g2.n))
    for k in range(g1.n):
        mu = mix_vals[k]
        if not curve.node_fiber_valid[k] or mu @ w2r < 1e-15:
            continue
        mom_vals[k] = _pushforward_monotone(curve.node_fibers[k], mu,
                                            step2, g2.points,
                                            curve.fiber_inverse[k], x2_0)
    mom = Density2D(g1, g2, _renormalized(mom_vals, g1, g2))
    return pos, mix, mom


def _renormalized(vals: np.ndarray, g1: Grid1D, g2: Grid1D) -> np.ndarray:
    """Scale out the O(h²) mass drift of the derivative estimator."""
    mass = float(g1.weights @ vals @ g2.weights)
    return vals / mass if mass > 0.0 else vals


def compare_densities_2d(a: Density2D, b: Density2D) -> float:
    """L1 distance between two densities on the same grids."""
    if a.grid1 != b.grid1 or a.grid2 != b.grid2:
        raise GridMismatch("densities live on different grids")
    diff = np.abs(a.values - b.values)
    return float(a.grid1.weights @ diff @ a.grid2.weights)


def marginal_errors_2d(psi: WaveFunction2D, theta: float
                       ) -> tuple[float, float, float]:
    """L1 distances of the three curve marginals from the quantum ones."""
    quantum = rotated_representations(psi, theta)
    pushed = marginals_2d(transport_density_2d(psi, theta))
    return tuple(compare_densities_2d(p, q)
                 for p, q in zip(pushed, quantum))
