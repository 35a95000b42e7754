"""Command-line front end: deterministic CSV/JSON artifacts per experiment.

Six subcommands (quadrature, density1d, density2d, dbb, ks, wigner)
build states from textual descriptors, run the corresponding library
construction, and write flat data files plus a JSON summary with a
pass/fail entry per numerical check.  Exit code 0 means every check
passed; 1 means the run completed but a check failed; ≥2 identifies
the error class that aborted the run.

Determinism contract: float cells are printed with 17 significant
digits, line endings are LF, JSON keys are sorted, and nothing
time- or path-dependent enters a data file, so identical configs
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .bohm import (dbb_density, dbb_momentum_mismatch, dbb_trajectories,
                   evolve_sho)
from .core import Grid1D, UnitsParams, density, momentum_representation
from .errors import CqmError
from .kochen_specker import (constraint_set, enumerate_assignments,
                             verify_identity)
from .multidim import (marginals_2d, rotated_representations,
                       transport_density_2d, compare_densities_2d)
from .quadrature import (quadrature_density, quadrature_transform,
                         quadrature_value_at_zero)
from .statespec import (build_state, build_state_2d, format_state_spec,
                        is_two_particle, parse_state_spec, parse_theta,
                        parse_theta_list)
from .transport import (cdf, compare_densities, marginal_position,
                        momentum_marginal_report, quadrature_marginal,
                        quantile, transport_density_1d)
from .wigner import wigner, wigner_marginal_errors

GRID_N_ENV = "CQM_DEFAULT_GRID_N"


def _g17(value: float) -> str:
    return format(float(value), ".17g")


@dataclass(frozen=True)
class RunConfig:
    """Validated grid, units and output choices shared by subcommands."""

    grid_min: float = -10.0
    grid_max: float = 10.0
    grid_n: int = 1024
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    epsilon: int = 1
    out_dir: str = "."
    fmt: str = "csv"

    def __post_init__(self) -> None:
        if not self.grid_max > self.grid_min:
            raise CqmError("grid max must exceed grid min")
        if self.grid_n < 8:
            raise CqmError("grid needs at least 8 nodes")
        for name in ("hbar", "mass", "omega"):
            if getattr(self, name) <= 0.0:
                raise CqmError(f"{name} must be positive")
        if self.epsilon not in (1, -1):
            raise CqmError("epsilon must be +1 or -1")
        if self.fmt not in ("csv", "json"):
            raise CqmError(f"unknown output format {self.fmt!r}")

    @property
    def grid(self) -> Grid1D:
        return Grid1D(self.grid_min, self.grid_max, self.grid_n)

    @property
    def units(self) -> UnitsParams:
        return UnitsParams(self.hbar, self.mass, self.omega)

    def describe(self) -> dict:
        return {"grid_min": self.grid_min, "grid_max": self.grid_max,
                "grid_n": self.grid_n, "hbar": self.hbar,
                "mass": self.mass, "omega": self.omega,
                "epsilon": self.epsilon, "format": self.fmt}


def _write_table(config: RunConfig, name: str, columns, rows) -> str:
    """One data table, as <name>.csv or <name>.json per the config."""
    path = os.path.join(config.out_dir, f"{name}.{config.fmt}")
    if config.fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_g17(v) for v in row) for row in rows)
        payload = "\n".join(lines) + "\n"
    else:
        obj = {"columns": list(columns),
               "rows": [[float(v) for v in row] for row in rows]}
        payload = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    with open(path, "w", newline="") as fh:
        fh.write(payload)
    return path


def _write_summary(config: RunConfig, name: str, payload: dict) -> str:
    path = os.path.join(config.out_dir, f"{name}.json")
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


def _check(value: float, requirement: str, ok: bool) -> dict:
    return {"value": value, "requirement": requirement, "pass": bool(ok)}


def _finish(config: RunConfig, command: str, summary_name: str,
            payload: dict, checks: dict, files: list) -> int:
    all_passed = all(c["pass"] for c in checks.values())
    payload = dict(payload)
    payload.update({"command": command, "config": config.describe(),
                    "checks": checks, "all_passed": all_passed})
    files.append(_write_summary(config, summary_name, payload))
    return 0 if all_passed else 1


def cmd_quadrature(spec, thetas, config: RunConfig, files: list) -> int:
    psi = build_state(spec, config.grid, config.units)
    grid = config.grid
    results = []
    checks = {}
    densities = []
    for k, theta in enumerate(thetas):
        psi_t = quadrature_transform(psi, theta)
        dens = np.abs(psi_t.amplitudes) ** 2
        densities.append(dens)
        norm = psi_t.norm_squared()
        files.append(_write_table(
            config, f"tomogram_{k}", ("X", "quantum_density"),
            zip(grid.points, dens)))
        results.append({"theta": theta, "norm": norm,
                        "value_at_zero":
                        quadrature_value_at_zero(psi, theta)})
        checks[f"norm_theta_{k}"] = _check(
            abs(norm - 1.0), "|norm - 1| < 1e-6", abs(norm - 1.0) < 1e-6)
    payload = {"state": format_state_spec(spec), "tomograms": results}
    if len(densities) > 1:
        gap = max(float(np.max(np.abs(a - b)))
                  for i, a in enumerate(densities)
                  for b in densities[i + 1:])
        payload["max_pairwise_linf"] = gap
    return _finish(config, "quadrature", "quadrature_summary", payload,
                   checks, files)


def cmd_density1d(spec, thetas, config: RunConfig, files: list) -> int:
    psi = build_state(spec, config.grid, config.units)
    curve = transport_density_1d(psi, config.epsilon)
    files.append(_write_table(config, "curve_samples",
                              ("x", "p", "weight"),
                              zip(curve.x, curve.p, curve.weights)))
    pos_rep = compare_densities(marginal_position(curve), density(psi))
    mom_rep = momentum_marginal_report(curve, psi)
    checks = {
        "position_marginal_l1": _check(pos_rep.l1, "L1 < 2e-3",
                                       pos_rep.l1 < 2e-3),
        "momentum_marginal_l1": _check(mom_rep.l1, "L1 < 2e-3",
                                       mom_rep.l1 < 2e-3),
    }
    angles = []
    for k, theta in enumerate(thetas):
        pushed = quadrature_marginal(curve, theta)
        quantum = quadrature_density(psi, theta)
        rep = compare_densities(pushed, quantum)
        files.append(_write_table(
            config, f"marginal_theta_{k}",
            ("X", "pushforward", "quantum", "absdiff"),
            zip(config.grid.points, pushed.values, quantum.values,
                np.abs(pushed.values - quantum.values))))
        angles.append({"theta": theta, "l1": rep.l1, "tv": rep.tv,
                       "point_mass": bool(pushed.point_mass)})
    payload = {"state": format_state_spec(spec),
               "epsilon": config.epsilon, "angles": angles}
    return _finish(config, "density1d", "density1d_summary", payload,
                   checks, files)


def cmd_density2d(spec, thetas, config: RunConfig, files: list) -> int:
    psi = build_state_2d(spec, config.grid, config.units)
    grid = config.grid
    names = ("position", "mixed", "momentum")
    axis_labels = (("x1", "x2"), ("p1", "x2"), ("p1", "p2"))
    checks = {}
    results = []
    for k, theta in enumerate(thetas):
        quantum = rotated_representations(psi, theta)
        pushed = marginals_2d(transport_density_2d(psi, theta))
        entry = {"theta": theta}
        for name, axes, p, q in zip(names, axis_labels, pushed, quantum):
            l1 = compare_densities_2d(p, q)
            entry[f"l1_{name}"] = l1
            a1 = np.repeat(grid.points, grid.n)
            a2 = np.tile(grid.points, grid.n)
            files.append(_write_table(
                config, f"{name}_marginal_{k}",
                (axes[0], axes[1], "pushforward", "quantum", "absdiff"),
                zip(a1, a2, p.values.ravel(), q.values.ravel(),
                    np.abs(p.values - q.values).ravel())))
            checks[f"l1_{name}_theta_{k}"] = _check(
                l1, "L1 < 5e-3", l1 < 5e-3)
        results.append(entry)
    payload = {"state": format_state_spec(spec), "angles": results}
    return _finish(config, "density2d", "density2d_summary", payload,
                   checks, files)


def cmd_dbb(spec, t_max: float, n_traj: int, n_frames: int,
            config: RunConfig, files: list) -> int:
    psi = build_state(spec, config.grid, config.units)
    curve = dbb_density(psi)
    pos_rep = compare_densities(marginal_position(curve), density(psi))
    mom_rep = dbb_momentum_mismatch(psi)
    levels = (np.arange(n_traj) + 0.5) / n_traj
    starts = quantile(cdf(density(psi)), levels)
    times = np.linspace(0.0, t_max, n_frames)
    paths = dbb_trajectories(psi, starts, times)
    files.append(_write_table(
        config, "trajectories",
        ("t",) + tuple(f"x{i}" for i in range(n_traj)),
        ([t] + list(paths[:, k]) for k, t in enumerate(times))))
    checks = {"position_marginal_l1": _check(
        pos_rep.l1, "L1 < 1e-3", pos_rep.l1 < 1e-3)}
    payload = {"state": format_state_spec(spec),
               "t_max": t_max, "n_trajectories": n_traj,
               "momentum_mismatch": {"l1": mom_rep.l1, "tv": mom_rep.tv,
                                     "mismatch": bool(mom_rep.mismatch)}}
    return _finish(config, "dbb", "dbb_summary", payload, checks, files)


def cmd_ks(config: RunConfig, files: list) -> int:
    residual = verify_identity()
    report = enumerate_assignments()
    constraints = [{"kind": c.kind, "factors": list(c.factors),
                    "target": c.target, "sign": c.sign}
                   for c in constraint_set()]
    expected = (512, 256, 128, 64, 32, 16, 0)
    checks = {
        "identity_residual": _check(residual, "< 1e-12",
                                    residual < 1e-12),
        "full_count": _check(report.full_count, "== 0",
                             report.full_count == 0),
        "prefix_counts": _check(list(report.prefix_counts),
                                f"== {list(expected)}",
                                report.prefix_counts == expected),
        "minimality": _check(list(report.deletion_counts),
                             "every deletion count > 0",
                             all(c > 0 for c in report.deletion_counts)),
    }
    payload = {"constraints": constraints,
               "prefix_counts": list(report.prefix_counts),
               "deletion_counts": list(report.deletion_counts)}
    return _finish(config, "ks", "ks_summary", payload, checks, files)


def cmd_wigner(spec, config: RunConfig, files: list) -> int:
    psi = build_state(spec, config.grid, config.units)
    wmap = wigner(psi)
    grid = config.grid
    i, j = np.unravel_index(int(np.argmin(wmap.values)),
                            wmap.values.shape)
    err_x, err_p = wigner_marginal_errors(psi, wmap)
    files.append(_write_table(
        config, "wigner_grid", ("x", "p", "W"),
        zip(np.repeat(grid.points, wmap.p_grid.n),
            np.tile(wmap.p_grid.points, grid.n),
            wmap.values.ravel())))
    checks = {
        "marginal_position_l1": _check(err_x, "L1 < 1e-3", err_x < 1e-3),
        "marginal_momentum_l1": _check(err_p, "L1 < 1e-3", err_p < 1e-3),
    }
    payload = {"state": format_state_spec(spec),
               "min_value": float(wmap.values[i, j]),
               "min_at": [float(grid.points[i]),
                          float(wmap.p_grid.points[j])]}
    return _finish(config, "wigner", "wigner_summary", payload, checks,
                   files)


def _default_grid_n(command_default: int) -> int:
    env = os.environ.get(GRID_N_ENV)
    if env is None:
        return command_default
    try:
        return int(env)
    except ValueError:
        raise CqmError(f"{GRID_N_ENV} must be an integer, got {env!r}")


def _add_common(parser: argparse.ArgumentParser, grid_n: int) -> None:
    parser.add_argument("--grid-min", type=float, default=-10.0)
    parser.add_argument("--grid-max", type=float, default=10.0)
    parser.add_argument("--grid-n", type=int, default=None,
                        help=f"grid nodes (default {grid_n}, or "
                             f"${GRID_N_ENV})")
    parser.add_argument("--hbar", type=float, default=1.0)
    parser.add_argument("--mass", type=float, default=1.0)
    parser.add_argument("--omega", type=float, default=1.0)
    parser.add_argument("--epsilon", type=int, default=1,
                        choices=(1, -1),
                        help="+1 monotone / -1 anti-monotone coupling")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", default="csv", choices=("csv", "json"),
                        help="data table format (summaries are JSON)")
    parser.set_defaults(command_grid_n=grid_n)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqm",
        description="Contextual phase-space densities: tomograms, "
                    "transport curves, Bohmian dynamics, spin checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quadrature", help="tomograms at a list of angles")
    q.add_argument("--state", required=True)
    q.add_argument("--theta", default="pi/6,pi/3,pi/4,2pi/3,5pi/6")
    _add_common(q, 1024)

    d1 = sub.add_parser("density1d", help="curve density and marginals")
    d1.add_argument("--state", required=True)
    d1.add_argument("--theta", default="0,pi/4,pi/2,3pi/4")
    _add_common(d1, 1024)

    d2 = sub.add_parser("density2d", help="two-particle curve marginals")
    d2.add_argument("--state", required=True)
    d2.add_argument("--theta", default="pi/6")
    _add_common(d2, 256)

    db = sub.add_parser("dbb", help="Bohmian trajectories and mismatch")
    db.add_argument("--state", required=True)
    db.add_argument("--t-max", default="2pi",
                    help="integration span (radians form allowed)")
    db.add_argument("--n-traj", type=int, default=16)
    db.add_argument("--n-frames", type=int, default=101)
    _add_common(db, 1024)

    ks = sub.add_parser("ks", help="two-spin value-assignment search")
    _add_common(ks, 1024)

    w = sub.add_parser("wigner", help="Wigner map and its marginals")
    w.add_argument("--state", required=True)
    _add_common(w, 257)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        grid_n = args.grid_n if args.grid_n is not None \
            else _default_grid_n(args.command_grid_n)
        config = RunConfig(args.grid_min, args.grid_max, grid_n,
                           args.hbar, args.mass, args.omega,
                           args.epsilon, args.out, args.format)
        os.makedirs(config.out_dir, exist_ok=True)
        files: list = []
        if args.command == "ks":
            return cmd_ks(config, files)
        spec = parse_state_spec(args.state)
        if args.command == "density2d":
            if not is_two_particle(spec):
                raise CqmError("density2d needs a two-particle state "
                               "(prod2d or a superposition of prod2d)")
            return cmd_density2d(spec, parse_theta_list(args.theta),
                                 config, files)
        if is_two_particle(spec):
            raise CqmError(f"{args.command} needs a single-particle state")
        if args.command == "quadrature":
            return cmd_quadrature(spec, parse_theta_list(args.theta),
                                  config, files)
        if args.command == "density1d":
            return cmd_density1d(spec, parse_theta_list(args.theta),
                                 config, files)
        if args.command == "dbb":
            return cmd_dbb(spec, parse_theta(args.t_max), args.n_traj,
                           args.n_frames, config, files)
        return cmd_wigner(spec, config, files)
    except CqmError as exc:
        print(f"cqm: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
