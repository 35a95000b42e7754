"""Contextual deterministic phase-space densities for quantum states.

Quantum probability attaches to measurement contexts, not to
observables in isolation.  This package makes that concrete at desk
scale: quadrature tomograms |⟨X(θ)|ψ⟩|², positive curve-supported
phase-space densities whose marginals reproduce a whole commuting
context at once (and which must change when the context does), the
de Broglie-Bohm special case that fails the momentum marginal, the
Wigner function that fails positivity instead, and the two-spin
value-assignment search that rules out context-free values entirely.

Hot kernels run on a compiled extension when built, with a pure-numpy
fallback selected automatically at import (see ``cqm.kernel_backend``).
"""

from ._kernels import BACKEND as kernel_backend
from .bohm import (PhaseField, dbb_density, dbb_momentum_mismatch,
                   dbb_phase_field, dbb_trajectories, evolve_sho)
from .core import (Density1D, Grid1D, Representation, UnitsParams,
                   WaveFunction, density, gaussian_packet, hermite_functions,
                   inner_product, momentum_representation,
                   position_representation, sho_eigenstate, superpose)
from .errors import (ConstraintIllFormed, CqmError, DegenerateDensity,
                     DegenerateSlice, ExpansionResidual, GridMismatch,
                     GridTooNarrow, InterpolationLoss, PhaseUnwrapFailure,
                     RepresentationMismatch, StateSpecError,
                     TrajectoryEscapedGrid, ZeroNorm)
from .kochen_specker import (LABELS, Assignment, PauliObservable,
                             SearchReport, ValueConstraint,
                             build_observables, commutes, constraint_set,
                             enumerate_assignments, joint_eigenvalues,
                             verify_identity)
from .multidim import (DEFAULT_GRID_2D, CurveDensity2D, Density2D,
                       WaveFunction2D, compare_densities_2d,
                       marginal_errors_2d, marginals_2d,
                       momentum_representation_2d, product_state_2d,
                       rotate_coords_2d, rotated_representations,
                       rotated_state, superpose_2d, transport_density_2d)
from .quadrature import (QuadratureContext, excited_quadrature_density_exact,
                         quadrature_density, quadrature_transform,
                         quadrature_value_at_zero, reduce_angle,
                         rotate_phase_point)
from .statespec import (build_state, build_state_2d, format_state_spec,
                        parse_state_spec, parse_theta, parse_theta_list)
from .transport import (CDF, CurveDensity, MismatchReport, cdf,
                        compare_densities, deposit_monotone, deposit_points,
                        interior_flat_width, marginal_momentum,
                        marginal_position, momentum_marginal_report,
                        pseudo_inverse, quadrature_marginal, quantile,
                        transport_density_1d)
from .wigner import (WignerMap, wigner, wigner_marginal_errors,
                     wigner_marginal_momentum, wigner_marginal_position)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend", "__version__",
    # core
    "Grid1D", "UnitsParams", "Representation", "WaveFunction", "Density1D",
    "sho_eigenstate", "gaussian_packet", "superpose", "inner_product",
    "density", "momentum_representation", "position_representation",
    "hermite_functions",
    # quadrature
    "QuadratureContext", "reduce_angle", "rotate_phase_point",
    "quadrature_transform", "quadrature_density", "quadrature_value_at_zero",
    "excited_quadrature_density_exact",
    # transport
    "CDF", "cdf", "quantile", "pseudo_inverse", "interior_flat_width",
    "CurveDensity", "transport_density_1d", "deposit_points",
    "deposit_monotone", "marginal_position", "marginal_momentum",
    "quadrature_marginal", "MismatchReport", "compare_densities",
    "momentum_marginal_report",
    # bohm
    "PhaseField", "dbb_phase_field", "dbb_density", "dbb_momentum_mismatch",
    "evolve_sho", "dbb_trajectories",
    # wigner
    "WignerMap", "wigner", "wigner_marginal_position",
    "wigner_marginal_momentum", "wigner_marginal_errors",
    # multidim
    "WaveFunction2D", "Density2D", "CurveDensity2D", "DEFAULT_GRID_2D",
    "product_state_2d", "superpose_2d", "rotate_coords_2d", "rotated_state",
    "momentum_representation_2d", "rotated_representations",
    "transport_density_2d", "marginals_2d", "compare_densities_2d",
    "marginal_errors_2d",
    # kochen-specker
    "PauliObservable", "Assignment", "ValueConstraint", "SearchReport",
    "LABELS", "build_observables", "commutes", "verify_identity",
    "constraint_set", "enumerate_assignments", "joint_eigenvalues",
    # statespec
    "parse_state_spec", "format_state_spec", "build_state", "build_state_2d",
    "parse_theta", "parse_theta_list",
    # errors
    "CqmError", "StateSpecError", "GridTooNarrow", "GridMismatch",
    "ZeroNorm", "RepresentationMismatch", "DegenerateDensity",
    "PhaseUnwrapFailure", "ExpansionResidual", "TrajectoryEscapedGrid",
    "InterpolationLoss", "DegenerateSlice", "ConstraintIllFormed",
]
