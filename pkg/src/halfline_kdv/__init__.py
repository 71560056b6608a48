"""Generalized KdV on the half-line by the boundary-forcing method.

The initial-boundary value problem

    u_t + u_xxx + u^k u_x = 0,   x > 0,
    u(x, 0) = phi(x),   u(0, t) = f(t),

is solved by extending ``phi`` to the line and adding a forcing supported at ``x = 0``
whose strength is chosen so that the trace at the origin matches ``f``.
"""

__version__ = "0.1.0"

from .airy import airy_A, classical_ai, constant_CA
from .core import (Grid1D, SampledFunction, SpaceTimeField, SpectralField, extend_halfline,
                   forward_transform, inverse_transform, smooth_cutoff, sobolev_norm)
from .diagnostics import (IdentityLedger, convergence_order, energy_identity, mass_series,
                          pde_residual)
from .fractional import fractional_derivative, gamma_function, riemann_liouville
from .linear import PropagatorPlan, forcing_term, group_apply, group_evolve, group_trace
from .solver import (BoundaryProblem, CompatibilityError, PicardConvergenceError, RunReport,
                     SolverConfig, forcing_pipeline, rescale_problem, select_forcing,
                     solve_linear_homogeneous, solve_linear_inhomogeneous, solve_nonlinear)
from .special_runs import SCENARIOS, Scenario, get_scenario

__all__ = [
    "Grid1D", "SampledFunction", "SpectralField", "SpaceTimeField",
    "forward_transform", "inverse_transform", "extend_halfline", "smooth_cutoff", "sobolev_norm",
    "gamma_function", "riemann_liouville", "fractional_derivative",
    "airy_A", "classical_ai", "constant_CA",
    "PropagatorPlan", "group_apply", "group_trace", "group_evolve", "forcing_term",
    "SolverConfig", "BoundaryProblem", "RunReport", "CompatibilityError", "PicardConvergenceError",
    "forcing_pipeline", "select_forcing", "solve_linear_homogeneous", "solve_linear_inhomogeneous",
    "solve_nonlinear", "rescale_problem",
    "IdentityLedger", "pde_residual", "mass_series", "energy_identity", "convergence_order",
    "Scenario", "SCENARIOS", "get_scenario",
]
