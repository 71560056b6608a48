"""Scenario library: exact solitons, trace-compatible data and standard test problems."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import Grid1D, SampledFunction, SpaceTimeField
from .diagnostics import pde_residual
from .solver import BoundaryProblem, SolverConfig, forcing_pipeline

__all__ = [
    "Scenario",
    "soliton_k1",
    "soliton_k2",
    "gaussian_pulse",
    "compatible_trace_scenario",
    "residual_gate",
    "get_scenario",
    "SCENARIOS",
]

RESIDUAL_GATE = 1e-6


@dataclass
class Scenario:
    """A named problem: data builders, optional exact solution and default grids."""

    name: str
    k: int
    s: float
    phi: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray], np.ndarray]
    exact_solution: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    config: SolverConfig = field(default_factory=SolverConfig)
    tolerances: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.config.k != self.k or self.config.s != self.s:
            self.config = self.config.replace(k=self.k, s=self.s)

    def problem(self, config: SolverConfig | None = None) -> BoundaryProblem:
        """Sample the data on the solver's grids and build the boundary problem."""
        cfg = config if config is not None else self.config
        half = cfg.half_grid
        dt = cfg.window_T0 / (cfg.n_t - 1)
        # cover a little beyond T so the reflected tail used by the last window is genuine data
        horizon = cfg.T + 2.0 * cfg.window_T0
        nf = int(math.ceil(horizon / dt - 1e-9)) + 1
        tgrid = Grid1D.from_spacing(0.0, dt, nf)
        phi = SampledFunction(half, self.phi(half.nodes), "space")
        f = SampledFunction(tgrid, self.f(tgrid.nodes), "time")
        return BoundaryProblem(phi, f, cfg)

    def exact_field(self, xgrid: Grid1D, tgrid: Grid1D) -> SpaceTimeField:
        if self.exact_solution is None:
            raise ValueError(f"scenario {self.name!r} has no exact solution")
        vals = self.exact_solution(xgrid.nodes[None, :], tgrid.nodes[:, None])
        return SpaceTimeField(xgrid, tgrid, vals)


def _soliton_checks(c: float, x0: float):
    if not 0.0 < c <= 4.0:
        raise ValueError("soliton speed c must lie in (0, 4]")
    if not x0 < 0.0:
        raise ValueError("x0 must be negative")


def soliton_k1(c: float = 1.0, x0: float = -10.0, config: SolverConfig | None = None) -> Scenario:
    """KdV soliton ``u = 3c sech^2(sqrt(c)/2 (x - c t - x0))``."""
    _soliton_checks(c, x0)
    a = 0.5 * math.sqrt(c)

    def u(x, t):
        return 3.0 * c / np.cosh(a * (x - c * t - x0)) ** 2

    return Scenario(
        name="soliton_k1", k=1, s=0.0,
        phi=lambda x: u(x, 0.0), f=lambda t: u(0.0, t), exact_solution=u,
        config=config or SolverConfig(k=1, s=0.0, T=1.0),
        tolerances={"relative_l2": 1e-2, "boundary": 1e-3, "picard_iters": 8},
        params={"c": c, "x0": x0},
    )


def soliton_k2(c: float = 1.0, x0: float = -10.0, config: SolverConfig | None = None) -> Scenario:
    """mKdV soliton ``u = sqrt(6c) sech(sqrt(c) (x - c t - x0))``."""
    _soliton_checks(c, x0)
    a = math.sqrt(c)
    amp = math.sqrt(6.0 * c)

    def u(x, t):
        return amp / np.cosh(a * (x - c * t - x0))

    return Scenario(
        name="soliton_k2", k=2, s=0.25,
        phi=lambda x: u(x, 0.0), f=lambda t: u(0.0, t), exact_solution=u,
        config=config or SolverConfig(k=2, s=0.25, T=1.0),
        tolerances={"relative_l2": 1e-2, "boundary": 1e-3, "picard_iters": 8},
        params={"c": c, "x0": x0},
    )


def gaussian_pulse(amplitude: float = 1.0, center: float = 4.0, width: float = 1.0, k: int = 1,
                   config: SolverConfig | None = None) -> Scenario:
    """Gaussian initial data with homogeneous boundary data ``f = 0``."""
    def phi(x):
        return amplitude * np.exp(-((x - center) / width) ** 2)

    return Scenario(
        name="gaussian_decay", k=k, s=0.0, phi=phi, f=np.zeros_like,
        config=config or SolverConfig(k=k, s=0.0, T=0.5),
        tolerances={"mass_drift": 1e-6, "energy": 1e-3},
        params={"amplitude": amplitude, "center": center, "width": width},
    )


def linear_sine(omega: float = 2.0, config: SolverConfig | None = None) -> Scenario:
    """Zero initial data and boundary data ``sin(omega t)``, linear equation."""
    cfg = config or SolverConfig(k=1, s=0.0, T=0.5, nonlinearity=0.0)
    return Scenario(
        name="linear_sine", k=1, s=0.0, phi=np.zeros_like, f=lambda t: np.sin(omega * t),
        config=cfg, tolerances={"boundary": 1e-3}, params={"omega": omega},
    )


def zero_data(k: int = 1, config: SolverConfig | None = None) -> Scenario:
    return Scenario(name="zero", k=k, s=0.0, phi=np.zeros_like, f=np.zeros_like,
                    exact_solution=lambda x, t: np.zeros(np.broadcast(x, t).shape),
                    config=config or SolverConfig(k=k, s=0.0, T=0.5))


def compatible_trace_scenario(phi: SampledFunction, k: int = 1, s: float = 0.0,
                              config: SolverConfig | None = None) -> Scenario:
    """Scenario whose boundary data is the free trace of the extended ``phi``.

    The linear forcing of such data vanishes up to discretisation error.  ``phi`` must be
    sampled with the spacing of the configuration's half-line grid.
    """
    cfg = (config or SolverConfig(T=0.5, window_T0=0.5, nonlinearity=0.0)).replace(k=k, s=s)
    half = cfg.half_grid
    if not phi.grid.same_spacing(half):
        raise ValueError("phi must share the spacing of the solver's half-line grid")
    vals = np.zeros(half.n, dtype=phi.values.dtype)
    m = min(half.n, phi.grid.n)
    vals[:m] = phi.values[:m]
    T0 = cfg.window_T0
    # the probe only supplies the free trace; constant f keeps its corner compatible
    probe_t = Grid1D(0.0, 2.0 * T0, 2 * cfg.n_t - 1)
    probe = BoundaryProblem(SampledFunction(half, vals, "space"),
                            SampledFunction(probe_t, np.full(probe_t.n, vals[0]), "time"),
                            cfg.replace(s=0.0))
    pipe = forcing_pipeline(probe, T0)
    nz = int(np.max(np.nonzero(pipe.alpha)[0], initial=0)) + 1
    nz = max(nz, cfg.n_t)
    trace = np.real_if_close(pipe.alpha[:nz], tol=1e6)
    if phi.is_real:
        trace = np.real(trace)
    tg = Grid1D.from_spacing(0.0, pipe.tgrid.spacing, nz)

    def phi_fn(x):
        return np.interp(x, half.nodes, vals, right=0.0)

    def f_fn(t):
        return np.interp(t, tg.nodes, trace)

    sc = Scenario(name="compatible_trace", k=k, s=s, phi=phi_fn, f=f_fn, config=cfg,
                  tolerances={"forcing": 1e-6})
    sc.params["sampled"] = (SampledFunction(half, vals, "space"), SampledFunction(tg, trace, "time"))
    return sc


def compatible_problem(sc: Scenario) -> BoundaryProblem:
    """Boundary problem of a :func:`compatible_trace_scenario` on its exact sample grids."""
    phi, f = sc.params["sampled"]
    return BoundaryProblem(phi, f, sc.config)


def residual_gate(sc: Scenario, half_width: float | None = None, dx: float | None = None,
                  dt: float | None = None, duration: float | None = None) -> float:
    """PDE residual of the exact solution on a fine grid around its crest.

    The residual is evaluated in the frame ``x' = x - x_c + half_width`` so that the
    patch sits at positive ``x'`` as :func:`pde_residual` requires.  Unset grid
    parameters follow the soliton speed ``c``: faster solitons are narrower, so the
    default steps shrink with ``c`` to keep the fourth-order stencils resolved.
    """
    if sc.exact_solution is None:
        raise ValueError(f"scenario {sc.name!r} has no exact solution")
    sp = max(1.0, float(sc.params.get("c", 1.0)))
    half_width = 12.0 / math.sqrt(sp) if half_width is None else half_width
    dx = 0.01 * sp ** -0.75 if dx is None else dx
    dt = 1e-3 * sp ** -1.5 if dt is None else dt
    duration = 0.05 * sp ** -1.5 if duration is None else duration
    xc = sc.params.get("x0", 0.0)
    n = int(round(2 * half_width / dx)) + 1
    xg = Grid1D(0.0, 2 * half_width, n)
    nt = int(round(duration / dt)) + 1
    tg = Grid1D(0.0, duration, nt)
    vals = sc.exact_solution(xg.nodes[None, :] + xc - half_width, tg.nodes[:, None])
    field_ = SpaceTimeField(xg, tg, vals)
    patch = (5 * dx, 2 * half_width - 5 * dx, 3 * dt, duration - 3 * dt)
    return pde_residual(field_, sc.k, patch)


SCENARIOS = {
    "soliton_k1": soliton_k1,
    "soliton_k2": soliton_k2,
    "gaussian_decay": gaussian_pulse,
    "linear_sine": linear_sine,
    "zero": zero_data,
}


def get_scenario(name: str, **kwargs) -> Scenario:
    """Build a registered scenario; exact solutions must pass the residual gate first."""
    try:
        builder = SCENARIOS[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; known: {sorted(SCENARIOS)}") from None
    sc = builder(**kwargs)
    if sc.exact_solution is not None and sc.name != "zero":
        r = residual_gate(sc)
        if r > RESIDUAL_GATE:
            raise ValueError(f"exact solution of {name!r} fails the residual gate: {r:.2e}")
    return sc
