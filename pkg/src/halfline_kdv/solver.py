"""Boundary-forcing solver for the gKdV equation on the half-line.

The quarter-plane problem

    u_t + u_xxx + u^k u_x = 0  (x > 0),    u(x, 0) = phi(x),    u(0, t) = f(t)

is replaced on each time window ``[0, T0]`` by a whole-line problem driven by a point
source ``delta_0(x) h(t)``.  The source is chosen so that the trace at ``x = 0`` equals
``f``: with ``alpha(t) = S(t) phi_ext (0)`` and ``f1 = Psi1 (f - alpha)``,

    h = Psi3 * I_{-2/3}(f1) / (C_A Gamma(2/3)),

since the point source generates the trace ``C_A Gamma(2/3) I_{2/3}(h)``.  The nonlinear
problem is the fixed point of ``w -> HS(f, phi) + IHS(-w^k w_x)``, iterated by Picard on
short windows that are chained in time.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .airy import constant_CA
from .core import (Grid1D, SampledFunction, SpaceTimeField, _cutoff_values,
                   extend_halfline_values, smooth_step)
from .diagnostics import energy_identity, mass_series
from .fractional import TraceConditionError, fractional_derivative, gamma_function
from .linear import PropagatorPlan, cube_root_source_field, forcing_term, phi_functions

__all__ = [
    "SolverConfig",
    "BoundaryProblem",
    "RunReport",
    "ForcingPipeline",
    "CompatibilityError",
    "PicardConvergenceError",
    "select_forcing",
    "forcing_pipeline",
    "solve_linear_homogeneous",
    "solve_linear_inhomogeneous",
    "solve_nonlinear",
    "rescale_problem",
    "regularity_threshold",
]

log = logging.getLogger(__name__)


class CompatibilityError(ValueError):
    """Initial and boundary data disagree at the corner ``(x, t) = (0, 0)``."""


class PicardConvergenceError(RuntimeError):
    """Picard iteration did not reach tolerance, even after shrinking the window."""

    def __init__(self, message: str, history: list):
        super().__init__(message)
        self.history = history


def regularity_threshold(k: int) -> float:
    """Smallest ``s`` covered by the local theory for power ``k``."""
    if k == 1:
        return 0.0
    if k == 2:
        return 0.25
    if k == 3:
        return 1.0 / 12.0
    return 0.5 - 2.0 / k


@dataclass(frozen=True)
class SolverConfig:
    """Numerical and model parameters.

    ``n_x`` nodes sample the box ``[-L, L)``; ``n_t`` nodes sample each window ``[0, T0]``.
    The window length is ``min(window_T0, window_constant / (1 + size)^window_power)``
    with ``size = ||phi||_2 + max|f|`` (set ``window_constant=None`` to use ``window_T0``
    as is), then shortened so that windows tile ``[0, T]``.
    """

    k: int = 1
    s: float = 0.0
    T: float = 1.0
    L: float = 40.0
    n_x: int = 2048
    n_t: int = 2048
    picard_tol: float = 1e-10
    picard_max_iter: int = 30
    window_T0: float = 0.5
    compat_tol: float = 1e-8
    nonlinearity: float = 1.0
    window_constant: float | None = 8.0
    window_power: float = 4.0
    max_retries: int = 3
    extension_width: float | None = None
    extension_terms: int = 4
    pad_factor: int = 2
    sponge_strength: float = 2000.0
    dealias: bool = True

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"s must lie in [0, 1], got {self.s}")
        if abs(self.s - 0.5) < 1e-12:
            raise ValueError("s = 1/2 is excluded: the boundary trace is not defined there")
        if not self.T > 0 or not self.L > 0:
            raise ValueError("T and L must be positive")
        if self.n_x < 16 or self.n_x % 2:
            raise ValueError("n_x must be an even integer >= 16 so that x = 0 is a node")
        if self.n_t < 8:
            raise ValueError("n_t must be at least 8")
        if not 0 < self.window_T0 <= self.T * (1 + 1e-12):
            raise ValueError("window_T0 must lie in (0, T]")
        if not self.picard_tol > 0 or self.picard_max_iter < 1:
            raise ValueError("picard_tol must be positive and picard_max_iter >= 1")
        if int(self.pad_factor) != self.pad_factor or self.pad_factor < 2 or self.extension_terms < 2:
            raise ValueError("pad_factor must be an integer >= 2 and extension_terms >= 2")
        if self.sponge_strength < 0:
            raise ValueError("sponge_strength must be non-negative")
        if self.compat_tol < 0 or self.max_retries < 0:
            raise ValueError("compat_tol and max_retries must be >= 0")
        if self.s < regularity_threshold(self.k):
            warnings.warn(
                f"s = {self.s} is below the local-theory threshold {regularity_threshold(self.k):g} "
                f"for k = {self.k}", stacklevel=3)

    @property
    def box(self) -> Grid1D:
        return Grid1D.periodic(self.L, self.n_x)

    @property
    def half_grid(self) -> Grid1D:
        g = self.box
        return Grid1D(0.0, g.end, self.n_x // 2)

    def replace(self, **changes) -> "SolverConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class BoundaryProblem:
    """Initial data ``phi`` on ``[0, X]`` and boundary data ``f`` on ``[0, T_f]``."""

    phi: SampledFunction
    f: SampledFunction
    config: SolverConfig

    def __post_init__(self):
        if self.phi.domain_tag != "space" or self.f.domain_tag != "time":
            raise ValueError("phi must be a space sample and f a time sample")
        for name, g in (("phi", self.phi.grid), ("f", self.f.grid)):
            if abs(g.start) > 1e-9 * g.spacing:
                raise ValueError(f"{name} must be sampled from 0")
        if self.config.s > 0.5:
            gap = abs(self.phi.values[0] - self.f.values[0])
            bound = self.config.compat_tol * (1.0 + self.phi.max_abs())
            if gap > bound:
                raise CompatibilityError(
                    f"|phi(0) - f(0)| = {gap:.3e} exceeds {bound:.3e}; data with s > 1/2 "
                    "must satisfy f(0) = phi(0)")

    @property
    def is_real(self) -> bool:
        return self.phi.is_real and self.f.is_real


@dataclass
class RunReport:
    """Per-node diagnostics of a solve; every series is sampled on ``times``."""

    times: np.ndarray
    boundary_error: np.ndarray
    mass: np.ndarray
    energy_residual: np.ndarray
    picard_iters: list
    converged: bool
    window_T0: float = 0.0
    residual_history: list = field(default_factory=list)

    def __post_init__(self):
        n = len(self.times)
        for name in ("boundary_error", "mass", "energy_residual"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} has {len(getattr(self, name))} entries, expected {n}")


@dataclass(frozen=True)
class ForcingPipeline:
    """Intermediate series of the forcing construction, all on ``[0, 2 T0]``."""

    tgrid: Grid1D
    h: np.ndarray
    h_tilde: np.ndarray
    f1: np.ndarray
    alpha: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray
    psi3: np.ndarray
    beta: complex = 0.0  # h_tilde = beta t^(1/3) + O(t^(4/3)) near t = 0


# fourth-order one-sided first derivative at t = 0
_SLOPE = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


# -- per-window context --------------------------------------------------------


class _Window:
    """Grids, cutoffs and propagator shared by every solve on windows of length ``T0``."""

    def __init__(self, config: SolverConfig, T0: float):
        self.config = config
        self.T0 = T0
        self.box = config.box
        self.plan = PropagatorPlan(self.box, max_time=np.inf)
        # evolutions run on a zero-padded box whose outer part absorbs the left-going
        # waves, so that nothing re-enters x > 0 through the periodic seam
        p = config.pad_factor
        self.wide = Grid1D.periodic(p * config.L, p * config.n_x)
        self.wplan = PropagatorPlan(self.wide, max_time=np.inf)
        self.i0 = self.plan.origin_index
        self.wi0 = self.wplan.origin_index
        self.pad_at = self.wi0 - self.i0
        dt = T0 / (config.n_t - 1)
        ramp = np.clip((np.abs(self.wide.nodes) - config.L) / ((p - 1) * config.L), 0.0, 1.0)
        self.damp = np.exp(-config.sponge_strength * dt * (1.0 - smooth_step(ramp)))
        self.E, p1, p2 = phi_functions(1j * dt * self.wplan.symbol)
        self.wa = dt * (p1 - p2)
        self.wb = dt * p2
        self.half = config.half_grid
        self.nh = self.half.n
        self.tgrid = Grid1D(0.0, T0, config.n_t)
        self.long = Grid1D(0.0, 2.0 * T0, 2 * config.n_t - 1)
        t = self.long.nodes
        self.psi1 = _cutoff_values(t, T0, 4.0 * T0 / 3.0)
        self.psi2 = _cutoff_values(t, 4.0 * T0 / 3.0, 5.0 * T0 / 3.0)
        self.psi3 = _cutoff_values(t, 5.0 * T0 / 3.0, 2.0 * T0)
        # alpha only enters through Psi1, so the trace is needed on its support
        self.n_alpha = int(np.searchsorted(t, 4.0 * T0 / 3.0, side="right")) + 1
        self.scale = 1.0 / (constant_CA() * gamma_function(2.0 / 3.0))
        xi = self.plan.xi
        self._cube_root = None
        self.dealias = np.abs(xi) <= (2.0 / 3.0) * np.max(np.abs(xi)) if config.dealias \
            else np.ones(xi.shape, bool)

    def cube_root_field(self) -> np.ndarray:
        if self._cube_root is None:
            self._cube_root = cube_root_source_field(self.half, self.tgrid).values
        return self._cube_root

    def extend(self, half_values: np.ndarray) -> np.ndarray:
        return extend_halfline_values(half_values, self.box.spacing, self.box,
                                      self.config.extension_width, self.config.extension_terms)

    def pad(self, box_values: np.ndarray) -> np.ndarray:
        out = np.zeros(box_values.shape[:-1] + (self.wide.n,), dtype=box_values.dtype)
        out[..., self.pad_at:self.pad_at + self.box.n] = box_values
        return out

    def march(self, start: np.ndarray | None, source_box: np.ndarray | None, nsteps: int,
              keep_rows: int, chunk: int = 128):
        """March ``w_t + w_xxx = source`` on the padded box with the sponge applied every step.

        Returns the half-line rows for the first ``keep_rows`` nodes and the trace at
        ``x = 0`` for all ``nsteps + 1`` nodes.
        """
        plan = self.wplan
        sl = slice(self.wi0, self.wi0 + self.nh)
        rows = np.zeros((keep_rows, self.nh), dtype=complex)
        trace = np.zeros(nsteps + 1, dtype=complex)
        w = np.zeros(self.wide.n, dtype=complex) if start is None else self.pad(start).astype(complex)
        rows[0] = w[sl]
        trace[0] = w[self.wi0]
        coef = plan.coefficients(w)
        prev = None
        for a in range(1, nsteps + 1, chunk):
            b = min(nsteps + 1, a + chunk)
            src = None
            if source_box is not None:
                src = plan.coefficients(self.pad(source_box[a:b]), axis=1)
                if prev is None:
                    prev = plan.coefficients(self.pad(source_box[:1]), axis=1)[0]
            for j in range(b - a):
                coef = self.E * coef
                if src is not None:
                    coef = coef + self.wa * prev + self.wb * src[j]
                    prev = src[j]
                w = plan.samples(coef) * self.damp
                coef = plan.coefficients(w)
                n = a + j
                trace[n] = w[self.wi0]
                if n < keep_rows:
                    rows[n] = w[sl]
        return rows, trace

    def pipeline(self, phi_box: np.ndarray, f_long: np.ndarray, real: bool,
                 free_trace: np.ndarray | None = None) -> ForcingPipeline:
        alpha = np.zeros(self.long.n, dtype=complex)
        if free_trace is not None:
            alpha[:self.n_alpha] = free_trace
        if real:
            alpha = alpha.real
        f1 = self.psi1 * (f_long - alpha)
        tol = self.config.compat_tol * (1.0 + float(np.max(np.abs(phi_box), initial=0.0))
                                        + float(np.max(np.abs(f_long))))
        if abs(f1[0]) > tol:
            raise CompatibilityError(
                f"f(0) - (S(t)phi)(0)|_(t=0) = {f1[0]:.3e}: boundary and initial data must agree "
                "at the corner for the forcing to exist")
        f1 = f1.copy()
        f1[0] = 0.0
        # f1 ~ a t at the corner, so h_tilde carries an exact a t^(1/3) / Gamma(4/3) part;
        # peel it off so the discrete derivative only sees data vanishing to second order
        t = self.long.nodes
        slope = (f1[:5] @ _SLOPE) / self.long.spacing
        beta = self.scale * slope / gamma_function(4.0 / 3.0)
        reg = f1 - slope * t
        if np.any(reg):
            try:
                ht = self.scale * fractional_derivative(
                    SampledFunction(self.long, reg, "time"), 2.0 / 3.0).values
            except TraceConditionError as exc:  # pragma: no cover - reg[0] is zero
                raise CompatibilityError(str(exc)) from exc
        else:
            ht = np.zeros(self.long.n, dtype=np.result_type(f1, float))
        ht = ht + beta * np.cbrt(t)
        h = self.psi3 * ht
        return ForcingPipeline(self.long, h, ht, f1, alpha, self.psi1, self.psi2, self.psi3, beta)

    def homogeneous(self, phi_half: np.ndarray, f_long: np.ndarray, real: bool):
        """``HS(f, phi)`` on ``x >= 0`` and ``t in [0, T0]`` plus the forcing pipeline."""
        phi_box = self.extend(phi_half)
        nt = self.tgrid.n
        out = np.zeros((nt, self.nh), dtype=complex)
        trace = None
        if np.any(phi_box):
            free, trace = self.march(phi_box, None, self.n_alpha - 1, nt)
            out += free
        pipe = self.pipeline(phi_box, f_long, real, trace)
        if np.any(pipe.h[:nt]):
            # Psi3 = 1 on [0, T0]: the t^(1/3) part of h has a closed-form field
            hreg = pipe.h[:nt] - pipe.beta * np.cbrt(self.tgrid.nodes)
            hs = SampledFunction(self.tgrid, hreg, "time")
            out += forcing_term(hs, self.half, self.tgrid).values
            if pipe.beta != 0:
                out += pipe.beta * self.cube_root_field()
        return (out.real if real else out), pipe

    def inhomogeneous(self, source_box: np.ndarray, real: bool) -> np.ndarray:
        """``IHS`` of a source on the box: Duhamel field minus its boundary correction."""
        nt = self.tgrid.n
        w1, _ = self.march(None, source_box, nt - 1, nt)
        if real:
            w1 = w1.real
        trace = _extend_time(w1[:, 0], self.long.n)
        corr, _ = self.homogeneous(np.zeros(self.nh), trace, real)
        return w1 - corr

    def nonlinear_source(self, w_half: np.ndarray, k: int, nu: float, real: bool) -> np.ndarray:
        """``-nu w^k w_x`` on the box, with 2/3-rule dealiasing."""
        ext = self.extend(w_half)
        coef = np.fft.fft(ext, axis=1) * self.dealias
        wf = np.fft.ifft(coef, axis=1)
        wx = np.fft.ifft(coef * (1j * self.plan.xi), axis=1)
        prod = np.fft.ifft(np.fft.fft(wf ** k * wx, axis=1) * self.dealias, axis=1)
        src = -nu * prod
        return src.real if real else src


def _extend_time(values: np.ndarray, n: int, terms: int = 4) -> np.ndarray:
    """Samples on ``n`` nodes continuing ``values`` past its last node.

    The continuation is the higher-order reflection used for the spatial extension, so
    it matches three derivatives at the junction and the centred stencils of the
    fractional derivative see smooth data near the window end.
    """
    m = values.shape[0]
    if n <= m:
        return values[:n]
    target = Grid1D.from_spacing(-float(n - m), 1.0, n - m + 1)
    ext = extend_halfline_values(values[::-1], 1.0, target, terms=terms)
    return np.concatenate([values, ext[::-1][1:]])


def _resample_time(f: SampledFunction, t0: float, grid: Grid1D) -> np.ndarray:
    """``f(t0 + t)`` on ``grid``; past the end of ``f`` the data are reflected evenly."""
    g = f.grid
    t = t0 + grid.nodes
    Tf = g.end
    period = 2.0 * Tf
    r = np.mod(t, period)
    r = np.where(r <= Tf, r, period - r)
    pos = r / g.spacing
    idx = np.rint(pos).astype(int)
    if np.all(np.abs(pos - idx) < 1e-8):
        return np.asarray(f.values)[np.clip(idx, 0, g.n - 1)]
    spline = CubicSpline(g.nodes, f.values)
    return spline(r)


def _resample_space(phi: SampledFunction, half: Grid1D) -> np.ndarray:
    g = phi.grid
    x = half.nodes
    dtype = np.result_type(phi.values.dtype, float)
    out = np.zeros(half.n, dtype=dtype)
    if g.same_spacing(half):
        m = min(g.n, half.n)
        out[:m] = phi.values[:m]
        return out
    inside = x <= g.end * (1 + 1e-12)
    out[inside] = CubicSpline(g.nodes, phi.values)(x[inside])
    return out


def _data_size(problem: BoundaryProblem) -> float:
    phi = problem.phi
    l2 = math.sqrt(float(np.trapezoid(np.abs(phi.values) ** 2, dx=phi.grid.spacing)))
    return l2 + problem.f.max_abs()


def effective_window(problem: BoundaryProblem) -> float:
    """Window length used by :func:`solve_nonlinear` before any retry."""
    cfg = problem.config
    T0 = cfg.window_T0
    if cfg.window_constant is not None:
        T0 = min(T0, cfg.window_constant / (1.0 + _data_size(problem)) ** cfg.window_power)
    nwin = max(1, int(math.ceil(cfg.T / T0 - 1e-9)))
    return cfg.T / nwin


# -- public operations ---------------------------------------------------------


def forcing_pipeline(problem: BoundaryProblem, T0: float) -> ForcingPipeline:
    """Every intermediate series of the forcing construction on ``[0, 2 T0]``."""
    win = _Window(problem.config, T0)
    phi_half = _resample_space(problem.phi, win.half)
    f_long = _resample_time(problem.f, 0.0, win.long)
    phi_box = win.extend(phi_half)
    trace = None
    if np.any(phi_box):
        _, trace = win.march(phi_box, None, win.n_alpha - 1, 1)
    return win.pipeline(phi_box, f_long, problem.is_real, trace)


def select_forcing(problem: BoundaryProblem, T0: float) -> SampledFunction:
    """Boundary source ``h`` on ``[0, 2 T0]`` whose forced field has trace ``f`` on ``[0, T0]``."""
    pipe = forcing_pipeline(problem, T0)
    return SampledFunction(pipe.tgrid, pipe.h, "time")


def solve_linear_homogeneous(problem: BoundaryProblem, T0: float) -> SpaceTimeField:
    """Linear solution with data ``(phi, f)`` on ``x >= 0``, ``t in [0, T0]``."""
    win = _Window(problem.config, T0)
    phi_half = _resample_space(problem.phi, win.half)
    f_long = _resample_time(problem.f, 0.0, win.long)
    vals, _ = win.homogeneous(phi_half, f_long, problem.is_real)
    return SpaceTimeField(win.half, win.tgrid, vals)


def solve_linear_inhomogeneous(h_tilde: SpaceTimeField, T0: float, config: SolverConfig) -> SpaceTimeField:
    """Solution of ``w_t + w_xxx = h_tilde`` on ``x > 0`` with zero initial and boundary data.

    ``h_tilde`` lives on the box ``config.box`` and on the window grid ``[0, T0]``.
    """
    win = _Window(config, T0)
    if not h_tilde.xgrid.matches(win.box) or not h_tilde.tgrid.matches(win.tgrid):
        raise ValueError("source must be sampled on config.box x [0, T0] with n_t nodes")
    real = not np.iscomplexobj(h_tilde.values) or not np.any(h_tilde.values.imag)
    vals = win.inhomogeneous(np.asarray(h_tilde.values), real)
    return SpaceTimeField(win.half, win.tgrid, vals)


def _norm_l2(vals: np.ndarray, dx: float) -> float:
    return float(np.sqrt(np.max(np.sum(np.abs(vals) ** 2, axis=1) * dx)))


def _solve_window(win: _Window, phi_half, f_long, real, history):
    cfg = win.config
    free, _ = win.homogeneous(phi_half, f_long, real)
    w = free
    diffs = []
    for it in range(1, cfg.picard_max_iter + 1):
        src = win.nonlinear_source(w, cfg.k, cfg.nonlinearity, real) if cfg.nonlinearity else None
        w_new = free + win.inhomogeneous(src, real) if src is not None else free
        diff = _norm_l2(w_new - w, win.half.spacing)
        scale = _norm_l2(w_new, win.half.spacing)
        diffs.append(diff)
        w = w_new
        if not np.isfinite(diff) or diff > 1e6 * max(scale, 1.0):
            break
        if diff <= cfg.picard_tol * scale:
            history.append(diffs)
            return w, it, True
    history.append(diffs)
    return w, len(diffs), False


def solve_nonlinear(problem: BoundaryProblem):
    """Picard solve on chained windows; returns ``(field, RunReport)``.

    On non-convergence the window is halved and the whole solve restarted, at most
    ``config.max_retries`` times, before :class:`PicardConvergenceError` is raised.
    """
    cfg = problem.config
    T0 = effective_window(problem)
    history: list = []
    for attempt in range(cfg.max_retries + 1):
        result = _solve_chain(problem, T0, history)
        if result is not None:
            return result
        log.info("Picard iteration stalled with T0 = %g; halving the window", T0)
        T0 = 0.5 * T0
    raise PicardConvergenceError(
        f"Picard iteration did not converge after {cfg.max_retries} window reductions "
        f"(last T0 = {2 * T0:g})", history)


def _solve_chain(problem: BoundaryProblem, T0: float, history: list):
    cfg = problem.config
    win = _Window(cfg, T0)
    real = problem.is_real
    nwin = int(round(cfg.T / T0))
    phi_half = _resample_space(problem.phi, win.half)
    nt = cfg.n_t
    blocks = []
    iters = []
    for j in range(nwin):
        t0 = j * T0
        f_long = _resample_time(problem.f, t0, win.long)
        if j > 0:
            phi_half = blocks[-1][-1].copy()
            phi_half[0] = f_long[0]
        w, it, ok = _solve_window(win, phi_half, f_long, real, history)
        if not ok:
            return None
        iters.append(it)
        blocks.append(w)
    vals = np.concatenate([blocks[0]] + [b[1:] for b in blocks[1:]], axis=0)
    tgrid = Grid1D(0.0, nwin * T0, nwin * (nt - 1) + 1)
    u = SpaceTimeField(win.half, tgrid, vals)
    f_on = _resample_time(problem.f, 0.0, tgrid)
    phi0 = SampledFunction(win.half, _resample_space(problem.phi, win.half), "space")
    ledger = energy_identity(u, SampledFunction(tgrid, f_on, "time"), phi0, cfg.k, cfg.nonlinearity)
    report = RunReport(
        times=tgrid.nodes,
        boundary_error=np.abs(vals[:, 0] - f_on),
        mass=mass_series(u).values,
        energy_residual=ledger.relative_imbalance,
        picard_iters=iters,
        converged=True,
        window_T0=T0,
        residual_history=history,
    )
    return u, report


def rescale_problem(problem: BoundaryProblem, lam: float) -> BoundaryProblem:
    """Scaled data ``phi_l(x) = l^2 phi(l x)``, ``f_l(t) = l^2 f(l^3 t)`` (quadratic case only).

    Grids, box and horizon are stretched so that the discrete problem is the same up to
    the change of variables; the window length is fixed to the scaled effective window.
    """
    cfg = problem.config
    if cfg.k != 1:
        raise ValueError("rescale_problem is available for k = 1 only")
    if not 0.0 < lam <= 1.0:
        raise ValueError("lambda must lie in (0, 1]")
    phi = SampledFunction(problem.phi.grid.scaled(1.0 / lam), lam ** 2 * problem.phi.values, "space")
    f = SampledFunction(problem.f.grid.scaled(1.0 / lam ** 3), lam ** 2 * problem.f.values, "time")
    T0 = effective_window(problem)
    new_cfg = cfg.replace(
        T=cfg.T / lam ** 3,
        L=cfg.L / lam,
        window_T0=T0 / lam ** 3,
        window_constant=None,
        sponge_strength=cfg.sponge_strength * lam ** 3,
        extension_width=None if cfg.extension_width is None else cfg.extension_width / lam,
    )
    return BoundaryProblem(phi, f, new_cfg)
