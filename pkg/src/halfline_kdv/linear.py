"""Linear building blocks: the Airy group, the boundary-forcing term and Duhamel integrals.

``S(t)`` acts on the periodic box as the Fourier multiplier ``exp(i t xi^3)``.  The
forcing term produced by a point source at ``x = 0``,

    w(x, t) = int_0^t (t - t')^(-1/3) A(x (t - t')^(-1/3)) h(t') dt',

is evaluated directly from the Airy kernel (no box, so no wrap-around), by product
integration against the piecewise-linear interpolant of ``h``.  It is supported only
for ``x >= 0``: there the kernel decays super-exponentially as ``t' -> t``, whereas for
``x < 0`` it oscillates without bound.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import roots_jacobi

from .airy import airy_A, constant_CA
from .core import Grid1D, SampledFunction, SpaceTimeField, _wavenumbers

__all__ = [
    "PropagatorPlan",
    "HorizonError",
    "group_apply",
    "group_trace",
    "group_evolve",
    "forcing_term",
    "forcing_moments",
    "cube_root_source_field",
    "duhamel_inhomogeneous",
    "duhamel_spectral",
    "phi_functions",
]

# beyond this Airy argument the kernel is below 1e-17 and is dropped
_KERNEL_CUTOFF = 22.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


class HorizonError(ValueError):
    """Requested evolution time exceeds the wrap-around-safe horizon of the box."""


@dataclass(frozen=True)
class PropagatorPlan:
    """Cached wavenumbers for the periodic box ``base_grid``.

    ``band_limit`` is the largest wavenumber expected to carry significant energy;
    waves at that wavenumber travel at speed ``3 band_limit^2``, which sets the horizon
    ``L / (3 band_limit^2)`` unless ``max_time`` is given.
    """

    base_grid: Grid1D
    band_limit: float = 4.0
    max_time: float | None = None
    xi: np.ndarray = field(init=False, repr=False, compare=False)
    symbol: np.ndarray = field(init=False, repr=False, compare=False)
    shift: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        xi = _wavenumbers(self.base_grid)
        xi.flags.writeable = False
        lam = xi ** 3
        lam.flags.writeable = False
        shift = np.exp(-1j * self.base_grid.start * xi)
        shift.flags.writeable = False
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "symbol", lam)
        object.__setattr__(self, "shift", shift)

    @property
    def half_width(self) -> float:
        return 0.5 * self.base_grid.period

    @property
    def dxi(self) -> float:
        return 2.0 * math.pi / self.base_grid.period

    @property
    def horizon(self) -> float:
        if self.max_time is not None:
            return self.max_time
        return self.half_width / (3.0 * self.band_limit ** 2)

    @property
    def origin_index(self) -> int | None:
        return self.base_grid.index_of(0.0)

    def coefficients(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        """Transform in FFT order, scaled so that ``f(x) = sum c exp(i x xi) dxi``."""
        shape = [1] * np.ndim(values)
        shape[axis] = self.base_grid.n
        fac = (self.base_grid.spacing / (2.0 * math.pi)) * self.shift.reshape(shape)
        return fac * np.fft.fft(values, axis=axis)

    def samples(self, coef: np.ndarray, axis: int = -1) -> np.ndarray:
        shape = [1] * np.ndim(coef)
        shape[axis] = self.base_grid.n
        fac = (2.0 * math.pi / self.base_grid.spacing) / self.shift.reshape(shape)
        return np.fft.ifft(coef * fac, axis=axis)

    def check_time(self, t: float, allow_long: bool = False):
        if not allow_long and abs(t) > self.horizon * (1.0 + 1e-12):
            raise HorizonError(
                f"|t| = {abs(t):g} exceeds the wrap-around-safe horizon {self.horizon:g}; "
                "enlarge the box or pass allow_long=True"
            )


def _check_on_plan(plan: PropagatorPlan, grid: Grid1D):
    if not plan.base_grid.matches(grid):
        raise ValueError("samples do not live on the plan's base grid")


def _real_if(values: np.ndarray, real: bool) -> np.ndarray:
    return values.real.copy() if real else values


def group_apply(plan: PropagatorPlan, phi: SampledFunction, t: float,
                allow_long: bool = False) -> SampledFunction:
    """``S(t) phi``: multiply the spectrum by ``exp(i t xi^3)``."""
    _check_on_plan(plan, phi.grid)
    plan.check_time(t, allow_long)
    coef = plan.coefficients(phi.values)
    vals = plan.samples(coef * np.exp(1j * t * plan.symbol))
    return SampledFunction(phi.grid, vals, "space")


def _time_chunks(n: int, size: int = 256):
    for a in range(0, n, size):
        yield a, min(n, a + size)


def group_trace(plan: PropagatorPlan, phi: SampledFunction, tgrid: Grid1D,
                allow_long: bool = False) -> SampledFunction:
    """``t -> (S(t) phi)(0)`` sampled on ``tgrid``."""
    _check_on_plan(plan, phi.grid)
    if plan.origin_index is None:
        raise ValueError("x = 0 is not a node of the plan's grid")
    t = tgrid.nodes
    plan.check_time(float(np.max(np.abs(t))), allow_long)
    # at x = 0 the phase shift cancels against the inverse
    coef = plan.coefficients(phi.values) * plan.dxi
    out = np.empty(t.shape, dtype=complex)
    for a, b in _time_chunks(t.size):
        out[a:b] = np.exp(1j * np.outer(t[a:b], plan.symbol)) @ coef
    return SampledFunction(tgrid, out, "time")


def group_evolve(plan: PropagatorPlan, phi: SampledFunction, tgrid: Grid1D,
                 xslice: slice | None = None, allow_long: bool = False) -> SpaceTimeField:
    """``S(t_n) phi`` for every node of ``tgrid``, optionally restricted to ``xslice``."""
    _check_on_plan(plan, phi.grid)
    t = tgrid.nodes
    plan.check_time(float(np.max(np.abs(t))), allow_long)
    coef = plan.coefficients(phi.values)
    xs = xslice if xslice is not None else slice(None)
    nodes = plan.base_grid.nodes[xs]
    xgrid = Grid1D(nodes[0], nodes[-1], nodes.size)
    out = np.empty((t.size, nodes.size), dtype=complex)
    for a, b in _time_chunks(t.size, 64):
        spec = coef[None, :] * np.exp(1j * np.outer(t[a:b], plan.symbol))
        out[a:b] = plan.samples(spec, axis=1)[:, xs]
    return SpaceTimeField(xgrid, tgrid, out)


# -- boundary forcing --------------------------------------------------------


def _moments_at_origin(dt: float, ncell: int) -> tuple[np.ndarray, np.ndarray]:
    c = np.arange(ncell, dtype=float)
    p23 = (c + 1.0) ** (2.0 / 3.0) - c ** (2.0 / 3.0)
    p53 = (c + 1.0) ** (5.0 / 3.0) - c ** (5.0 / 3.0)
    m0 = 1.5 * p23
    m1 = 0.6 * p53 - c * 1.5 * p23
    scale = constant_CA() * dt ** (2.0 / 3.0)
    return scale * m0, scale * m1


def _panel_moments(x: np.ndarray, ua: np.ndarray, ub: np.ndarray, c0: np.ndarray,
                   dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Moments over panels ``u in [ua, ub]`` (``tau = u^3``) for every ``x``.

    ``c0`` is the left edge ``c*dt`` of the time cell each panel belongs to.
    Returns arrays of shape ``(x.size, ua.size)``.
    """
    half = 0.5 * (ub - ua)
    mid = 0.5 * (ub + ua)
    u = mid[:, None] + half[:, None] * _GL_NODES[None, :]          # (P, G)
    wq = half[:, None] * _GL_WEIGHTS[None, :]
    lin = (u ** 3 - c0[:, None]) / dt
    y = x[:, None, None] / u[None, :, :]                           # (X, P, G)
    kern = np.zeros(y.shape)
    live = y < _KERNEL_CUTOFF
    kern[live] = airy_A(y[live])
    base = 3.0 * u[None] * kern * wq[None]
    m0 = base.sum(axis=2)
    m1 = (base * lin[None]).sum(axis=2)
    return m0, m1


@functools.lru_cache(maxsize=16)
def _forcing_moments_cached(xkey: tuple, dt: float, ncell: int):
    x = np.asarray(xkey, dtype=float)
    M0 = np.zeros((x.size, ncell))
    M1 = np.zeros((x.size, ncell))
    zero = x == 0.0
    if np.any(zero):
        a, b = _moments_at_origin(dt, ncell)
        M0[zero] = a
        M1[zero] = b
    pos_idx = np.nonzero(~zero)[0]
    if pos_idx.size == 0:
        return M0, M1
    xp = x[pos_idx]
    # drop points whose kernel is negligible over the whole time range
    umax = (ncell * dt) ** (1.0 / 3.0)
    keep = xp / umax < _KERNEL_CUTOFF
    pos_idx, xp = pos_idx[keep], xp[keep]
    if xp.size == 0:
        return M0, M1
    cells = np.arange(1, ncell)
    # split the first cells, where the kernel changes fastest, into sub-panels
    nsub = np.where(cells < 16, 4, 1)
    edges_a, edges_b, owner = [], [], []
    for c, m in zip(cells, nsub):
        ua, ub = (c * dt) ** (1.0 / 3.0), ((c + 1) * dt) ** (1.0 / 3.0)
        e = np.linspace(ua, ub, m + 1)
        edges_a.extend(e[:-1])
        edges_b.extend(e[1:])
        owner.extend([c] * m)
    ua = np.asarray(edges_a)
    ub = np.asarray(edges_b)
    owner = np.asarray(owner)
    u_first = dt ** (1.0 / 3.0)
    chunk = max(1, int(4_000_000 // (ua.size * _GL_NODES.size)))
    for s in range(0, xp.size, chunk):
        xs = xp[s:s + chunk]
        rows = pos_idx[s:s + chunk]
        # skip panels where the kernel vanishes for every x in the chunk
        active = xs.min() / ub < _KERNEL_CUTOFF
        m0 = np.zeros((xs.size, ua.size))
        m1 = np.zeros((xs.size, ua.size))
        if np.any(active):
            a0, a1 = _panel_moments(xs, ua[active], ub[active], owner[active] * dt, dt)
            m0[:, active] = a0
            m1[:, active] = a1
        M0[rows, 1:] = _sum_by_owner(m0, owner - 1, ncell - 1)
        M1[rows, 1:] = _sum_by_owner(m1, owner - 1, ncell - 1)
        # first cell: geometric panels towards u = 0
        for j, xv in enumerate(xs):
            lo = xv / _KERNEL_CUTOFF
            if lo >= u_first:
                continue
            nlev = int(math.ceil(math.log2(u_first / lo))) + 1
            eb = u_first * 0.5 ** np.arange(nlev)
            ea = 0.5 * eb
            ea[-1] = 0.0
            a0, a1 = _panel_moments(np.array([xv]), ea, eb, np.zeros(nlev), dt)
            M0[rows[j], 0] = a0.sum()
            M1[rows[j], 0] = a1.sum()
    return M0, M1


def _sum_by_owner(vals: np.ndarray, owner: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((vals.shape[0], n))
    for k in range(vals.shape[1]):
        out[:, owner[k]] += vals[:, k]
    return out


def forcing_moments(x: np.ndarray, dt: float, ncell: int) -> tuple[np.ndarray, np.ndarray]:
    """Cell moments ``M0[i, c] = int_cell K(x_i, tau) dtau`` and ``M1`` (against ``(tau - c dt)/dt``).

    ``K(x, tau) = tau^(-1/3) A(x tau^(-1/3))``; cells are ``[c dt, (c+1) dt]``.
    Results are cached per ``(x, dt, ncell)``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("forcing moments are only available for x >= 0")
    M0, M1 = _forcing_moments_cached(tuple(np.round(x, 15).tolist()), float(dt), int(ncell))
    return M0, M1


def _forcing_rule(M0: np.ndarray, M1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Toeplitz weights ``c[:, m]`` and start corrections ``e[:, n]`` from the cell moments."""
    nx, n = M0.shape
    c = np.empty((nx, n))
    c[:, 0] = M0[:, 0] - M1[:, 0]
    c[:, 1:] = M1[:, :-1] + M0[:, 1:] - M1[:, 1:]
    e = -(M0 - M1)
    return c, e


def forcing_term(h: SampledFunction, xgrid: Grid1D, tgrid: Grid1D) -> SpaceTimeField:
    """Field generated on ``x >= 0`` by the point source ``h(t)`` placed at ``x = 0``."""
    if h.domain_tag != "time":
        raise ValueError("forcing_term expects a time series")
    if xgrid.start < -1e-12 * xgrid.spacing:
        raise ValueError("forcing_term evaluates the field on x >= 0 only")
    if abs(tgrid.start) > 1e-12 * tgrid.spacing:
        raise ValueError("the time grid must start at t = 0")
    g = h.grid
    i0 = g.index_of(0.0)
    if i0 is None or not g.same_spacing(tgrid):
        raise ValueError("h must be sampled with the spacing of tgrid, with t = 0 as a node")
    if i0 > 0 and np.any(h.values[:i0] != 0):
        raise ValueError("h must vanish for t < 0")
    nt = tgrid.n
    hv = np.zeros(nt, dtype=h.values.dtype)
    avail = min(nt, g.n - i0)
    hv[:avail] = h.values[i0:i0 + avail]
    x = np.clip(xgrid.nodes, 0.0, None)
    M0, M1 = forcing_moments(x, tgrid.spacing, nt)
    c, e = _forcing_rule(M0, M1)
    # convolution along time for every x, via FFT
    nfft = 2 * nt
    conv = np.fft.ifft(np.fft.fft(c, nfft, axis=1) * np.fft.fft(hv, nfft)[None, :], axis=1)[:, :nt]
    vals = conv + e * hv[0]
    vals[:, 0] = 0.0
    if not np.iscomplexobj(hv):
        vals = vals.real
    return SpaceTimeField(xgrid, tgrid, vals.T)


_PROFILE_YMAX = 24.0


@functools.lru_cache(maxsize=1)
def _cube_root_profile() -> CubicSpline:
    # F(y) = int_0^1 3u A(y/u) (1 - u^3)^(1/3) du by Gauss-Jacobi in u, weight (1 - u)^(1/3)
    x, w = roots_jacobi(64, 1.0 / 3.0, 0.0)
    u = 0.5 * (x + 1.0)
    w = w * 0.5 ** (4.0 / 3.0)
    y = np.linspace(0.0, _PROFILE_YMAX, 4801)
    g = 3.0 * u * (1.0 + u + u * u) ** (1.0 / 3.0)
    F = np.array([(airy_A(yy / u) * g) @ w for yy in y])
    return CubicSpline(y, F)


def cube_root_source_field(xgrid: Grid1D, tgrid: Grid1D) -> SpaceTimeField:
    """Exact field on ``x >= 0`` of the source ``h(t) = t^(1/3)``.

    The field is self-similar, ``w = t F(x t^(-1/3))``, with
    ``F(y) = int_0^1 3u A(y/u) (1 - u^3)^(1/3) du`` tabulated once.  It removes the
    ``t^(1/3)`` start singularity that a piecewise-linear product rule resolves only
    to first order.
    """
    if xgrid.start < -1e-12 * xgrid.spacing:
        raise ValueError("the field is evaluated on x >= 0 only")
    x = np.clip(xgrid.nodes, 0.0, None)
    t = tgrid.nodes
    if t[0] < 0:
        raise ValueError("the time grid must start at t >= 0")
    prof = _cube_root_profile()
    vals = np.zeros((t.size, x.size))
    live = t > 0
    y = x[None, :] / np.cbrt(t[live])[:, None]
    inside = y < _PROFILE_YMAX
    F = np.zeros_like(y)
    F[inside] = prof(y[inside])
    vals[live] = t[live, None] * F
    return SpaceTimeField(xgrid, tgrid, vals)


# -- Duhamel integral --------------------------------------------------------


def phi_functions(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``exp(z)``, ``phi1 = (e^z - 1)/z`` and ``phi2 = (e^z - 1 - z)/z^2``, stable near 0."""
    z = np.asarray(z, dtype=complex)
    ez = np.exp(z)
    small = np.abs(z) < 0.5
    zs = z[small]
    p1s = np.zeros_like(zs)
    p2s = np.zeros_like(zs)
    term = np.ones_like(zs)
    for k in range(1, 16):
        if k > 1:
            term = term * zs / (k - 1)
        # term == z^(k-1)/(k-1)!
        p1s += term / k
        p2s += term / (k * (k + 1))
    zl = z[~small]
    p1 = np.empty_like(z)
    p2 = np.empty_like(z)
    p1[small] = p1s
    p2[small] = p2s
    p1[~small] = (ez[~small] - 1.0) / zl
    p2[~small] = (ez[~small] - 1.0 - zl) / zl ** 2
    return ez, p1, p2


def duhamel_spectral(plan: PropagatorPlan, coef_source: np.ndarray, dt: float) -> np.ndarray:
    """March ``d/dt w_hat = i xi^3 w_hat + h_hat`` from zero with exponential product-trapezoid steps.

    ``coef_source[n]`` are the source coefficients at ``t_n``; returns coefficients at every node.
    ``h`` is interpolated linearly in time and the propagator integrated exactly, so the
    scheme is second order and unconditionally stable for every mode.
    """
    E, p1, p2 = phi_functions(1j * dt * plan.symbol)
    wa = dt * (p1 - p2)
    wb = dt * p2
    out = np.empty(coef_source.shape, dtype=complex)
    out[0] = 0.0
    for n in range(coef_source.shape[0] - 1):
        out[n + 1] = E * out[n] + wa * coef_source[n] + wb * coef_source[n + 1]
    return out


def duhamel_inhomogeneous(plan: PropagatorPlan, source: SpaceTimeField, tgrid: Grid1D) -> SpaceTimeField:
    """``w(t) = int_0^t S(t - t') source(t') dt'`` on the plan's box."""
    _check_on_plan(plan, source.xgrid)
    if not source.tgrid.matches(tgrid):
        raise ValueError("source time grid differs from tgrid")
    coef = plan.coefficients(source.values, axis=1)
    w = duhamel_spectral(plan, coef, tgrid.spacing)
    vals = plan.samples(w, axis=1)
    return SpaceTimeField(source.xgrid, tgrid, vals)
