"""Checks on computed fields: PDE residuals, mass and energy balance, convergence orders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .core import SampledFunction, SpaceTimeField

__all__ = [
    "IdentityLedger",
    "pde_residual",
    "mass_series",
    "boundary_derivatives",
    "energy_identity",
    "convergence_order",
]


@dataclass(frozen=True)
class IdentityLedger:
    """Both sides of a balance law per time node.

    ``relative_imbalance = |lhs - rhs| / (1 + max(|lhs|, |rhs|))``.
    """

    name: str
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def relative_imbalance(self) -> np.ndarray:
        return np.abs(self.lhs - self.rhs) / (1.0 + np.maximum(np.abs(self.lhs), np.abs(self.rhs)))

    @property
    def max_imbalance(self) -> float:
        return float(np.max(self.relative_imbalance))


# fourth-order stencils
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0                    # offsets -2..2
_D3 = np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0        # offsets -3..3


def _apply_stencil(u: np.ndarray, coeffs: np.ndarray, axis: int, lo: int, hi: int) -> np.ndarray:
    """Sum ``c_j u[i + j]`` over the stencil for indices ``lo..hi-1`` along ``axis``."""
    half = len(coeffs) // 2
    out = 0.0
    for j, c in enumerate(coeffs):
        if c == 0.0:
            continue
        off = j - half
        out = out + c * np.take(u, np.arange(lo + off, hi + off), axis=axis)
    return out


def pde_residual(u: SpaceTimeField, k: int, patch: tuple[float, float, float, float],
                 nonlinearity: float = 1.0) -> float:
    """Max of ``|u_t + u_xxx + nonlinearity * u^k u_x|`` over ``patch``, scaled by ``max|u|``.

    ``patch = (x_min, x_max, t_min, t_max)``; all stencil points must lie inside the field
    and strictly to the right of ``x = 0``, where the boundary source sits.
    """
    x_min, x_max, t_min, t_max = patch
    x, t = u.xgrid.nodes, u.tgrid.nodes
    dx, dt = u.xgrid.spacing, u.tgrid.spacing
    if x_min <= 0.0:
        raise ValueError("patch must exclude x = 0")
    i_lo = int(np.searchsorted(x, x_min - 1e-12 * dx))
    i_hi = int(np.searchsorted(x, x_max + 1e-12 * dx, side="right"))
    n_lo = int(np.searchsorted(t, t_min - 1e-12 * dt))
    n_hi = int(np.searchsorted(t, t_max + 1e-12 * dt, side="right"))
    if i_lo - 3 < 0 or x[i_lo - 3] <= 0.0 or i_hi + 3 > x.size:
        raise ValueError("x-range of the patch too close to the field edge or to x = 0")
    if n_lo - 2 < 0 or n_hi + 2 > t.size:
        raise ValueError("t-range of the patch too close to the field edge")
    if i_hi <= i_lo or n_hi <= n_lo:
        raise ValueError("empty patch")
    scale = float(np.max(np.abs(u.values)))
    if scale == 0.0:
        return 0.0
    v = u.values[:, i_lo - 3:i_hi + 3]
    v = v[n_lo - 2:n_hi + 2]
    ni, nn = i_hi - i_lo, n_hi - n_lo
    ut = _apply_stencil(v[:, 3:3 + ni], _D1, 0, 2, 2 + nn) / dt
    core = v[2:2 + nn]
    ux = _apply_stencil(core, _D1, 1, 3, 3 + ni) / dx
    uxxx = _apply_stencil(core, _D3, 1, 3, 3 + ni) / dx ** 3
    res = ut + uxxx + nonlinearity * core[:, 3:3 + ni] ** k * ux
    return float(np.max(np.abs(res)) / scale)


def _half_line_part(u: SpaceTimeField) -> tuple[np.ndarray, float]:
    i0 = u.xgrid.index_of(0.0)
    if i0 is None:
        raise ValueError("x = 0 must be a node of the field's grid")
    return u.values[:, i0:], u.xgrid.spacing


def mass_series(u: SpaceTimeField) -> SampledFunction:
    """``t -> int_{x>0} |u|^2 dx`` by the trapezoid rule."""
    vals, dx = _half_line_part(u)
    m = np.trapezoid(np.abs(vals) ** 2, dx=dx, axis=1)
    return SampledFunction(u.tgrid, m, "time")


def boundary_derivatives(u: SpaceTimeField) -> tuple[np.ndarray, np.ndarray]:
    """One-sided four-point ``u_x(0, t)`` and ``u_xx(0, t)``."""
    vals, dx = _half_line_part(u)
    if vals.shape[1] < 4:
        raise ValueError("need at least 4 nodes on x >= 0 for the boundary stencils")
    u0, u1, u2, u3 = (vals[:, j] for j in range(4))
    ux = (-11.0 * u0 + 18.0 * u1 - 9.0 * u2 + 2.0 * u3) / (6.0 * dx)
    uxx = (2.0 * u0 - 5.0 * u1 + 4.0 * u2 - u3) / dx ** 2
    return ux, uxx


def energy_identity(u: SpaceTimeField, f: SampledFunction, phi: SampledFunction, k: int,
                    nonlinearity: float = 1.0) -> IdentityLedger:
    """L2 balance on the half-line.

    Multiplying the equation by ``2u`` and integrating over ``x > 0`` gives::

        int u^2(t) + int_0^t u_x(0)^2 - 2 int_0^t u_xx(0) f - 2/(k+2) int_0^t f^(k+2) = int phi^2

    ``f`` must be sampled on the field's time grid and ``phi`` on ``[0, X]``.
    """
    if f.grid.n != u.tgrid.n or not f.grid.same_spacing(u.tgrid):
        raise ValueError("f must be sampled on the field's time grid")
    t = u.tgrid.nodes
    ux, uxx = boundary_derivatives(u)
    fv = np.real(f.values)
    mass = mass_series(u).values
    flux = cumulative_trapezoid(ux ** 2 - 2.0 * uxx * fv
                                - nonlinearity * 2.0 / (k + 2) * fv ** (k + 2), t, initial=0.0)
    lhs = mass + flux
    rhs = np.full_like(lhs, np.trapezoid(np.abs(phi.values) ** 2, dx=phi.grid.spacing))
    return IdentityLedger("half-line L2 balance", t, np.real(lhs), rhs)


def convergence_order(metric_at_resolutions) -> float:
    """Least-squares slope of ``log(error)`` against ``log(step)``."""
    pts = list(metric_at_resolutions)
    if len(pts) < 3:
        raise ValueError("convergence_order needs at least 3 resolutions")
    h = np.array([p[0] for p in pts], dtype=float)
    e = np.array([p[1] for p in pts], dtype=float)
    if np.any(h <= 0) or np.any(e <= 0) or not np.all(np.isfinite(e)):
        raise ValueError("steps and errors must be positive and finite")
    slope, _ = np.polyfit(np.log(h), np.log(e), 1)
    return float(slope)
