"""Grids, sampled and spectral representations, Sobolev norms, extensions and cutoffs.

Fourier convention used throughout the package::

    fhat(xi) = (1/2pi) * int exp(-i x xi) f(x) dx,      f(x) = int exp(i x xi) fhat(xi) dxi

On a periodic box ``[-L, L)`` sampled at ``n`` nodes the integrals become
Riemann sums with ``dx = 2L/n`` and ``dxi = pi/L``, so that
``sum |f|^2 dx == 2 pi sum |fhat|^2 dxi`` holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid1D",
    "SampledFunction",
    "SpectralField",
    "SpaceTimeField",
    "forward_transform",
    "inverse_transform",
    "reference_dft",
    "spectral_derivative",
    "sobolev_norm",
    "extend_halfline",
    "extend_halfline_values",
    "reflection_coefficients",
    "smooth_cutoff",
    "smooth_step",
]

_GRID_RTOL = 1e-10


def _freeze(values):
    arr = np.array(values, copy=True)
    if arr.dtype.kind not in "fc":
        arr = arr.astype(float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``start + i*spacing`` for ``i = 0..n-1``."""

    start: float
    end: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid needs at least 2 nodes, got n={self.n}")
        if not (np.isfinite(self.start) and np.isfinite(self.end)):
            raise ValueError("grid endpoints must be finite")
        if not self.end > self.start:
            raise ValueError(f"grid end {self.end} must exceed start {self.start}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "end", float(self.end))

    @classmethod
    def from_spacing(cls, start: float, spacing: float, n: int) -> "Grid1D":
        return cls(start, start + (n - 1) * spacing, n)

    @classmethod
    def periodic(cls, half_width: float, n: int) -> "Grid1D":
        """One period of the box ``[-L, L)``; the right endpoint is not a node."""
        dx = 2.0 * half_width / n
        return cls(-half_width, half_width - dx, n)

    @property
    def spacing(self) -> float:
        return (self.end - self.start) / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.start + np.arange(self.n) * self.spacing

    @property
    def period(self) -> float:
        """Length of the periodic box this grid samples."""
        return self.n * self.spacing

    def index_of(self, x: float) -> int | None:
        """Index of the node at ``x``, or None when ``x`` is not a node."""
        pos = (x - self.start) / self.spacing
        i = int(round(pos))
        if 0 <= i < self.n and abs(pos - i) < 1e-8:
            return i
        return None

    def same_spacing(self, other: "Grid1D") -> bool:
        return bool(np.isclose(self.spacing, other.spacing, rtol=_GRID_RTOL, atol=0.0))

    def matches(self, other: "Grid1D") -> bool:
        scale = max(abs(self.start), abs(self.end), self.spacing)
        return (
            self.n == other.n
            and abs(self.start - other.start) <= _GRID_RTOL * scale
            and self.same_spacing(other)
        )

    def scaled(self, factor: float) -> "Grid1D":
        return Grid1D(self.start * factor, self.end * factor, self.n)


@dataclass(frozen=True)
class SampledFunction:
    """Samples of a function on a uniform grid; ``domain_tag`` is "space" or "time"."""

    grid: Grid1D
    values: np.ndarray
    domain_tag: str = "space"

    def __post_init__(self):
        if self.domain_tag not in ("space", "time"):
            raise ValueError(f"domain_tag must be 'space' or 'time', got {self.domain_tag!r}")
        vals = _freeze(self.values)
        if vals.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("sampled values contain NaN or Inf")
        object.__setattr__(self, "values", vals)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values) or not np.any(self.values.imag)

    def with_values(self, values) -> "SampledFunction":
        return SampledFunction(self.grid, values, self.domain_tag)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients on sorted angular wavenumbers ``xi_j = pi j / L``."""

    wavenumbers: np.ndarray
    coefficients: np.ndarray
    base_grid: Grid1D

    def __post_init__(self):
        object.__setattr__(self, "wavenumbers", _freeze(self.wavenumbers))
        object.__setattr__(self, "coefficients", _freeze(np.asarray(self.coefficients, complex)))
        if self.wavenumbers.shape != self.coefficients.shape:
            raise ValueError("wavenumbers and coefficients differ in shape")

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.base_grid.period


@dataclass(frozen=True)
class SpaceTimeField:
    """Values ``u(x_i, t_n)`` stored as ``values[n, i]``."""

    xgrid: Grid1D
    tgrid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        vals = _freeze(self.values)
        if vals.shape != (self.tgrid.n, self.xgrid.n):
            raise ValueError(
                f"field shape {vals.shape} does not match (nt, nx) = ({self.tgrid.n}, {self.xgrid.n})"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field contains NaN or Inf")
        object.__setattr__(self, "values", vals)

    def at_time(self, n: int) -> SampledFunction:
        return SampledFunction(self.xgrid, self.values[n], "space")

    def at_x(self, x: float) -> SampledFunction:
        i = self.xgrid.index_of(x)
        if i is None:
            raise ValueError(f"x = {x} is not a node of the spatial grid")
        return SampledFunction(self.tgrid, self.values[:, i], "time")


# -- transforms --------------------------------------------------------------


def _wavenumbers(grid: Grid1D) -> np.ndarray:
    """Unshifted (numpy FFT order) angular wavenumbers of a periodic grid."""
    return 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.spacing)


def _phase(grid: Grid1D, xi: np.ndarray) -> np.ndarray:
    # FFT assumes the first node sits at x = 0
    return np.exp(-1j * grid.start * xi)


def forward_transform(f: SampledFunction) -> SpectralField:
    """Discrete Fourier coefficients of ``f`` treated as one period of a periodic function."""
    if f.domain_tag != "space":
        raise ValueError("forward_transform expects a spatial sample")
    grid = f.grid
    xi = _wavenumbers(grid)
    coef = grid.spacing / (2.0 * np.pi) * _phase(grid, xi) * np.fft.fft(f.values)
    return SpectralField(np.fft.fftshift(xi), np.fft.fftshift(coef), grid)


def inverse_transform(F: SpectralField) -> SampledFunction:
    grid = F.base_grid
    xi = np.fft.ifftshift(F.wavenumbers)
    coef = np.fft.ifftshift(F.coefficients)
    vals = np.fft.ifft(coef / _phase(grid, xi)) * (2.0 * np.pi / grid.spacing)
    return SampledFunction(grid, vals, "space")


def reference_dft(f: SampledFunction) -> SpectralField:
    """Direct O(n^2) evaluation of the forward transform, valid for any ``n``."""
    grid = f.grid
    x = grid.nodes
    xi = np.fft.fftshift(_wavenumbers(grid))
    kernel = np.exp(-1j * np.outer(xi, x))
    coef = grid.spacing / (2.0 * np.pi) * (kernel @ np.asarray(f.values, complex))
    return SpectralField(xi, coef, grid)


def spectral_derivative(values: np.ndarray, grid: Grid1D, order: int = 1, axis: int = -1) -> np.ndarray:
    """``d^order/dx^order`` of periodic samples; the Nyquist mode is dropped for odd orders."""
    xi = _wavenumbers(grid)
    mult = (1j * xi) ** order
    if order % 2 == 1 and grid.n % 2 == 0:
        mult[grid.n // 2] = 0.0
    shape = [1] * np.ndim(values)
    shape[axis] = grid.n
    out = np.fft.ifft(np.fft.fft(values, axis=axis) * mult.reshape(shape), axis=axis)
    if not np.iscomplexobj(values):
        out = out.real
    return out


def sobolev_norm(f: SampledFunction, s: float, homogeneous: bool = False) -> float:
    """Discrete H^s (weight ``1+|xi|``) or homogeneous H^s (weight ``|xi|``) norm."""
    if not -2.0 <= s <= 2.0:
        raise ValueError(f"Sobolev index s={s} outside [-2, 2]")
    F = forward_transform(f)
    xi, c = F.wavenumbers, F.coefficients
    power = np.abs(c) ** 2
    if homogeneous:
        w = np.abs(xi)
        zero = w == 0.0
        if s < 0 and np.any(power[zero] > (1e-28 * max(power.max(), 1e-300))):
            raise ValueError("homogeneous norm with s < 0 is undefined for a nonzero mean")
        weights = np.zeros_like(w)
        weights[~zero] = w[~zero] ** (2.0 * s)
        if s == 0:
            weights[zero] = 1.0
    else:
        weights = (1.0 + np.abs(xi)) ** (2.0 * s)
    return float(np.sqrt(2.0 * np.pi * F.dxi * np.sum(weights * power)))


# -- cutoffs and extension ---------------------------------------------------


def smooth_step(r):
    """C-infinity ramp equal to 1 for r <= 0 and 0 for r >= 1."""
    r = np.asarray(r, dtype=float)
    out = np.where(r <= 0.0, 1.0, 0.0)
    mid = (r > 0.0) & (r < 1.0)
    rm = r[mid]
    a = np.exp(-1.0 / (1.0 - rm))
    b = np.exp(-1.0 / rm)
    out[mid] = a / (a + b)
    return out


def _cutoff_values(x, plateau, support):
    r = (np.abs(x) - plateau) / (support - plateau)
    return smooth_step(r)


def smooth_cutoff(plateau_halfwidth: float, support_halfwidth: float, grid: Grid1D,
                  domain_tag: str = "time") -> SampledFunction:
    """Even cutoff: 1 on ``[-T, T]``, 0 outside ``[-S, S]``, smooth in between."""
    T, S = plateau_halfwidth, support_halfwidth
    if not 0.0 < T < S:
        raise ValueError(f"need 0 < plateau ({T}) < support ({S})")
    return SampledFunction(grid, _cutoff_values(grid.nodes, T, S), domain_tag)


def extend_halfline(phi: SampledFunction, s: float, target: Grid1D,
                    width: float | None = None, terms: int = 2) -> SampledFunction:
    """Extend samples on ``[0, X]`` to ``target`` by two-term reflection.

    For ``x < 0`` the extension is ``(3 phi(-x) - 2 phi(-2x)) * chi(x)``, which matches
    value and slope at the origin.  ``chi`` is a smooth cutoff supported on
    ``[-width, width]`` (default ``min(X/2, 0.45 L)``) with a plateau of half that size.
    Values of ``phi`` beyond ``X`` are taken as zero.  ``terms > 2`` selects a
    higher-order reflection matching ``terms - 1`` derivatives.
    """
    if not -2.0 <= s <= 2.0:
        raise ValueError(f"Sobolev index s={s} outside [-2, 2]")
    g = phi.grid
    if not g.same_spacing(target):
        raise ValueError("extension target must share the spacing of the half-line samples")
    if abs(g.start) > 1e-9 * g.spacing:
        raise ValueError("half-line samples must start at x = 0")
    i0 = target.index_of(0.0)
    if i0 is None or target.end < g.end - 1e-9 * g.spacing:
        raise ValueError("target grid must contain [0, X] on its nodes")
    out = extend_halfline_values(phi.values, g.spacing, target, width, terms)
    return SampledFunction(target, out, "space")


def reflection_coefficients(terms: int) -> np.ndarray:
    """Weights ``a_j`` with ``sum_j a_j (-j)^m = 1`` for ``m < terms``.

    ``sum_j a_j phi(j x)`` then continues ``phi`` to ``x < 0`` with ``terms - 1`` matching
    derivatives at the origin; ``terms = 2`` gives ``3 phi(x) - 2 phi(2x)``.
    """
    if terms < 1:
        raise ValueError("need at least one reflection term")
    b = np.arange(1, terms + 1, dtype=float)
    V = (-b[None, :]) ** np.arange(terms)[:, None]
    return np.rint(np.linalg.solve(V, np.ones(terms)))


def extend_halfline_values(values: np.ndarray, spacing: float, target: Grid1D,
                           width: float | None = None, terms: int = 2) -> np.ndarray:
    """Array version of :func:`extend_halfline` acting on the last axis of ``values``.

    ``values[..., j]`` holds samples at ``x = j * spacing``; returns samples on ``target``.
    ``terms`` sets the number of reflected copies (see :func:`reflection_coefficients`).
    """
    vals = np.asarray(values)
    m = vals.shape[-1]
    i0 = target.index_of(0.0)
    if i0 is None:
        raise ValueError("target grid must contain x = 0 as a node")
    X = (m - 1) * spacing
    L = -target.start
    if width is None:
        width = min(0.5 * X, 0.45 * L)
    width = min(width, X / terms, L)
    dtype = np.result_type(vals.dtype, float)
    out = np.zeros(vals.shape[:-1] + (target.n,), dtype=dtype)
    nr = min(m, target.n - i0)
    out[..., i0:i0 + nr] = vals[..., :nr]
    nl = i0
    j = np.arange(1, nl + 1)
    chi = _cutoff_values(-j * spacing, 0.5 * width, width)
    live = chi > 0
    j, chi = j[live], chi[live]
    jmax = int(j[-1]) if j.size else 0
    padded = np.zeros(vals.shape[:-1] + (max(terms * jmax + 1, m),), dtype=dtype)
    padded[..., :m] = vals
    refl = 0.0
    for q, a in enumerate(reflection_coefficients(terms), start=1):
        refl = refl + a * padded[..., q * j]
    out[..., i0 - j] = refl * chi
    return out
