"""The Airy kernel ``A`` with Fourier transform ``exp(i xi^3)``.

Under the package's Fourier convention

    A(x) = int exp(i x xi) exp(i xi^3) dxi = (2 pi / 3^(1/3)) Ai(x / 3^(1/3)),

with ``Ai`` the classical Airy function, so ``A(0) = 2 pi / (3 Gamma(2/3))``.

Classical ``Ai`` is evaluated piecewise:

* Maclaurin series in extended precision on ``-R <= z <= 1``;
* ``Ai(z) = sqrt(z/3) K_{1/3}(zeta) / pi`` for ``z > 1`` with
  ``K_{1/3}(zeta) = int_0^inf exp(-zeta cosh t) cosh(t/3) dt`` summed by the
  trapezoid rule, which converges geometrically for this integrand;
* the oscillatory Hankel expansion for ``z < -R``, truncated at its smallest term.

The default ``R = 8`` balances the series cancellation (~ e^zeta * 1e-19) against
the asymptotic truncation error (~ e^-2zeta); both are below 1e-13 there.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["AiryEvaluator", "airy_A", "classical_ai", "constant_CA", "DEFAULT_EVALUATOR"]

_LD = np.longdouble
# Ai(0) = 3^(-2/3)/Gamma(2/3) and -Ai'(0) = 3^(-1/3)/Gamma(1/3)
_AI0 = _LD("0.355028053887817239260063186004183176")
_DAI0 = _LD("0.258819403792806798405183560189203963")
_CBRT3 = 3.0 ** (1.0 / 3.0)
_SCALE = 2.0 * math.pi / _CBRT3

# trapezoid nodes for K_{1/3}, in units of min(1, zeta^-1/2)
_K_STEP = 0.3
_K_NODES = 32


@dataclass(frozen=True)
class AiryEvaluator:
    """Piecewise evaluator of classical ``Ai`` and the rescaled kernel ``A``."""

    switchover_radius: float = 8.0
    target_precision: float = 1e-13

    def ai(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(np.isnan(z)):
            raise ValueError("Airy function evaluated at NaN")
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        out = np.empty_like(z)
        R = self.switchover_radius
        mid = (z >= -R) & (z <= 1.0)
        pos = z > 1.0
        neg = z < -R
        if np.any(mid):
            out[mid] = self._series(z[mid])
        if np.any(pos):
            out[pos] = self._bessel_k(z[pos])
        if np.any(neg):
            out[neg] = self._hankel(-z[neg])
        return out[0] if scalar else out

    def A(self, x):
        x = np.asarray(x, dtype=float)
        return _SCALE * self.ai(x / _CBRT3)

    def _series(self, z):
        zl = z.astype(_LD)
        z3 = zl ** 3
        tf = np.ones_like(zl)
        tg = zl.copy()
        f = tf.copy()
        g = tg.copy()
        tol = _LD(self.target_precision) * _LD(1e-6)
        for k in range(200):
            tf = tf * z3 / ((3 * k + 2) * (3 * k + 3))
            tg = tg * z3 / ((3 * k + 3) * (3 * k + 4))
            f += tf
            g += tg
            if np.all(np.abs(tf) <= tol) and np.all(np.abs(tg) <= tol):
                break
        return (_AI0 * f - _DAI0 * g).astype(float)

    def _bessel_k(self, z):
        zeta = (2.0 / 3.0) * z ** 1.5
        out = np.zeros_like(z)
        live = zeta < 745.0
        zeta = zeta[live]
        step = _K_STEP / np.sqrt(np.maximum(zeta, 1.0))
        t = np.arange(_K_NODES)[None, :] * step[:, None]
        integrand = np.exp(-zeta[:, None] * (np.cosh(t) - 1.0)) * np.cosh(t / 3.0)
        integrand[:, 0] *= 0.5
        kval = np.exp(-zeta) * step * integrand.sum(axis=1)
        out[live] = np.sqrt(z[live] / 3.0) / math.pi * kval
        return out

    def _hankel(self, z):
        # Ai(-z) for z > R
        zeta = (2.0 / 3.0) * z ** 1.5
        even = np.zeros_like(z)
        odd = np.zeros_like(z)
        u = 1.0
        last = np.full_like(z, np.inf)
        active = np.ones(z.shape, dtype=bool)
        for k in range(60):
            term = u / zeta ** k
            active &= term < last
            sign = -1.0 if (k // 2) % 2 else 1.0
            if k % 2 == 0:
                even += np.where(active, sign * term, 0.0)
            else:
                odd += np.where(active, sign * term, 0.0)
            last = term
            if not np.any(active):
                break
            u *= (6 * k + 5) * (6 * k + 3) * (6 * k + 1) / (216.0 * (k + 1) * (2 * k + 1))
        phase = zeta - math.pi / 4.0
        return (np.cos(phase) * even + np.sin(phase) * odd) / (math.sqrt(math.pi) * z ** 0.25)


DEFAULT_EVALUATOR = AiryEvaluator()


def classical_ai(z):
    """Classical Airy function Ai."""
    return DEFAULT_EVALUATOR.ai(z)


def airy_A(x):
    """Kernel ``A(x) = int exp(i x xi + i xi^3) dxi`` for real ``x``."""
    return DEFAULT_EVALUATOR.A(x)


@functools.lru_cache(maxsize=None)
def constant_CA() -> float:
    """``C_A = A(0)``, approximately 1.546686."""
    return float(airy_A(0.0))
