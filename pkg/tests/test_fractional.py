import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import cumulative_trapezoid, quad

from halfline_kdv.core import Grid1D, SampledFunction
from halfline_kdv.diagnostics import convergence_order
from halfline_kdv.fractional import (TraceConditionError, fractional_derivative, gamma_function,
                                     riemann_liouville)


def series(fn, T=1.0, n=1001):
    g = Grid1D(0.0, T, n)
    return SampledFunction(g, fn(g.nodes), "time")


@pytest.mark.parametrize("x,expected", [
    (1.0, 1.0), (0.5, math.sqrt(math.pi)),
    (2 / 3, 1.3541179394264004169), (4 / 3, 0.89297951156924921122),
    (5 / 3, 0.90274529295093361130), (0.1, 9.5135076986687318397), (9.5, 119292.46199449559),
])
def test_gamma_values(x, expected):
    assert gamma_function(x) == pytest.approx(expected, rel=1e-12)


@given(st.floats(0.01, 10.0))
def test_gamma_matches_math(x):
    assert gamma_function(x) == pytest.approx(math.gamma(x), rel=1e-12)


def test_gamma_rejects_nonpositive():
    with pytest.raises(ValueError):
        gamma_function(0.0)


def test_alpha_one_is_cumulative_integral():
    h = series(np.cos)
    r = riemann_liouville(h, 1.0).values
    np.testing.assert_allclose(r, cumulative_trapezoid(h.values, h.nodes, initial=0), atol=1e-14)


def test_constant_two_thirds():
    h = series(np.ones_like)
    r = riemann_liouville(h, 2 / 3).values
    t = h.nodes
    np.testing.assert_allclose(r, 1.1077321674324725 * t ** (2 / 3), rtol=1e-12, atol=1e-15)


def test_power_law_half():
    h = series(lambda t: t)
    r = riemann_liouville(h, 0.5).values
    np.testing.assert_allclose(r, 0.7522527780636750 * h.nodes ** 1.5, atol=1e-14)
    # direct singular quadrature at one node
    val, _ = quad(lambda s: s, 0, 0.5, weight="alg", wvar=(0, -0.5))
    assert r[500] == pytest.approx(val / math.gamma(0.5), rel=1e-12)


def test_derivative_of_power_two_thirds():
    f = series(lambda t: t ** (2 / 3), n=4001)
    d = fractional_derivative(f, 2 / 3).values
    assert np.max(np.abs(d[400:] - 0.9027452929509336)) < 1e-3


def test_derivative_of_linear():
    f = series(lambda t: t, n=2001)
    d = fractional_derivative(f, 2 / 3).values
    t = f.nodes
    assert np.max(np.abs(d[20:] - 1.1198465217221857 * t[20:] ** (1 / 3))) < 1e-5


def test_round_trip():
    f = series(lambda t: t ** 2 * np.exp(-t))
    back = fractional_derivative(riemann_liouville(f, 2 / 3), 2 / 3).values
    assert np.max(np.abs(back - f.values)) < 5e-4


def test_left_inverse_converges():
    pts = []
    for n in (251, 501, 1001):
        f = series(lambda t: np.sin(3 * t) * t, n=n)
        back = fractional_derivative(riemann_liouville(f, 1 / 3), 1 / 3).values
        pts.append((f.grid.spacing, np.max(np.abs(back - f.values))))
    assert convergence_order(pts) >= 1.0


def test_semigroup_order():
    pts = []
    for n in (251, 501, 1001):
        h = series(lambda t: t ** 2 * np.exp(-t), n=n)
        a = riemann_liouville(riemann_liouville(h, 1 / 3), 1 / 3).values
        b = riemann_liouville(h, 2 / 3).values
        pts.append((h.grid.spacing, np.max(np.abs(a - b))))
    assert convergence_order(pts) >= 1.9


def test_trace_condition():
    with pytest.raises(TraceConditionError, match="trace"):
        fractional_derivative(series(np.cos), 2 / 3)
    with pytest.raises(ValueError):
        fractional_derivative(series(np.sin), 1.0)
    with pytest.raises(ValueError):
        riemann_liouville(series(np.sin), 0.0)


def test_negative_times_must_vanish():
    g = Grid1D(-0.1, 1.0, 111)
    ok = SampledFunction(g, np.where(g.nodes < 0, 0.0, g.nodes), "time")
    r = riemann_liouville(ok, 0.5).values
    assert np.all(r[g.nodes < 0] == 0)
    with pytest.raises(ValueError):
        riemann_liouville(SampledFunction(g, np.ones(g.n), "time"), 0.5)


@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0))
def test_positivity_and_linearity(seed, alpha):
    rng = np.random.default_rng(seed)
    g = Grid1D(0.0, 1.0, 201)
    u, v = rng.random(g.n), rng.standard_normal(g.n)
    I = lambda w: riemann_liouville(SampledFunction(g, w, "time"), alpha).values
    assert np.all(I(u) >= 0)
    np.testing.assert_allclose(I(2.5 * u - 1.5 * v), 2.5 * I(u) - 1.5 * I(v), atol=1e-13)
