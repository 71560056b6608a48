import math
import warnings

import numpy as np
import pytest

from halfline_kdv.airy import constant_CA
from halfline_kdv.core import Grid1D, SampledFunction, SpaceTimeField
from halfline_kdv.fractional import gamma_function, riemann_liouville
from halfline_kdv.solver import (BoundaryProblem, CompatibilityError, PicardConvergenceError,
                                 RunReport, SolverConfig, forcing_pipeline, regularity_threshold,
                                 rescale_problem, select_forcing, solve_linear_homogeneous,
                                 solve_linear_inhomogeneous, solve_nonlinear)

SMALL = SolverConfig(T=0.25, L=20.0, n_x=512, n_t=256, window_T0=0.25)


def make_problem(phi_fn, f_fn, cfg=SMALL, horizon=None):
    half = cfg.half_grid
    T0 = cfg.window_T0
    dt = T0 / (cfg.n_t - 1)
    n = int(math.ceil((horizon or cfg.T + 2 * T0) / dt)) + 1
    tg = Grid1D.from_spacing(0.0, dt, n)
    return BoundaryProblem(SampledFunction(half, phi_fn(half.nodes), "space"),
                           SampledFunction(tg, f_fn(tg.nodes), "time"), cfg)


zero = np.zeros_like


# -- configuration ----------------------------------------------------------


@pytest.mark.parametrize("changes", [dict(s=0.5), dict(s=1.5), dict(s=-0.1), dict(k=0),
                                     dict(n_x=513), dict(window_T0=2.0), dict(picard_tol=0.0),
                                     dict(pad_factor=1)])
def test_config_rejects(changes):
    with pytest.raises(ValueError):
        SolverConfig(**changes)


def test_config_warns_below_threshold():
    with pytest.warns(UserWarning):
        SolverConfig(k=2, s=0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        SolverConfig(k=2, s=0.25)


@pytest.mark.parametrize("k,s", [(1, 0.0), (2, 0.25), (3, 1 / 12), (4, 0.0), (6, 1 / 6)])
def test_regularity_threshold(k, s):
    assert regularity_threshold(k) == pytest.approx(s)


def test_compatibility_required_above_half():
    cfg = SMALL.replace(s=0.75)
    with pytest.raises(CompatibilityError):
        make_problem(np.ones_like, zero, cfg)
    make_problem(np.ones_like, np.ones_like, cfg)


def test_run_report_lengths():
    with pytest.raises(ValueError):
        RunReport(np.zeros(3), np.zeros(3), np.zeros(2), np.zeros(3), [1], True)


# -- forcing selection -------------------------------------------------------


def test_zero_data_gives_zero_forcing():
    h = select_forcing(make_problem(zero, zero), SMALL.window_T0)
    assert h.grid.end == pytest.approx(2 * SMALL.window_T0)
    assert not np.any(h.values)


def test_forcing_for_linear_boundary_data():
    cfg = SMALL.replace(n_t=1024)
    T0 = cfg.window_T0
    pipe = forcing_pipeline(make_problem(zero, lambda t: t, cfg), T0)
    t = pipe.tgrid.nodes
    expected = pipe.psi3 * t ** (1 / 3) / (constant_CA() * gamma_function(2 / 3) * gamma_function(4 / 3))
    sel = (t > 0.05 * T0) & (t <= T0)
    assert np.max(np.abs(pipe.h[sel] - expected[sel])) < 1e-4
    assert np.all(pipe.h[t >= 2 * T0 - 1e-12] == 0)


def test_forcing_claim_on_plateau():
    rng = np.random.default_rng(11)
    a = rng.standard_normal(3)
    cfg = SMALL.replace(n_t=1024)
    prob = make_problem(lambda x: a[0] * x * np.exp(-(x - 3) ** 2),
                        lambda t: a[1] * np.sin(4 * t) + a[2] * t ** 2, cfg)
    pipe = forcing_pipeline(prob, cfg.window_T0)
    back = constant_CA() * gamma_function(2 / 3) * riemann_liouville(
        SampledFunction(pipe.tgrid, pipe.h, "time"), 2 / 3).values
    on = pipe.psi2 == 1.0
    assert np.max(np.abs(back[on] - pipe.f1[on])) / np.max(np.abs(pipe.f1)) < 1e-3


def test_corner_mismatch_is_rejected():
    with pytest.raises(CompatibilityError):
        select_forcing(make_problem(zero, lambda t: 1.0 + t), SMALL.window_T0)


# -- linear solves -----------------------------------------------------------


def test_linear_zero():
    w = solve_linear_homogeneous(make_problem(zero, zero), SMALL.window_T0)
    assert not np.any(w.values)


def test_linear_boundary_and_initial_recovery():
    prob = make_problem(lambda x: x * np.exp(-(x - 2) ** 2), lambda t: np.sin(2 * t))
    w = solve_linear_homogeneous(prob, SMALL.window_T0)
    t = w.tgrid.nodes
    assert np.max(np.abs(w.values[:, 0] - np.sin(2 * t))) < 5e-3
    assert np.max(np.abs(w.values[0] - prob.phi.values)) < 1e-12


def test_linear_compatible_trace_gives_free_evolution():
    from halfline_kdv.special_runs import compatible_problem, compatible_trace_scenario

    half = SMALL.half_grid
    phi = SampledFunction(half, np.exp(-(half.nodes - 4) ** 2))
    sc = compatible_trace_scenario(phi, config=SMALL.replace(nonlinearity=0.0))
    prob = compatible_problem(sc)
    pipe = forcing_pipeline(prob, SMALL.window_T0)
    assert np.max(np.abs(pipe.h)) < 1e-6 * (1 + phi.max_abs())


def _bump_source(cfg, T0, amp=1.0):
    x = cfg.box.nodes
    t = np.linspace(0, T0, cfg.n_t)
    vals = amp * np.exp(-(x[None, :] - 5) ** 2) * np.sin(3 * t)[:, None]
    return SpaceTimeField(cfg.box, Grid1D(0.0, T0, cfg.n_t), vals)


def test_inhomogeneous_boundary_vanishes():
    T0 = SMALL.window_T0
    w = solve_linear_inhomogeneous(_bump_source(SMALL, T0), T0, SMALL)
    assert np.max(np.abs(w.values[:, 0])) < 1e-3
    assert not np.any(w.values[0])


def test_inhomogeneous_zero_and_linear():
    T0 = SMALL.window_T0
    z = _bump_source(SMALL, T0, 0.0)
    assert not np.any(solve_linear_inhomogeneous(z, T0, SMALL).values)
    a = _bump_source(SMALL, T0, 1.0)
    rng = np.random.default_rng(0)
    b = SpaceTimeField(a.xgrid, a.tgrid, a.values * rng.random(a.values.shape[1])[None, :])
    S = lambda f: solve_linear_inhomogeneous(f, T0, SMALL).values
    comb = SpaceTimeField(a.xgrid, a.tgrid, 2 * a.values - 0.5 * b.values)
    scale = np.max(np.abs(S(a)))
    assert np.max(np.abs(S(comb) - 2 * S(a) + 0.5 * S(b))) < 1e-12 * max(scale, 1)


def test_inhomogeneous_grid_mismatch():
    bad = _bump_source(SMALL.replace(n_x=256), SMALL.window_T0)
    with pytest.raises(ValueError):
        solve_linear_inhomogeneous(bad, SMALL.window_T0, SMALL)


# -- nonlinear ---------------------------------------------------------------


@pytest.mark.parametrize("k", [1, 2, 3])
def test_nonlinear_zero(k):
    cfg = SMALL.replace(k=k, s=regularity_threshold(k))
    u, rep = solve_nonlinear(make_problem(zero, zero, cfg))
    assert not np.any(u.values)
    assert rep.picard_iters == [1] and rep.converged


def test_linear_consistency():
    cfg = SMALL.replace(nonlinearity=0.0)
    prob = make_problem(lambda x: np.exp(-(x - 5) ** 2), zero, cfg)
    u, rep = solve_nonlinear(prob)
    w = solve_linear_homogeneous(prob, cfg.window_T0)
    assert rep.picard_iters == [1]
    np.testing.assert_allclose(u.values, w.values, atol=1e-10)


@pytest.fixture(scope="module")
def gaussian_run():
    cfg = SMALL.replace(T=0.5, window_T0=0.25, window_constant=None)
    prob = make_problem(lambda x: 0.8 * np.exp(-(x - 5) ** 2), zero, cfg)
    return prob, solve_nonlinear(prob)


def test_picard_contracts(gaussian_run):
    _, (u, rep) = gaussian_run
    for diffs in rep.residual_history:
        ratios = np.array(diffs[2:]) / np.array(diffs[1:-1])
        assert np.all(ratios < 0.9)
    assert len(rep.picard_iters) == 2


def test_report_series(gaussian_run):
    prob, (u, rep) = gaussian_run
    n = u.tgrid.n
    assert len(rep.times) == len(rep.mass) == len(rep.boundary_error) == n
    assert np.max(rep.boundary_error) < 5e-3
    assert np.max(np.abs(u.values[0] - prob.phi.values)) < 1e-12
    assert np.all(np.diff(rep.mass) <= 1e-6 * rep.mass[0])


def test_non_convergence_reports_history():
    cfg = SMALL.replace(picard_max_iter=2, picard_tol=1e-14, max_retries=1)
    prob = make_problem(lambda x: np.exp(-(x - 5) ** 2), zero, cfg)
    with pytest.raises(PicardConvergenceError) as info:
        solve_nonlinear(prob)
    assert len(info.value.history) == 2
    assert all(len(h) == 2 for h in info.value.history)


# -- scaling -----------------------------------------------------------------


def test_rescale_identity_and_values():
    prob = make_problem(lambda x: np.exp(-x), lambda t: np.exp(-t) * 0 + 1.0)
    same = rescale_problem(prob, 1.0)
    np.testing.assert_array_equal(same.phi.values, prob.phi.values)
    assert same.config.T == prob.config.T
    half = rescale_problem(prob, 0.5)
    x = half.phi.grid.nodes
    np.testing.assert_allclose(half.phi.values, 0.25 * np.exp(-x / 2), rtol=1e-12)
    assert half.config.T == pytest.approx(8 * prob.config.T)
    assert half.config.L == pytest.approx(2 * prob.config.L)
    np.testing.assert_allclose(half.f.values, 0.25 * prob.f.values)


def test_rescale_requires_k1():
    with pytest.raises(ValueError):
        rescale_problem(make_problem(zero, zero, SMALL.replace(k=2, s=0.25)), 0.5)
    with pytest.raises(ValueError):
        rescale_problem(make_problem(zero, zero), 1.5)


def test_nonlinear_window_end_is_smooth():
    # the Duhamel trace is continued past T0; a kinked continuation spoiled the last nodes
    cfg = SMALL.replace(T=0.5)
    u, rep = solve_nonlinear(make_problem(lambda x: np.exp(-(x - 4.0) ** 2), np.zeros_like, cfg))
    assert len(rep.picard_iters) == 2
    err = rep.boundary_error
    # node 255 is t = T0; the first window's tail must look like its interior
    assert err[240:256].max() < 5 * err[200:240].max()
    assert err.max() < 1e-3
