import numpy as np
import pytest

from halfline_kdv.core import Grid1D, SampledFunction
from halfline_kdv.solver import SolverConfig, forcing_pipeline
from halfline_kdv.special_runs import (SCENARIOS, compatible_problem, compatible_trace_scenario,
                                       gaussian_pulse, get_scenario, residual_gate, soliton_k1,
                                       soliton_k2)


@pytest.mark.parametrize("builder", [soliton_k1, soliton_k2])
@pytest.mark.parametrize("c", [0.5, 1.0, 2.5])
def test_soliton_residual_gate(builder, c):
    assert residual_gate(builder(c=c, x0=-6.0)) < 1e-6


def test_wrong_amplitude_fails_gate():
    sc = soliton_k1()
    good = sc.exact_solution
    sc.exact_solution = lambda x, t: 1.1 * good(x, t)
    assert residual_gate(sc) > 1e-3


def test_soliton_peaks_and_symmetry():
    sc1 = soliton_k1(c=2.0, x0=-5.0)
    assert sc1.exact_solution(2.0 * 0.7 - 5.0, 0.7) == pytest.approx(6.0)
    sc2 = soliton_k2(c=2.0, x0=-5.0)
    crest = 2.0 * 0.3 - 5.0
    assert sc2.exact_solution(crest, 0.3) == pytest.approx(np.sqrt(12.0))
    d = np.linspace(0, 4, 9)
    np.testing.assert_allclose(sc2.exact_solution(crest + d, 0.3), sc2.exact_solution(crest - d, 0.3))
    for sc in (sc1, sc2):
        assert sc.phi(np.array([0.0]))[0] == sc.f(np.array([0.0]))[0]


@pytest.mark.parametrize("kw", [dict(c=0.0), dict(c=5.0), dict(x0=1.0)])
def test_soliton_preconditions(kw):
    with pytest.raises(ValueError):
        soliton_k1(**kw)


def test_registry():
    assert set(SCENARIOS) >= {"soliton_k1", "soliton_k2", "gaussian_decay", "linear_sine", "zero"}
    assert get_scenario("soliton_k2").k == 2
    with pytest.raises(KeyError):
        get_scenario("nope")


def test_problem_sampling():
    cfg = SolverConfig(T=0.5, L=20.0, n_x=256, n_t=64, window_T0=0.25)
    prob = gaussian_pulse(config=cfg).problem()
    assert prob.phi.grid.matches(cfg.half_grid)
    assert prob.f.grid.spacing == pytest.approx(0.25 / 63)
    assert prob.f.grid.end >= cfg.T + 2 * cfg.window_T0 - 1e-12


SMALL = SolverConfig(T=0.25, window_T0=0.25, L=20.0, n_x=512, n_t=256, nonlinearity=0.0)


def test_compatible_trace_zero():
    half = SMALL.half_grid
    sc = compatible_trace_scenario(SampledFunction(half, np.zeros(half.n)), config=SMALL)
    pipe = forcing_pipeline(compatible_problem(sc), SMALL.window_T0)
    assert not np.any(pipe.h)


@pytest.mark.parametrize("center", [0.0, 3.0])
def test_compatible_trace_gaussian(center):
    half = SMALL.half_grid
    phi = SampledFunction(half, np.exp(-(half.nodes - center) ** 2))
    sc = compatible_trace_scenario(phi, config=SMALL)
    prob = compatible_problem(sc)
    assert prob.phi.values[0] == pytest.approx(prob.f.values[0], abs=1e-12)
    pipe = forcing_pipeline(prob, SMALL.window_T0)
    assert np.max(np.abs(pipe.h)) < 1e-6 * (1 + phi.max_abs())


def test_compatible_trace_needs_matching_spacing():
    g = Grid1D(0.0, 10.0, 77)
    with pytest.raises(ValueError):
        compatible_trace_scenario(SampledFunction(g, np.zeros(77)), config=SMALL)
