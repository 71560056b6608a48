"""Show the boundary forcing for zero initial data and f(t) = sin(2t).

The forcing h reproduces f at x = 0 once it is fed through the Airy point source.

    python3 demos/forcing_demo.py
"""

import numpy as np

from halfline_kdv import (BoundaryProblem, Grid1D, SampledFunction, SolverConfig,
                          forcing_pipeline, solve_linear_homogeneous)

cfg = SolverConfig(T=0.5, window_T0=0.5, n_x=1024, n_t=512, nonlinearity=0.0)
half = cfg.half_grid
tg = Grid1D(0.0, 1.0, 2 * cfg.n_t - 1)
prob = BoundaryProblem(SampledFunction(half, np.zeros(half.n), "space"),
                       SampledFunction(tg, np.sin(2.0 * tg.nodes), "time"), cfg)

pipe = forcing_pipeline(prob, cfg.window_T0)
w = solve_linear_homogeneous(prob, cfg.window_T0)
trace = w.values[:, 0].real
target = np.sin(2.0 * w.tgrid.nodes)

print(f"singular coefficient of h near t = 0: {pipe.beta.real:.6f}")
print("   t       h(t)        w(0,t)      f(t)")
for i in range(0, w.tgrid.n, w.tgrid.n // 8):
    print(f"{w.tgrid.nodes[i]:6.3f} {pipe.h[i].real:11.6f} {trace[i]:11.6f} {target[i]:11.6f}")
print(f"sup |w(0,t) - f(t)| = {np.max(np.abs(trace - target)):.3e}")
