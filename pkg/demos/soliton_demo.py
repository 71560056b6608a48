"""Run the KdV soliton through the half-line solver and compare with the exact solution.

    python3 demos/soliton_demo.py
"""

import numpy as np

from halfline_kdv import get_scenario, solve_nonlinear

sc = get_scenario("soliton_k1", c=1.0, x0=-10.0)
cfg = sc.config.replace(T=0.5)
u, report = solve_nonlinear(sc.problem(cfg))

exact = sc.exact_field(u.xgrid, u.tgrid).values
err = np.linalg.norm(u.values.real - exact, axis=1) / np.linalg.norm(exact, axis=1)

print(f"windows: {len(report.picard_iters)}, Picard iterations per window: {report.picard_iters}")
print(f"max relative L2 error vs exact soliton: {err.max():.3e}")
print(f"max boundary error |u(0,t) - f(t)|:     {report.boundary_error.max():.3e}")
for t, e in zip(u.tgrid.nodes[::len(err) // 5], err[::len(err) // 5]):
    print(f"  t = {t:.3f}   error = {e:.3e}")
