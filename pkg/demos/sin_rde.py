"""Solve du = sin(u) d theta for a smooth driver and compare with the closed form.

    python3 demos/sin_rde.py [amp]
"""
import sys

import numpy as np

from pcal import GridSpec, make_field
from pcal.selftest import closed_form_solution
from pcal.signals import gen_sine_bump
from pcal.solvers import SolverConfig, grid_exact_path, paracontrolled_solve

amp = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
spec = GridSpec(8.0, 4096)
T, u0 = 1.0, 0.3
th = gen_sine_bump(spec, T, amp)
F = make_field("sin")
r = paracontrolled_solve(u0, grid_exact_path(th, T), F, cfg=SolverConfig(T=T))
want = closed_form_solution(F, u0, th.values)
w = np.abs(spec.x) <= T
print(f"iterations={r.iterations} lambda={r.lam} flags={r.flags}")
print(f"sup error on [-T, T]: {np.max(np.abs(r.u.values[w] - want[w])):.2e}")
for x in (-1.0, -0.5, 0.0, 0.5, 1.0):
    k = spec.index_of(x)
    print(f"  u({x:+.1f}) = {r.u.values[k]:.10f}   exact {want[k]:.10f}")
