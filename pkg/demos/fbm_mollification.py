"""Distance between solutions driven by fBM mollified at eps, eps/2, eps/4.

    python3 demos/fbm_mollification.py [seed]
"""
import sys

from pcal import GridSignal, GridSpec, make_field
from pcal.calculus import make_localizer
from pcal.littlewood_paley import BesovIndex, besov_norm_lp
from pcal.signals import gen_fbm, mollify
from pcal.solvers import SolverConfig, grid_exact_path, paracontrolled_solve

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
spec = GridSpec(8.0, 2**14)
T = 1.0
idx = BesovIndex(0.34, 4, 2)
cfg = SolverConfig(T=T, besov=idx)
loc = make_localizer(T, spec).values.values
B = gen_fbm(0.45, spec, T, seed, localize=False)
us = []
for eps in (0.016, 0.008, 0.004, 0.002):
    Be = mollify(B, eps)
    th = GridSignal(spec, loc * (Be.values - Be.at_origin()))
    us.append(paracontrolled_solve(0.3, grid_exact_path(th, T), make_field("sin"), cfg=cfg).u_tilde)
for i in range(len(us) - 1):
    d = besov_norm_lp(us[i] - us[i + 1], idx)
    d0 = besov_norm_lp(us[i] - us[i + 1], BesovIndex(0.0, 4, 2))
    print(f"step {i}: B^0.34_4,2 {d:.4e}   B^0_4,2 {d0:.4e}")
