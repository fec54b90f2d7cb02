"""Block norms and estimated regularity of a few test signals.

    python3 demos/regularity_ladder.py
"""
import numpy as np

from pcal import GridSpec, build_partition, regularity_estimate
from pcal.littlewood_paley import block_norms
from pcal.signals import gen_brownian, gen_fbm, gen_weierstrass

spec = GridSpec(8.0, 4096)
part = build_partition(spec)
signals = {
    "weierstrass a0=0.4": (gen_weierstrass(spec, 0.4), np.inf),
    "brownian": (gen_brownian(spec, 1.0, seed=0), 2),
    "fbm H=0.7": (gen_fbm(0.7, spec, 1.0, seed=0), 4),
}
for name, (f, p) in signals.items():
    bn = block_norms(f, p, part)
    print(f"{name:20s} alpha_hat={regularity_estimate(f, p, part):.3f}")
    print("   log2 ||Delta_j f||_p:", " ".join(f"{v:6.2f}" for v in np.log2(bn[2:-1])))
