"""Measured constants of the basic Besov inequalities on a seeded corpus.

Every inequality A(f, ...) <= C B(f, ...) is measured as the largest ratio
A / B over a corpus of random trigonometric polynomials.  The corpus is
fixed in continuous terms (frequencies pi k / L with k <= CORPUS_K), so two
grids fine enough to resolve it sample the same functions and the measured
constants can be compared across resolutions.
"""
from __future__ import annotations

import numpy as np

from .calculus import antiderivative, make_localizer, scale
from .errors import ValidationError
from .grid import GridSignal, GridSpec, lp_norm
from .littlewood_paley import BesovIndex, besov_norm_lp, build_partition
from .paraproduct import block_commutator, commutator, paraproduct, resonant
from .parallel import pmap

CORPUS_K = 96
CORPUS_L = 8.0
SCALING_LAMBDAS = (0.5, 0.25, 0.125)


def corpus_signal(spec: GridSpec, rng: np.random.Generator, decay: float = 1.0,
                  k_max: int = CORPUS_K) -> GridSignal:
    """sum_k k^-decay (a_k cos(pi k x / L) + b_k sin(pi k x / L)), Gaussian a, b."""
    if 2 * k_max >= spec.N // 2:
        raise ValidationError(f"N={spec.N} cannot resolve products of corpus signals")
    k = np.arange(1, k_max + 1)
    amp = k ** -float(decay)
    a = rng.standard_normal(k_max) * amp
    b = rng.standard_normal(k_max) * amp
    ph = np.pi * np.outer(k, spec.x) / spec.L
    return GridSignal(spec, a @ np.cos(ph) + b @ np.sin(ph))


def _rngs(seed: int, name: str, n: int):
    tag = sum(name.encode())
    return [np.random.default_rng([seed, tag, i]) for i in range(n)]


def _para_i(spec, part, rng):
    f, g = corpus_signal(spec, rng), corpus_signal(spec, rng, 0.5)
    idx = BesovIndex(0.5, 4, 2)
    return besov_norm_lp(paraproduct(f, g, part), idx, part) / (
        lp_norm(f, np.inf) * besov_norm_lp(g, idx, part))


def _para_ii(spec, part, rng):
    f, g = corpus_signal(spec, rng, 0.2), corpus_signal(spec, rng)
    lhs = besov_norm_lp(paraproduct(f, g, part), BesovIndex(0.1, 4, 2), part)
    return lhs / (besov_norm_lp(f, BesovIndex(-0.5, np.inf, np.inf), part)
                  * besov_norm_lp(g, BesovIndex(0.6, 4, 2), part))


def _para_iii(spec, part, rng):
    f, g = corpus_signal(spec, rng, 0.2), corpus_signal(spec, rng)
    lhs = besov_norm_lp(resonant(f, g, part), BesovIndex(0.2, 4, 2), part)
    return lhs / (besov_norm_lp(f, BesovIndex(-0.3, np.inf, np.inf), part)
                  * besov_norm_lp(g, BesovIndex(0.5, 4, 2), part))


def _com_aux(spec, part, rng):
    alpha = 0.6
    f, g = corpus_signal(spec, rng, 1.5), corpus_signal(spec, rng, 0.5)
    den = besov_norm_lp(f, BesovIndex(alpha, np.inf, np.inf), part) * lp_norm(g, 4)
    return max(2.0 ** (alpha * j) * lp_norm(block_commutator(f, g, j, part), 4)
               for j in range(1, part.J + 1)) / den


def _commutator(spec, part, rng):
    f, g, h = (corpus_signal(spec, rng, 1.0), corpus_signal(spec, rng, 1.0),
               corpus_signal(spec, rng, 0.0))
    lhs = besov_norm_lp(commutator(f, g, h, part), BesovIndex(0.2, 4, 2), part)
    return lhs / (besov_norm_lp(f, BesovIndex(0.4, np.inf, 2), part)
                  * besov_norm_lp(g, BesovIndex(0.4, np.inf, 2), part)
                  * besov_norm_lp(h, BesovIndex(-0.6, 4, 2), part))


def _scaling(spec, part, rng):
    # supported in [-L/16, L/16] so every lambda in SCALING_LAMBDAS keeps it inside
    loc = make_localizer(spec.L / 32, spec).values
    f = loc * corpus_signal(spec, rng, 1.0, k_max=CORPUS_K // 8)
    idx = BesovIndex(0.5, 4, 2)
    nf = besov_norm_lp(f, idx, part)
    out = 0.0
    for lam in SCALING_LAMBDAS:
        bound = (1 + lam**idx.alpha * abs(np.log(lam))) * lam ** (-1 / idx.p) * nf
        out = max(out, besov_norm_lp(scale(f, lam), idx, part) / bound)
    return out


def _antiderivative(spec, part, rng):
    alpha = 0.6
    T = 1.0
    loc = make_localizer(T, spec)
    f = corpus_signal(spec, rng, 0.0)
    lhs = besov_norm_lp(loc.values * antiderivative(f, part), BesovIndex(alpha, 4, 2), part)
    c_phi = max(1.0, T * T) * loc.c1_norm()
    return lhs / (c_phi * besov_norm_lp(f, BesovIndex(alpha - 1, 4, 2), part))


ESTIMATES = {
    "paraproduct_i": _para_i,
    "paraproduct_ii": _para_ii,
    "paraproduct_iii": _para_iii,
    "block_commutator": _com_aux,
    "commutator": _commutator,
    "scaling": _scaling,
    "antiderivative": _antiderivative,
}


def measure_constants(N: int, seed: int = 0, n: int = 20, L: float = CORPUS_L,
                      names=None) -> dict[str, float]:
    """Largest ratio over ``n`` corpus draws for each estimate, on GridSpec(L, N)."""
    spec = GridSpec(L, N)
    part = build_partition(spec)
    names = list(ESTIMATES) if names is None else list(names)
    out = {}
    for name in names:
        fn = ESTIMATES[name]
        vals = pmap(lambda r: fn(spec, part, r), _rngs(seed, name, n))
        out[name] = float(max(vals))
    return out


def stability(coarse: dict, fine: dict) -> dict[str, float]:
    """Relative change |C_fine - C_coarse| / C_coarse per estimate."""
    return {k: abs(fine[k] - coarse[k]) / coarse[k] for k in coarse}
