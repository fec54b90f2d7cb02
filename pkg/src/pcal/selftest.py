"""Invariant suites run by ``pcal selftest`` and closed-form ODE oracles.

Every suite is deterministic for a given seed and reports plain numbers, so
two runs with the same seed give byte-identical JSON.
"""
from __future__ import annotations

import numpy as np

from .composition import VectorField, make_field, pi_F
from .estimates import measure_constants, stability
from .grid import GridSignal, GridSpec
from .littlewood_paley import blocks_array, build_partition
from .paraproduct import bony_product, paraproduct, resonant
from .calculus import derivative, make_localizer
from .signals import gen_sine_bump, localized_resonant
from .solvers import (SolverConfig, grid_exact_path, paracontrolled_solve, reduced_resonant,
                      young_solve)

SMALL = GridSpec(8.0, 1024)
MEDIUM = GridSpec(8.0, 4096)


def closed_form_solution(F: VectorField, u0: float, theta: np.ndarray):
    """Exact solution of du = F(u) d theta for the scalar fields that have one.

    zero: u0; linear a u: u0 exp(a theta); c sin(u): 2 arctan(tan(u0 / 2) exp(c theta)).
    Returns None for other fields.
    """
    if not F.is_scalar:
        return None
    if F.name == "zero":
        return np.full_like(theta, float(u0))
    if F.name == "linear":
        return u0 * np.exp(F.coeff * theta)
    if F.name == "sin" and abs(u0) < np.pi:
        return 2.0 * np.arctan(np.tan(0.5 * u0) * np.exp(F.coeff * theta))
    return None


def _rng(seed: int, tag: int):
    return np.random.default_rng([seed, tag])


def _random_smooth(spec: GridSpec, rng, k_max: int = 64) -> GridSignal:
    k = np.arange(1, k_max + 1)
    a = rng.standard_normal(k_max) / k
    b = rng.standard_normal(k_max) / k
    ph = np.pi * np.outer(k, spec.x) / spec.L
    return GridSignal(spec, rng.standard_normal() + a @ np.cos(ph) + b @ np.sin(ph))


def suite_partition(seed: int, n: int = 100) -> dict:
    part = build_partition(SMALL)
    ident = float(np.max(np.abs(part.masks.sum(axis=0) - 1.0)))
    rng = _rng(seed, 1)
    worst = 0.0
    for _ in range(n):
        v = rng.standard_normal(SMALL.N)
        B = blocks_array(v, part)
        worst = max(worst, float(np.max(np.abs(B.sum(axis=0) - v)) / np.max(np.abs(v))))
    return {"passed": ident < 1e-12 and worst < 1e-10,
            "identity_deviation": ident, "reconstruction_rel": worst, "signals": n}


def suite_bony(seed: int, n: int = 100) -> dict:
    part = build_partition(SMALL)
    rng = _rng(seed, 2)
    worst = 0.0
    for _ in range(n):
        f = GridSignal(SMALL, rng.standard_normal(SMALL.N))
        g = GridSignal(SMALL, rng.standard_normal(SMALL.N))
        bp = bony_product(f, g, part)
        fg = f.values * g.values
        worst = max(worst, float(np.max(np.abs(bp.product.values - fg)) / np.max(np.abs(fg))))
    return {"passed": worst < 1e-9, "regrouping_rel": worst, "pairs": n}


def suite_pi_F(seed: int) -> dict:
    part = build_partition(SMALL)
    rng = _rng(seed, 3)
    u = _random_smooth(SMALL, rng)
    xi = derivative(_random_smooth(SMALL, rng))
    lin = pi_F(make_field("linear", a=1.7), u, xi, part)
    scl = float(np.max(np.abs(u.values)) * np.max(np.abs(xi.values)))
    cancel = float(np.max(np.abs(lin.values))) / scl
    F = make_field("sin")
    lhs = resonant(GridSignal(SMALL, np.sin(u.values)), xi, part)
    rhs = GridSignal(SMALL, np.cos(u.values)) * resonant(u, xi, part) + pi_F(F, u, xi, part)
    rel = float(np.max(np.abs(lhs.values - rhs.values)) / np.max(np.abs(lhs.values)))
    return {"passed": cancel < 1e-9 and rel < 1e-9, "linear_cancellation": cancel,
            "sin_identity_rel": rel}


def suite_reduced_resonant(seed: int) -> dict:
    part = build_partition(SMALL)
    rng = _rng(seed, 4)
    T = 1.0
    loc = make_localizer(T, SMALL).values
    th = loc * _random_smooth(SMALL, rng, 16)
    th = th - GridSignal(SMALL, loc.values * th.at_origin())
    rp = grid_exact_path(th, T)
    F = make_field("sin")
    ut = _random_smooth(SMALL, rng, 16)
    us = ut - paraproduct(GridSignal(SMALL, np.sin(ut.values)), th, part)
    got = reduced_resonant(ut, us, rp, F, part)
    want = resonant(GridSignal(SMALL, np.sin(ut.values)), rp.xi, part)
    rel = float(np.max(np.abs(got.values - want.values)) / np.max(np.abs(want.values)))
    return {"passed": rel < 1e-9, "oracle_rel": rel}


def suite_young(seed: int) -> dict:
    T = 1.0
    amp = 0.5 + 0.5 * _rng(seed, 5).random()
    th = gen_sine_bump(MEDIUM, T, amp)
    a, u0 = 0.5, 1.0
    cfg = SolverConfig(T=T)
    r = young_solve(u0, derivative(th), make_field("linear", a=a), cfg)
    want = closed_form_solution(make_field("linear", a=a), u0, th.values)
    win = np.abs(MEDIUM.x) <= T
    err = float(np.max(np.abs(r.u.values[win] - want[win])))
    z1 = young_solve(u0, GridSignal.zeros(MEDIUM), make_field("linear", a=a), cfg)
    z2 = young_solve(u0, derivative(th), make_field("zero"), cfg)
    flat = max(float(np.max(np.abs(z.u.values[win] - u0))) for z in (z1, z2))
    return {"passed": err < 1e-6 and flat <= cfg.tol, "sup_error": err,
            "constant_cases_error": flat, "iterations": r.iterations, "amp": amp}


def suite_paracontrolled(seed: int) -> dict:
    T = 1.0
    amp = 0.5 + 0.5 * _rng(seed, 6).random()
    th = gen_sine_bump(MEDIUM, T, amp)
    F = make_field("sin")
    u0 = 0.3
    r = paracontrolled_solve(u0, grid_exact_path(th, T), F, cfg=SolverConfig(T=T))
    want = closed_form_solution(F, u0, th.values)
    win = np.abs(MEDIUM.x) <= T
    err = float(np.max(np.abs(r.u.values[win] - want[win])))
    anchor = abs(float(r.u_tilde.at_origin()) - u0)
    return {"passed": err < 1e-4 and anchor == 0.0, "sup_error": err, "anchor_error": anchor,
            "iterations": r.iterations, "amp": amp}


def suite_localized_resonant(seed: int) -> dict:
    rng = _rng(seed, 7)
    X = _random_smooth(SMALL, rng, 32)
    res = localized_resonant(X, make_localizer(1.0, SMALL))
    return {"passed": res.rel_gap < 1e-9, "rel_gap": res.rel_gap}


def suite_constants(seed: int, n: int = 20) -> dict:
    coarse = measure_constants(1024, seed, n)
    fine = measure_constants(4096, seed, n)
    change = stability(coarse, fine)
    return {"passed": all(v < 0.5 for v in change.values()),
            "coarse": coarse, "fine": fine, "relative_change": change}


SUITES = {
    "partition": suite_partition,
    "bony": suite_bony,
    "pi_F": suite_pi_F,
    "reduced_resonant": suite_reduced_resonant,
    "young": suite_young,
    "paracontrolled": suite_paracontrolled,
    "localized_resonant": suite_localized_resonant,
    "constants": suite_constants,
}


def run_selftest(seed: int = 0, only=None) -> dict:
    names = list(SUITES) if only is None else list(only)
    results = {name: SUITES[name](seed) for name in names}
    return {"seed": seed, "suites": results, "passed": all(r["passed"] for r in results.values())}
