"""Acceptance criteria, one test per criterion at the stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary lists
one PASS/FAIL line per criterion.
"""
import os
import subprocess
import sys

import numpy as np

from pcal.calculus import derivative, make_localizer
from pcal.composition import make_field, pi_F
from pcal.estimates import measure_constants, stability
from pcal.grid import GridSignal, GridSpec
from pcal.littlewood_paley import BesovIndex, besov_norm_lp, blocks_array, build_partition, regularity_estimate
from pcal.paraproduct import bony_product, paraproduct, resonant
from pcal.parallel import pmap
from pcal.signals import (RandomSeriesParams, gen_fbm, gen_sine_bump, gen_wavelet_series,
                          gen_weierstrass, lift, mollify)
from pcal.solvers import SolverConfig, grid_exact_path, paracontrolled_solve, reduced_resonant, young_solve

from conftest import smooth_signal

SEED = 0


def test_partition_and_reconstruction(criterion):
    criterion(1, "partition and reconstruction")
    spec = GridSpec(8.0, 1024)
    part = build_partition(spec)
    ident = np.max(np.abs(part.masks.sum(axis=0) - 1.0))
    rng = np.random.default_rng([SEED, 1])
    worst = 0.0
    for _ in range(100):
        v = rng.standard_normal(spec.N)
        worst = max(worst, np.max(np.abs(blocks_array(v, part).sum(axis=0) - v)) / np.max(np.abs(v)))
    criterion.detail(f"identity {ident:.2e}, reconstruction {worst:.2e}")
    assert ident < 1e-12
    assert worst < 1e-10


def test_bony_regrouping(criterion):
    criterion(2, "exact Bony regrouping")
    spec = GridSpec(8.0, 1024)
    part = build_partition(spec)
    rng = np.random.default_rng([SEED, 2])
    worst = 0.0
    for _ in range(100):
        f = GridSignal(spec, rng.standard_normal(spec.N))
        g = GridSignal(spec, rng.standard_normal(spec.N))
        bp = bony_product(f, g, part)
        s = bp.Tfg + bp.Tgf + bp.pi
        fg = f.values * g.values
        worst = max(worst, np.max(np.abs(s.values - fg)) / np.max(np.abs(fg)))
    criterion.detail(f"max relative {worst:.2e}")
    assert worst < 1e-9


def test_pi_F_cancellation(criterion):
    criterion(3, "Pi_F cancellation and sin identity")
    spec = GridSpec(8.0, 1024)
    part = build_partition(spec)
    rng = np.random.default_rng([SEED, 3])
    worst_lin = worst_sin = 0.0
    for _ in range(10):
        u = smooth_signal(spec, rng)
        xi = derivative(smooth_signal(spec, rng))
        scl = np.max(np.abs(u.values)) * np.max(np.abs(xi.values))
        for a in (-2.0, 0.5, 1.7):
            lin = pi_F(make_field("linear", a=a), u, xi, part)
            worst_lin = max(worst_lin, np.max(np.abs(lin.values)) / scl)
        lhs = resonant(GridSignal(spec, np.sin(u.values)), xi, part)
        rhs = GridSignal(spec, np.cos(u.values)) * resonant(u, xi, part) + pi_F(make_field("sin"), u, xi, part)
        worst_sin = max(worst_sin, np.max(np.abs(lhs.values - rhs.values)) / np.max(np.abs(lhs.values)))
    criterion.detail(f"linear {worst_lin:.2e}, sin {worst_sin:.2e}")
    assert worst_lin < 1e-9
    assert worst_sin < 1e-9


def test_reduced_resonant_oracle(criterion):
    criterion(4, "reduced-resonant oracle")
    spec = GridSpec(8.0, 1024)
    part = build_partition(spec)
    loc = make_localizer(1.0, spec).values
    rng = np.random.default_rng([SEED, 4])
    worst = 0.0
    for name in ("sin", "tanh", "rational"):
        for _ in range(5):
            th = loc * smooth_signal(spec, rng, 16)
            th = th - loc * th.at_origin()
            rp = grid_exact_path(th, 1.0)
            F = make_field(name)
            ut = smooth_signal(spec, rng, 16)
            Fu = GridSignal(spec, F.evaluate(ut.values))
            us = ut - paraproduct(Fu, th, part)
            got = reduced_resonant(ut, us, rp, F, part)
            want = resonant(Fu, rp.xi, part)
            worst = max(worst, np.max(np.abs(got.values - want.values)) / np.max(np.abs(want.values)))
    criterion.detail(f"max relative {worst:.2e}")
    assert worst < 1e-9


def test_young_closed_form(criterion):
    criterion(5, "Young solver closed form")
    spec = GridSpec(8.0, 2**12)
    T = 1.0
    win = np.abs(spec.x) <= T
    th = gen_sine_bump(spec, T, 0.8)
    cfg = SolverConfig(T=T)
    err = 0.0
    for a, u0 in ((0.5, 1.0), (-1.0, 0.3), (1.5, -0.7)):
        r = young_solve(u0, derivative(th), make_field("linear", a=a), cfg)
        err = max(err, np.max(np.abs(r.u.values[win] - u0 * np.exp(a * th.values[win]))))
    z1 = young_solve(0.4, GridSignal.zeros(spec), make_field("sin"), cfg)
    z2 = young_solve(0.4, derivative(th), make_field("zero"), cfg)
    flat = max(np.max(np.abs(z.u.values[win] - 0.4)) for z in (z1, z2))
    criterion.detail(f"sup error {err:.2e}, constant cases {flat:.2e}")
    assert err < 1e-6
    assert flat <= cfg.tol


def _rk4(f, x_end, u0, h):
    # classical RK4 for u' = f(x, u) from 0 to x_end, returning (xs, us)
    n = int(round(abs(x_end) / h))
    h = x_end / n
    xs = np.linspace(0.0, x_end, n + 1)
    us = np.empty(n + 1)
    us[0] = u = u0
    for i in range(n):
        x = xs[i]
        k1 = f(x, u)
        k2 = f(x + h / 2, u + h / 2 * k1)
        k3 = f(x + h / 2, u + h / 2 * k2)
        k4 = f(x + h, u + h * k3)
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        us[i + 1] = u
    return xs, us


def test_paracontrolled_vs_rk4(criterion):
    criterion(6, "paracontrolled vs classical RK4")
    spec = GridSpec(8.0, 2**12)
    T, amp, u0 = 1.0, 0.9, 0.3
    th = gen_sine_bump(spec, T, amp)
    r = paracontrolled_solve(u0, grid_exact_path(th, T), make_field("sin"), cfg=SolverConfig(T=T))
    # theta = amp sin(x) on [-T, T], so d theta = amp cos(x) dx there
    rhs = lambda x, u: np.sin(u) * amp * np.cos(x)  # noqa: E731
    o = spec.origin
    k = int(round(T / spec.dx))
    err = 0.0
    for sign in (1, -1):
        xs, us = _rk4(rhs, sign * T, u0, spec.dx / 4)
        ref = us[::4]
        got = r.u.values[o + sign * np.arange(k + 1)]
        err = max(err, np.max(np.abs(got - ref)))
    criterion.detail(f"sup distance {err:.2e}")
    assert err < 1e-4


def test_ito_lyons_continuity(criterion):
    criterion(7, "weighted Ito-Lyons continuity under mollification")
    spec = GridSpec(8.0, 2**14)
    T = 1.0
    idx = BesovIndex(0.34, 4, 2)
    cfg = SolverConfig(T=T, besov=idx)
    loc = make_localizer(T, spec).values.values
    B = gen_fbm(0.45, spec, T, SEED, localize=False)
    eps = (0.008, 0.004, 0.002)

    def solve(e):
        Be = mollify(B, e)
        th = GridSignal(spec, loc * (Be.values - Be.at_origin()))
        return paracontrolled_solve(0.3, grid_exact_path(th, T), make_field("sin"), cfg=cfg).u_tilde
    us = pmap(solve, eps)
    dist = {}
    for name, ix in (("B^0.34_4,2", idx), ("B^0_4,2", BesovIndex(0.0, 4, 2))):
        dist[name] = [besov_norm_lp(us[i] - us[i + 1], ix) for i in range(2)]
    criterion.detail(", ".join(f"{k}: {v[0]:.3e} > {v[1]:.3e}" for k, v in dist.items()))
    for v in dist.values():
        assert v[1] < v[0]


def test_regularity_estimation(criterion):
    criterion(8, "regularity estimation")
    spec = GridSpec(8.0, 4096)
    part = build_partition(spec)
    w = regularity_estimate(gen_weierstrass(spec, 0.4), np.inf, part)
    fbm = {H: float(np.mean(pmap(lambda s: regularity_estimate(gen_fbm(H, spec, 1.0, s), 4, part),
                                 range(100)))) for H in (0.4, 0.7)}
    spec14 = GridSpec(8.0, 2**14)
    part14 = build_partition(spec14)
    J = 8
    wav = {}
    for s, r in ((0.8, 0.4), (0.9, 0.0), (0.7, 0.8)):
        est = pmap(lambda sd: regularity_estimate(
            gen_wavelet_series(RandomSeriesParams(s, r, J, sd), spec14), 4, part14, (2, J + 2)),
            range(50))
        wav[(s, r)] = float(np.mean(est))
    criterion.detail(f"weierstrass {w:.4f}; fbm " + ", ".join(f"H={h}: {a:.4f}" for h, a in fbm.items())
                     + "; wavelet " + ", ".join(f"{k}: {a:.4f}" for k, a in wav.items()))
    assert abs(w - 0.4) <= 0.05
    for H, a in fbm.items():
        assert abs(a - H) <= 0.07
    for (s, r), a in wav.items():
        assert abs(a - (s + r / 4 - 0.5)) <= 0.1


def test_rough_path_lift(criterion):
    criterion(9, "rough-path lift accepted")
    spec = GridSpec(8.0, 2**14)
    params = RandomSeriesParams(0.9, 0.0, 8, seed=SEED)
    _, diag = lift(params, BesovIndex(0.1, 4, 1), 1.0, spec, levels=(4, 8))
    criterion.detail("ratios " + ", ".join(f"{v:.3f}" for v in diag.ratios))
    assert diag.accepted
    assert max(diag.ratios[-3:]) < 0.9


def test_estimate_constant_stability(criterion):
    criterion(10, "estimate-constant stability")
    coarse = measure_constants(2**10, SEED, 20)
    fine = measure_constants(2**12, SEED, 20)
    change = stability(coarse, fine)
    criterion.detail(f"max relative change {max(change.values()):.3f} ({max(change, key=change.get)})")
    assert all(v < 0.5 for v in change.values())


def test_selftest_determinism(criterion):
    criterion(11, "selftest determinism")
    runs = []
    for threads in ("1", "4"):
        env = dict(os.environ, PCAL_THREADS=threads)
        p = subprocess.run([sys.executable, "-m", "pcal", "selftest", "--seed", str(SEED)],
                           capture_output=True, env=env)
        assert p.returncode == 0, p.stderr.decode()
        runs.append(p.stdout)
    criterion.detail(f"{len(runs[0])} bytes per report")
    assert runs[0] == runs[1]
