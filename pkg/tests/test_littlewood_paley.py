import numpy as np
import pytest

from pcal.errors import DegenerateFitError, ValidationError
from pcal.grid import GridSignal, GridSpec
from pcal.littlewood_paley import (BesovIndex, besov_norm_lp, besov_norm_modulus, block_norms,
                                   build_partition, chi, decompose, lp_block, partial_sum,
                                   regularity_estimate, rho, smoothstep, top_level)
from pcal.signals import gen_weierstrass

from conftest import smooth_signal


def test_smoothstep_limits_and_monotone():
    t = np.linspace(-1, 2, 3001)
    s = smoothstep(t)
    assert s[0] == 0.0 and s[-1] == 1.0
    assert np.all(np.diff(s) >= 0)
    assert smoothstep(np.array([0.5]))[0] == pytest.approx(0.5)


def test_chi_and_rho_supports():
    xi = np.linspace(0, 10, 10001)
    assert np.all(chi(xi[xi <= 0.75]) == 1.0)
    assert np.all(chi(xi[xi >= 4 / 3]) == 0.0)
    r = rho(xi)
    assert np.all(r[(xi <= 0.75) | (xi >= 8 / 3)] == 0.0)
    assert np.all(r >= 0)


def test_top_level_examples():
    assert top_level(GridSpec(8.0, 4096)) == 8
    assert top_level(GridSpec(8.0, 2**14)) == 10


def test_coarse_grid_rejected():
    with pytest.raises(ValidationError):
        build_partition(GridSpec(8.0, 16))


def test_partition_of_unity(spec):
    part = build_partition(spec)
    assert np.max(np.abs(part.masks.sum(axis=0) - 1.0)) < 1e-12
    assert np.max(np.abs(part.rmasks.sum(axis=0) - 1.0)) < 1e-12
    # non-adjacent annuli have disjoint supports
    for i in range(1, part.nlev - 1):
        for k in range(i + 2, part.nlev - 1):
            assert np.max(part.masks[i] * part.masks[k]) == 0.0


def test_constant_lives_in_low_block(spec):
    d = decompose(GridSignal.constant(spec, 2.5))
    assert np.max(np.abs(d.block(-1).values - 2.5)) < 1e-13
    for j in range(0, d.partition.J + 2):
        assert np.max(np.abs(d.block(j).values)) < 1e-13


def test_reconstruction(spec):
    rng = np.random.default_rng(1)
    f = GridSignal(spec, rng.standard_normal((3, spec.N)))
    d = decompose(f)
    assert np.max(np.abs(d.reconstruct().values - f.values)) < 1e-12


def test_partial_sum_telescopes(spec):
    rng = np.random.default_rng(2)
    f = smooth_signal(spec, rng)
    part = build_partition(spec)
    J = part.J
    # S_j collects the blocks below j
    assert np.max(np.abs(partial_sum(f, J + 2, part).values - f.values)) < 1e-12
    assert np.all(partial_sum(f, -1, part).values == 0.0)
    diff = partial_sum(f, 4, part) - partial_sum(f, 3, part)
    assert np.max(np.abs(diff.values - lp_block(f, 3, part).values)) < 1e-13


def test_pure_tone_has_one_dominant_level(spec):
    k = 64  # xi = 8 pi, inside the annulus of level 3
    f = GridSignal(spec, np.cos(np.pi * k * spec.x / spec.L))
    bn = block_norms(f, 2)
    share = bn.max() ** 2 / np.sum(bn**2)
    assert share > 0.999


def test_besov_norm_of_constant(spec):
    f = GridSignal.constant(spec, 3.0)
    idx = BesovIndex(0.4, 2, 2)
    # only level -1 is non-zero: 2^{-alpha} |c| (2L)^{1/2}
    assert besov_norm_lp(f, idx) == pytest.approx(2**-0.4 * 3.0 * np.sqrt(2 * spec.L))


def test_besov_modulus_of_constant(spec):
    f = GridSignal.constant(spec, 2.0)
    assert besov_norm_modulus(f, BesovIndex(0.5, 2, 2)) == pytest.approx(2.0 * np.sqrt(2 * spec.L))


def test_modulus_alpha_range(spec):
    with pytest.raises(ValidationError):
        besov_norm_modulus(GridSignal.zeros(spec), BesovIndex(1.2, 2, 2))


def test_norm_equivalence_ratio_is_grid_stable():
    # measured constant of the modulus vs LP characterization, alpha = 0.4, p = q = inf
    out = []
    for N in (1024, 4096):
        spec = GridSpec(8.0, N)
        ratios = []
        for s in range(50):
            f = smooth_signal(spec, np.random.default_rng([7, s]), k_max=48)
            idx = BesovIndex(0.4, np.inf, np.inf)
            ratios.append(besov_norm_modulus(f, idx) / besov_norm_lp(f, idx))
        out.append((min(ratios), max(ratios)))
    (lo1, hi1), (lo2, hi2) = out
    assert 0 < lo1 and hi1 < np.inf
    assert abs(hi2 - hi1) / hi1 < 0.2 and abs(lo2 - lo1) / lo1 < 0.2


def test_besov_index_validation():
    with pytest.raises(ValidationError):
        BesovIndex(0.5, 0.5, 2)
    with pytest.raises(ValidationError):
        BesovIndex(0.5, 2, 0.1)
    assert BesovIndex(0.5, "inf", np.inf).p == np.inf


def test_weierstrass_regularity(spec):
    f = gen_weierstrass(spec, 0.4)
    assert regularity_estimate(f, np.inf) == pytest.approx(0.4, abs=1e-6)


def test_regularity_fit_needs_levels(spec):
    with pytest.raises(DegenerateFitError):
        regularity_estimate(GridSignal.constant(spec, 1.0), 2)
    with pytest.raises(ValidationError):
        regularity_estimate(GridSignal.constant(spec, 1.0), 2, levels=(3, 99))


def test_weierstrass_norm_is_one_term_per_level(spec):
    # every tone contributes 2^{j a0} ||Delta_j f||_inf = 1 at its own level,
    # so q = inf gives 1 and q = 1 gives the number of tones
    f = gen_weierstrass(spec, 0.4)
    n_tones = build_partition(spec).J + 1
    assert besov_norm_lp(f, BesovIndex(0.4, np.inf, np.inf)) == pytest.approx(1.0, abs=1e-6)
    assert besov_norm_lp(f, BesovIndex(0.4, np.inf, 1)) == pytest.approx(n_tones, rel=1e-6)
