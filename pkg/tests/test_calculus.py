import numpy as np
import pytest

from pcal.calculus import (antiderivative, derivative, make_localizer, make_weight, scale,
                           weight_profile)
from pcal.errors import ValidationError
from pcal.grid import GridSignal, GridSpec
from pcal.littlewood_paley import BesovIndex, besov_norm_lp, regularity_estimate

from conftest import smooth_signal


def test_derivative_of_tone(spec):
    xi1 = np.pi / spec.L
    f = GridSignal(spec, np.sin(3 * xi1 * spec.x))
    want = 3 * xi1 * np.cos(3 * xi1 * spec.x)
    assert np.max(np.abs(derivative(f).values - want)) < 1e-11
    assert np.max(np.abs(derivative(GridSignal.constant(spec, 2.0)).values)) < 1e-13


def test_antiderivative_of_cosine(spec):
    xi1 = np.pi / spec.L
    f = GridSignal(spec, np.cos(xi1 * spec.x))
    F = antiderivative(f)
    assert np.max(np.abs(F.values - np.sin(xi1 * spec.x) / xi1)) < 1e-9
    assert F.at_origin() == 0.0


def test_antiderivative_of_constant_is_a_ramp(spec):
    F = antiderivative(GridSignal.constant(spec, 2.0))
    assert np.max(np.abs(F.values - 2.0 * spec.x)) < 1e-12


def test_antiderivative_of_zero(spec):
    assert np.all(antiderivative(GridSignal.zeros(spec)).values == 0)


def test_derivative_inverts_antiderivative(spec):
    rng = np.random.default_rng(0)
    f = smooth_signal(spec, rng, mean=False)
    back = derivative(antiderivative(f))
    assert np.max(np.abs(back.values - f.values)) < 1e-9 * np.max(np.abs(f.values))


def test_antiderivative_inverts_derivative_up_to_anchor(spec):
    rng = np.random.default_rng(1)
    f = smooth_signal(spec, rng)
    back = antiderivative(derivative(f))
    assert np.max(np.abs(back.values - (f.values - f.at_origin()))) < 1e-9


def test_scale_identity_and_tone(spec):
    rng = np.random.default_rng(2)
    f = smooth_signal(spec, rng)
    assert scale(f, 1.0) is f
    g = GridSignal(spec, np.cos(16 * np.pi * spec.x / spec.L))
    h = scale(g, 0.5, check_support=False)
    assert np.max(np.abs(h.values - np.cos(8 * np.pi * spec.x / spec.L))) < 1e-12


def test_scale_localized_tone(spec):
    # phi is not band-limited, so the interpolant carries its spectral tail
    loc = make_localizer(0.5, spec).values
    g = loc * GridSignal(spec, np.cos(16 * np.pi * spec.x / spec.L))
    want = make_localizer(1.0, spec).values.values * np.cos(8 * np.pi * spec.x / spec.L)
    assert np.max(np.abs(scale(g, 0.5).values - want)) < 1e-5


def test_scale_shifts_regularity_ladder():
    spec = GridSpec(8.0, 4096)
    loc = make_localizer(0.5, spec).values
    g = loc * GridSignal(spec, np.cos(128 * np.pi * spec.x / spec.L))
    # one octave down: the dominant block moves by exactly one level
    from pcal.littlewood_paley import block_norms
    assert np.argmax(block_norms(scale(g, 0.5), 2)) == np.argmax(block_norms(g, 2)) - 1


@pytest.mark.parametrize("lam", [0.3, 2.0, 0.0])
def test_scale_rejects_non_dyadic(spec, lam):
    with pytest.raises(ValidationError):
        scale(GridSignal.zeros(spec), lam)


def test_scale_rejects_support_escape(spec):
    f = GridSignal.constant(spec, 1.0)
    with pytest.raises(ValidationError):
        scale(f, 0.5)


def test_localizer_plateau_and_support(spec):
    loc = make_localizer(1.0, spec)
    v = loc.values.values
    x = spec.x
    assert v[spec.origin] == 1.0
    assert np.all(v[np.abs(x) <= 1.0] == 1.0)
    assert np.all(v[np.abs(x) >= 2.0] == 0.0)
    with pytest.raises(ValidationError):
        make_localizer(3.0, spec)


def test_localizer_c1_scaling(spec):
    # ||phi_T'|| scales like 1/T for the fixed profile
    d = [np.max(np.abs(make_localizer(T, spec).derivative.values)) for T in (0.5, 1.0, 2.0)]
    assert d[0] / d[1] == pytest.approx(2.0, rel=1e-2)
    assert d[1] / d[2] == pytest.approx(2.0, rel=1e-2)


def test_weight_constants(spec):
    w = make_weight("exp_quadratic", 0.5, 1.0, spec)
    assert (w.C_psi, w.c_psi) == (0.5, np.exp(-0.5))
    r = make_weight("rational", 0.25, 1.0, spec)
    assert (r.C_psi, r.c_psi) == (0.5, 0.25)


@pytest.mark.parametrize("kind", ["exp_quadratic", "rational"])
def test_weight_log_derivative_bound(spec, kind):
    w = make_weight(kind, 0.3, 1.0, spec)
    v = w.values.values
    assert np.all(v > 0) and np.all(v[np.abs(spec.x) <= 2.0] == 1.0)
    assert np.max(np.abs(w.log_derivative.values)) <= w.log_derivative_bound * (1 + 1e-6)


def test_exp_weight_log_derivative_within_nominal_constant(spec):
    w = make_weight("exp_quadratic", 0.7, 1.0, spec)
    assert np.max(np.abs(w.log_derivative.values)) <= w.C_psi * (1 + 1e-6)


def test_rational_weight_sharp_bound():
    # sup |psi'/psi| = 4 kappa s / (1 + kappa s^2) peaks at s = kappa^{-1/2}
    k = 0.25
    s = np.linspace(0, 50, 200001)
    _, d = weight_profile("rational", k, 1.0, s + 2.0)
    v, _ = weight_profile("rational", k, 1.0, s + 2.0)
    assert np.max(np.abs(d / v)) == pytest.approx(2 * np.sqrt(k), rel=1e-6)


def test_weight_validation(spec):
    with pytest.raises(ValidationError):
        make_weight("exp_quadratic", 1.5, 1.0, spec)
    with pytest.raises(ValidationError):
        make_weight("gaussian", 0.5, 1.0, spec)
    with pytest.raises(ValidationError):
        make_weight("rational", 0.5, 3.0, spec)


def test_weight_floor(spec):
    w = make_weight("exp_quadratic", 0.99, 1.0, GridSpec(64.0, 1024))
    assert np.min(w.values.values) >= 1e-8


def test_weights_equivalent_on_constant_extension(spec):
    # u constant outside [-2T, 2T]: ||psi u|| and ||psi~ u|| within (1 + c^-1 ||psi~ - psi||)
    rng = np.random.default_rng(3)
    T = 1.0
    u = smooth_signal(spec, rng, 8).values.copy()
    x = spec.x
    u[x > 2 * T] = u[np.searchsorted(x, 2 * T)]
    u[x < -2 * T] = u[np.searchsorted(x, -2 * T)]
    idx = BesovIndex(0.4, 4, 2)
    w1 = make_weight("exp_quadratic", 0.5, T, spec)
    w2 = make_weight("rational", 0.5, T, spec)
    n1 = besov_norm_lp(w1.values * GridSignal(spec, u), idx)
    n2 = besov_norm_lp(w2.values * GridSignal(spec, u), idx)
    factor = 1 + besov_norm_lp(w2.values - w1.values, idx) / w1.c_psi
    assert n1 / factor <= n2 <= n1 * factor
