import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from pcal.calculus import antiderivative, derivative
from pcal.composition import make_field, pi_F
from pcal.grid import GridSignal, GridSpec, forward_transform, inverse_transform
from pcal.littlewood_paley import BesovIndex, besov_norm_lp, blocks_array, build_partition
from pcal.paraproduct import bony_product, paraproduct, resonant

SPEC = GridSpec(8.0, 256)
PART = build_partition(SPEC)
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
samples = arrays(np.float64, SPEC.N, elements=finite)
coeffs = arrays(np.float64, 24, elements=st.floats(-1, 1))
SETTINGS = settings(max_examples=40, deadline=None)


def trig(c):
    k = np.arange(1, 13)
    ph = np.pi * np.outer(k, SPEC.x) / SPEC.L
    return GridSignal(SPEC, c[:12] @ np.cos(ph) + c[12:] @ np.sin(ph))


@SETTINGS
@given(samples)
def test_blocks_reconstruct(v):
    B = blocks_array(v, PART)
    assert np.max(np.abs(B.sum(axis=0) - v)) <= 1e-10 * (1 + np.max(np.abs(v)))


@SETTINGS
@given(samples)
def test_transform_roundtrip(v):
    f = GridSignal(SPEC, v)
    back = inverse_transform(forward_transform(f), real=True)
    assert np.max(np.abs(back.values - v)) <= 1e-10 * (1 + np.max(np.abs(v)))


@SETTINGS
@given(samples, samples)
def test_bony_regroups_product(a, b):
    f, g = GridSignal(SPEC, a), GridSignal(SPEC, b)
    bp = bony_product(f, g, PART)
    scl = 1 + np.max(np.abs(a)) * np.max(np.abs(b))
    assert np.max(np.abs(bp.product.values - a * b)) <= 1e-9 * scl


@SETTINGS
@given(samples, samples, st.floats(-10, 10))
def test_paraproduct_bilinear(a, b, c):
    f, g = GridSignal(SPEC, a), GridSignal(SPEC, b)
    lhs = paraproduct(f * c, g, PART).values
    rhs = c * paraproduct(f, g, PART).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * (1 + np.max(np.abs(rhs)))


@SETTINGS
@given(samples, samples)
def test_resonant_symmetric(a, b):
    f, g = GridSignal(SPEC, a), GridSignal(SPEC, b)
    r1, r2 = resonant(f, g, PART).values, resonant(g, f, PART).values
    assert np.max(np.abs(r1 - r2)) <= 1e-9 * (1 + np.max(np.abs(r1)))


@SETTINGS
@given(coeffs)
def test_derivative_inverts_antiderivative(c):
    f = trig(c)
    back = derivative(antiderivative(f, PART))
    assert np.max(np.abs(back.values - f.values)) <= 1e-9 * (1 + np.max(np.abs(f.values)))


@SETTINGS
@given(samples, st.floats(0.01, 100), st.sampled_from([(0.5, 2, 2), (0.4, 4, 2), (-0.3, np.inf, np.inf)]))
def test_besov_norm_homogeneous(v, c, ix):
    f = GridSignal(SPEC, v)
    idx = BesovIndex(*ix)
    n1 = besov_norm_lp(f * c, idx, PART)
    assert abs(n1 - c * besov_norm_lp(f, idx, PART)) <= 1e-9 * (1 + n1)


@SETTINGS
@given(samples, samples)
def test_besov_triangle(a, b):
    idx = BesovIndex(0.4, 4, 2)
    f, g = GridSignal(SPEC, a), GridSignal(SPEC, b)
    assert besov_norm_lp(f + g, idx, PART) <= (besov_norm_lp(f, idx, PART)
                                               + besov_norm_lp(g, idx, PART)) * (1 + 1e-12) + 1e-12


@SETTINGS
@given(coeffs, coeffs, st.floats(-3, 3))
def test_pi_F_cancels_linear_fields(cu, cx, a):
    u, xi = trig(cu), derivative(trig(cx))
    out = pi_F(make_field("linear", a=a), u, xi, PART)
    scl = 1 + np.max(np.abs(u.values)) * np.max(np.abs(xi.values))
    assert np.max(np.abs(out.values)) <= 1e-9 * scl
