"""Derivatives, anchored antiderivatives, dyadic scaling, localizers and weights."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .grid import GridSignal, GridSpec
from .littlewood_paley import DyadicPartition, chi, smoothstep, smoothstep_derivative

WEIGHT_FLOOR = 1e-8


def _spectral_multiply(values: np.ndarray, spec: GridSpec, symbol) -> np.ndarray:
    """Apply a Fourier multiplier given as a function of the frequency array."""
    N = spec.N
    if np.iscomplexobj(values):
        m = symbol(spec.frequencies).astype(complex)
        m[N // 2] = 0.0  # Nyquist: no consistent odd symbol
        return np.fft.ifft(m * np.fft.fft(values, axis=-1), axis=-1)
    m = symbol(spec.rfrequencies).astype(complex)
    m[-1] = 0.0
    return np.fft.irfft(m * np.fft.rfft(values, axis=-1), n=N, axis=-1)


def derivative(f: GridSignal, part: DyadicPartition | None = None) -> GridSignal:
    """Spectral derivative: multiplication by i xi (Nyquist mode dropped)."""
    return GridSignal(f.spec, _spectral_multiply(f.values, f.spec, lambda xi: 1j * xi))


def _inv_i_xi(weight):
    def sym(xi):
        out = np.zeros(xi.shape, dtype=complex)
        nz = xi != 0
        out[nz] = weight(xi[nz]) / (1j * xi[nz])
        return out
    return sym


def antiderivative(f: GridSignal, part: DyadicPartition | None = None) -> GridSignal:
    """The antiderivative F with F' = f and F(0) = 0.

    Split as in the construction with a high part G and a low part H:
    G divides the spectrum of f outside the low-pass ball, (1 - chi) F f,
    by i xi.  H integrates the low block Delta_{-1} f exactly: its mean
    contributes the ramp ``mean * x`` and the zero-mean rest is divided by
    i xi.  The result is shifted so that it vanishes at x = 0.
    """
    spec = f.spec
    v = f.values
    G = _spectral_multiply(v, spec, _inv_i_xi(lambda xi: 1.0 - chi(xi)))
    # the low band is band limited, so its periodic part is integrated exactly
    Hper = _spectral_multiply(v, spec, _inv_i_xi(chi))
    mean = np.mean(v, axis=-1, keepdims=True)
    H = Hper + mean * spec.x
    out = G + H
    out = out - out[..., spec.origin:spec.origin + 1]
    return GridSignal(spec, out)


def _dyadic_exponent(lam: float) -> int:
    if not lam > 0:
        raise ValidationError(f"scale factor must be positive, got {lam}")
    k = -np.log2(lam)
    kr = int(round(k))
    if abs(k - kr) > 1e-12 or kr < 0:
        raise ValidationError(f"scale factor must be 2^-k with k >= 0, got {lam}")
    return kr


def scale(f: GridSignal, lam: float, check_support: bool = True, tol: float = 1e-10) -> GridSignal:
    """Samples of f(lam x) on the same grid, lam = 2^-k.

    The trigonometric interpolant of f is evaluated on a grid refined by
    2^k (zero padding in frequency) and the central N samples are kept.
    """
    k = _dyadic_exponent(lam)
    if k == 0:
        return f
    spec = f.spec
    N = spec.N
    if check_support:
        outside = np.abs(spec.x) > lam * spec.L / 2 + 1e-12 * spec.L
        a = np.abs(f.values)
        top = np.max(a)
        if top > 0 and np.max(a[..., outside], initial=0.0) > tol * top:
            raise ValidationError(
                f"support escape: f(lam x) with lam={lam} leaves [-L/2, L/2]")
    M = N << k
    if np.iscomplexobj(f.values):
        c = np.fft.fft(f.values, axis=-1)
        big = np.zeros(f.values.shape[:-1] + (M,), dtype=complex)
        h = N // 2
        big[..., :h] = c[..., :h]
        big[..., -h + 1:] = c[..., h + 1:]
        big[..., h] = 0.5 * c[..., h]
        big[..., -h] = 0.5 * c[..., h]
        fine = np.fft.ifft(big, axis=-1) * (M / N)
    else:
        c = np.fft.rfft(f.values, axis=-1)
        c[..., -1] *= 0.5
        big = np.zeros(f.values.shape[:-1] + (M // 2 + 1,), dtype=complex)
        big[..., :N // 2 + 1] = c
        fine = np.fft.irfft(big, n=M, axis=-1) * (M / N)
    start = N * ((1 << k) - 1) // 2
    return GridSignal(spec, fine[..., start:start + N])


@dataclass(frozen=True)
class Localizer:
    """phi_T(x) = phi(x / T): 1 on [-T, T], 0 outside [-2T, 2T]."""

    spec: GridSpec
    T: float
    values: GridSignal
    derivative: GridSignal

    def c1_norm(self) -> float:
        return float(np.max(np.abs(self.values.values)) + np.max(np.abs(self.derivative.values)))


def localizer_profile(x, T: float):
    """phi_T and its derivative at arbitrary points."""
    x = np.asarray(x, dtype=float)
    t = np.abs(x) / T - 1.0
    val = 1.0 - smoothstep(t)
    der = -smoothstep_derivative(t) * np.sign(x) / T
    return val, der


def make_localizer(T: float, spec: GridSpec) -> Localizer:
    if not T > 0:
        raise ValidationError(f"localization radius must be positive, got {T}")
    if 2 * T > spec.L / 2 + 1e-12:
        raise ValidationError(f"domain too small: 2T={2 * T} exceeds L/2={spec.L / 2}")
    val, der = localizer_profile(spec.x, T)
    return Localizer(spec, float(T), GridSignal(spec, val), GridSignal(spec, der))


@dataclass(frozen=True)
class WeightFunction:
    """A weight psi equal to one on [-2T, 2T] with bounded log-derivative.

    ``C_psi`` and ``c_psi`` are the constants attached to each example weight;
    ``log_derivative_bound`` is the exact supremum of |psi'/psi| over the line.
    """

    spec: GridSpec
    kind: str
    kappa: float
    T: float
    values: GridSignal
    derivative: GridSignal
    C_psi: float
    c_psi: float
    log_derivative_bound: float

    @property
    def plateau(self) -> float:
        return 2.0 * self.T

    @property
    def log_derivative(self) -> GridSignal:
        return GridSignal(self.spec, self.derivative.values / self.values.values)

    def with_spec(self, spec: GridSpec) -> "WeightFunction":
        return make_weight(self.kind, self.kappa, self.T, spec)


WEIGHT_KINDS = ("exp_quadratic", "rational")


def weight_profile(kind: str, kappa: float, T: float, x):
    """psi and psi' at arbitrary points, before flooring."""
    x = np.asarray(x, dtype=float)
    s = np.maximum(np.abs(x) - 2.0 * T, 0.0)
    sg = np.sign(x)
    if kind == "exp_quadratic":
        val = np.exp(-kappa * s * s / (1.0 + s))
        dlog = -kappa * (s * s + 2.0 * s) / (1.0 + s) ** 2
    elif kind == "rational":
        val = (1.0 + kappa * s * s) ** -2
        dlog = -4.0 * kappa * s / (1.0 + kappa * s * s)
    else:
        raise ValidationError(f"unknown weight kind {kind!r}; expected one of {WEIGHT_KINDS}")
    return val, val * dlog * sg


def make_weight(kind: str, kappa: float, T: float, spec: GridSpec) -> WeightFunction:
    if kind not in WEIGHT_KINDS:
        raise ValidationError(f"unknown weight kind {kind!r}; expected one of {WEIGHT_KINDS}")
    if not 0.0 < kappa < 1.0:
        raise ValidationError(f"kappa must lie in (0, 1), got {kappa}")
    if not T > 0 or 2 * T > spec.L / 2 + 1e-12 or 2 * T + 1 >= spec.L:
        raise ValidationError(f"plateau [-2T, 2T] with T={T} does not fit the domain L={spec.L}")
    val, der = weight_profile(kind, kappa, T, spec.x)
    floored = val < WEIGHT_FLOOR
    val = np.where(floored, WEIGHT_FLOOR, val)
    der = np.where(floored, 0.0, der)
    if kind == "exp_quadratic":
        C, c, sharp = kappa, np.exp(-0.5), kappa
    else:
        C, c, sharp = np.sqrt(kappa), 0.25, 2.0 * np.sqrt(kappa)
    return WeightFunction(spec, kind, float(kappa), float(T), GridSignal(spec, val),
                          GridSignal(spec, der), float(C), float(c), float(sharp))
