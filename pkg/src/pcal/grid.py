"""Uniform periodic grids, sampled signals and their Fourier transforms.

A grid is the interval [-L, L) sampled at ``N`` points ``x_i = -L + i*dx``
with ``dx = 2L/N``.  Index ``N/2`` is the origin.  Signals carry an array of
shape ``(*channels, N)``: scalar signals have shape ``(N,)``, vector paths
``(m, N)`` and matrix fields ``(m, n, N)``.  The grid axis is always last.

The discrete transform is scaled by ``dx`` so that the coefficients
approximate the continuous Fourier transform::

    c_k = dx * sum_i f(x_i) exp(-i xi_k x_i),   xi_k = pi k / L.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import SpecMismatchError, ValidationError


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid on [-L, L) with N samples."""

    L: float
    N: int

    def __post_init__(self):
        L, N = float(self.L), int(self.N)
        if not np.isfinite(L) or L <= 0:
            raise ValidationError(f"half length must be positive, got {self.L}")
        if N < 16 or N & (N - 1):
            raise ValidationError(f"N must be a power of two >= 16, got {self.N}")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "N", N)

    @classmethod
    def default(cls, T: float, N: int) -> "GridSpec":
        """Grid with the default half length ``L = 8 T``."""
        return cls(8.0 * T, N)

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def xi_nyq(self) -> float:
        return np.pi * self.N / (2.0 * self.L)

    @property
    def origin(self) -> int:
        return self.N // 2

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.L + self.dx * np.arange(self.N)
        x.flags.writeable = False
        return x

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer k of each coefficient, in numpy FFT order."""
        k = np.fft.fftfreq(self.N, 1.0 / self.N)
        k.flags.writeable = False
        return k

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies xi_k = pi k / L in numpy FFT order."""
        xi = np.pi * self.wavenumbers / self.L
        xi.flags.writeable = False
        return xi

    @cached_property
    def rfrequencies(self) -> np.ndarray:
        """Nonnegative frequencies matching ``np.fft.rfft`` output."""
        xi = np.pi * np.arange(self.N // 2 + 1) / self.L
        xi.flags.writeable = False
        return xi

    @cached_property
    def _sign(self) -> np.ndarray:
        # (-1)^k, the phase from the grid starting at -L
        s = np.where(self.wavenumbers % 2 == 0, 1.0, -1.0)
        s.flags.writeable = False
        return s

    def index_of(self, x: float) -> int:
        """Index of a grid point; raises if ``x`` is not on the grid."""
        r = (x + self.L) / self.dx
        i = int(round(r))
        if abs(r - i) > 1e-9 * max(1.0, abs(r)) or not 0 <= i < self.N:
            raise ValidationError(f"{x} is not a grid point")
        return i


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


class GridSignal:
    """Samples of a (possibly vector or matrix valued) function on a grid.

    Instances are immutable.  Arithmetic with another signal requires an
    identical grid and shape; scalars broadcast.
    """

    __slots__ = ("spec", "values")

    def __init__(self, spec: GridSpec, values):
        values = np.asarray(values)
        if values.ndim == 0 or values.shape[-1] != spec.N:
            raise ValidationError(
                f"samples must have trailing axis of length {spec.N}, got shape {values.shape}")
        if not np.iscomplexobj(values):
            values = values.astype(float, copy=False)
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "values", _frozen(values))

    def __setattr__(self, name, value):
        raise AttributeError("GridSignal is immutable")

    @classmethod
    def from_function(cls, spec: GridSpec, fn) -> "GridSignal":
        return cls(spec, fn(spec.x))

    @classmethod
    def zeros(cls, spec: GridSpec, shape=()) -> "GridSignal":
        return cls(spec, np.zeros(tuple(shape) + (spec.N,)))

    @classmethod
    def constant(cls, spec: GridSpec, c) -> "GridSignal":
        c = np.asarray(c)
        return cls(spec, np.broadcast_to(c[..., None], c.shape + (spec.N,)))

    @property
    def shape(self) -> tuple:
        """Channel shape, excluding the grid axis."""
        return self.values.shape[:-1]

    @property
    def m(self) -> int:
        return int(np.prod(self.shape, dtype=int))

    @property
    def x(self) -> np.ndarray:
        return self.spec.x

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def at_origin(self):
        return self.values[..., self.spec.origin]

    def real(self) -> "GridSignal":
        return GridSignal(self.spec, self.values.real)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def _coerce(self, other):
        if isinstance(other, GridSignal):
            if other.spec != self.spec:
                raise SpecMismatchError(f"grid mismatch: {self.spec} vs {other.spec}")
            if other.shape != self.shape:
                raise SpecMismatchError(f"shape mismatch: {self.shape} vs {other.shape}")
            return other.values
        if np.ndim(other) == 0:
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GridSignal(self.spec, self.values + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GridSignal(self.spec, self.values - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GridSignal(self.spec, o - self.values)

    def __neg__(self):
        return GridSignal(self.spec, -self.values)

    def __mul__(self, other):
        if isinstance(other, GridSignal):
            return pointwise_product(self, other)
        if np.ndim(other) == 0:
            return GridSignal(self.spec, self.values * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c):
        if np.ndim(c) != 0:
            return NotImplemented
        return GridSignal(self.spec, self.values / c)

    def __repr__(self):
        return f"GridSignal(L={self.spec.L}, N={self.spec.N}, shape={self.shape})"


@dataclass(frozen=True)
class SpectralSignal:
    """Fourier coefficients of a grid signal, stored in numpy FFT order."""

    spec: GridSpec
    coefficients: np.ndarray

    @property
    def frequencies(self) -> np.ndarray:
        return self.spec.frequencies

    def centered(self):
        """Return ``(k, c)`` ordered as k = -N/2 ... N/2 - 1."""
        k = np.fft.fftshift(self.spec.wavenumbers).astype(int)
        return k, np.fft.fftshift(self.coefficients, axes=-1)


def forward_transform(f: GridSignal) -> SpectralSignal:
    spec = f.spec
    c = spec.dx * spec._sign * np.fft.fft(f.values, axis=-1)
    return SpectralSignal(spec, _frozen(c))


def inverse_transform(c: SpectralSignal, real: bool | None = None) -> GridSignal:
    """Inverse of :func:`forward_transform`.

    With ``real=None`` the imaginary part is dropped when the coefficients
    are Hermitian to round-off.
    """
    spec = c.spec
    v = np.fft.ifft(spec._sign * c.coefficients, axis=-1) / spec.dx
    if real is None:
        scale = np.max(np.abs(v)) if v.size else 0.0
        real = bool(np.max(np.abs(v.imag), initial=0.0) <= 1e-12 * max(scale, 1e-300))
    return GridSignal(spec, v.real if real else v)


def sample_norms(values: np.ndarray, nchan: int) -> np.ndarray:
    """Euclidean norm over the leading ``nchan`` channel axes."""
    a = np.abs(values)
    if nchan == 0:
        return a
    axes = tuple(range(values.ndim - 1 - nchan, values.ndim - 1))
    return np.sqrt(np.sum(a * a, axis=axes))


def lp_of_array(values: np.ndarray, p: float, dx: float, nchan: int) -> np.ndarray:
    """L^p norm along the last axis; leading non-channel axes are kept."""
    a = sample_norms(values, nchan)
    if p == np.inf:
        return np.max(a, axis=-1)
    if p == 1:
        return dx * np.sum(a, axis=-1)
    if p == 2:
        return np.sqrt(dx * np.sum(a * a, axis=-1))
    # scale first so large exponents cannot overflow
    top = np.max(a, axis=-1, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    return top[..., 0] * (dx * np.sum((a / safe) ** p, axis=-1)) ** (1.0 / p)


def check_p(p: float) -> float:
    p = float(p)
    if not p >= 1:
        raise ValidationError(f"integrability exponent must be >= 1, got {p}")
    return p


def lp_norm(f: GridSignal, p: float) -> float:
    """(dx * sum |f(x_i)|^p)^(1/p), or the max for p = inf."""
    p = check_p(p)
    return float(lp_of_array(f.values, p, f.spec.dx, len(f.shape)))


def contract(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Samplewise product of arrays whose last axis is the grid.

    Supported shapes: scalar times anything, equal shapes (componentwise),
    and a tensor ``(..., n)`` times a vector ``(n,)`` contracted over n.
    """
    sa, sb = a.shape[:-1], b.shape[:-1]
    if sa == () or sb == () or sa == sb:
        return a * b
    if len(sa) >= 2 and len(sb) == 1 and sa[-1] == sb[0]:
        # last channel axis of a against the vector b, e.g. (m, n) x (n,)
        return np.einsum("...jn,jn->...n", a, b)
    raise SpecMismatchError(f"cannot contract channel shapes {sa} and {sb}")


def pointwise_product(f: GridSignal, g: GridSignal) -> GridSignal:
    if f.spec != g.spec:
        raise SpecMismatchError(f"grid mismatch: {f.spec} vs {g.spec}")
    return GridSignal(f.spec, contract(f.values, g.values))


def shift(f: GridSignal, h: float) -> GridSignal:
    """Circular shift: returns samples of ``f(x - h)``; ``h`` must be grid aligned."""
    r = h / f.spec.dx
    k = int(round(r))
    if abs(r - k) > 1e-9 * max(1.0, abs(r)):
        raise ValidationError(f"shift {h} is not a multiple of dx={f.spec.dx}")
    return GridSignal(f.spec, np.roll(f.values, k, axis=-1))
