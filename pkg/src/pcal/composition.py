"""Nonlinearities F, composition F(u), paralinearization and the map Pi_F.

A field maps R^m to linear maps R^n -> R^m.  Scalar fields (m = n = 1) act on
signals of channel shape ``()``.  Linear fields ``F(u) = A u`` with a tensor
``A`` of shape ``(m, n, m)`` act on vector signals of shape ``(m,)`` and give
matrix fields of shape ``(m, n)``.  Derivatives are exact closed forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ValidationError
from .grid import GridSignal
from .littlewood_paley import DyadicPartition, partition_for
from .paraproduct import commutator, paraproduct, resonant

_TANH2 = 4.0 * np.sqrt(3.0) / 9.0
_RAT2 = 0.75 + np.sqrt(2.0) / 2.0


def _sech2(u):
    return 1.0 / np.cosh(u) ** 2


# (evaluators for orders 0..3, sup norms of orders 0..3)
_SCALAR_CATALOG: dict[str, tuple[tuple[Callable, ...], tuple[float, ...]]] = {
    "sin": ((np.sin, np.cos, lambda u: -np.sin(u), lambda u: -np.cos(u)),
            (1.0, 1.0, 1.0, 1.0)),
    "cos": ((np.cos, lambda u: -np.sin(u), lambda u: -np.cos(u), np.sin),
            (1.0, 1.0, 1.0, 1.0)),
    "tanh": ((np.tanh, _sech2,
              lambda u: -2.0 * np.tanh(u) * _sech2(u),
              lambda u: -6.0 * np.tanh(u) ** 4 + 8.0 * np.tanh(u) ** 2 - 2.0),
             (1.0, 1.0, _TANH2, 2.0)),
    "rational": ((lambda u: u / (1.0 + u * u),
                  lambda u: (1.0 - u * u) / (1.0 + u * u) ** 2,
                  lambda u: 2.0 * u * (u * u - 3.0) / (1.0 + u * u) ** 3,
                  lambda u: -6.0 * (u**4 - 6.0 * u * u + 1.0) / (1.0 + u * u) ** 4),
                 (0.5, 1.0, _RAT2, 6.0)),
}


@dataclass(frozen=True)
class VectorField:
    """A nonlinearity with exact derivatives up to order three.

    Bounded catalog fields carry the closed-form sup over the line of each
    |F^{(k)}|; linear fields are unbounded, so their C^k norms are taken over
    a ball of given radius.  ``gamma`` is the Hoelder exponent of F''
    (metadata only).
    """

    name: str
    m: int
    n: int
    params: dict = field(default_factory=dict)
    coeff: float = 1.0
    tensor: np.ndarray | None = None
    gamma: float = 1.0

    @property
    def is_linear(self) -> bool:
        return self.name in ("linear", "zero")

    @property
    def is_scalar(self) -> bool:
        return self.m == 1 and self.n == 1 and self.tensor is None

    @property
    def f0_zero(self) -> bool:
        u0 = np.zeros(() if self.is_scalar else (self.m,))
        return bool(np.all(self.evaluate(u0[..., None]) == 0.0))

    def scaled(self, c: float) -> "VectorField":
        """The field c F."""
        t = None if self.tensor is None else self.tensor * c
        return VectorField(self.name, self.m, self.n, dict(self.params), self.coeff * c, t,
                           self.gamma)

    def evaluate(self, u: np.ndarray, order: int = 0) -> np.ndarray:
        """F^{(order)} at the samples ``u`` (last axis is the grid)."""
        if not 0 <= order <= 3:
            raise ValidationError(f"derivative order {order} not available")
        if self.name == "zero":
            if self.is_scalar:
                return np.zeros_like(u, dtype=float)
            shp = (self.m, self.n) + (self.m,) * order
            return np.zeros(shp + u.shape[1:])
        if self.name == "linear":
            if self.is_scalar:
                if order == 0:
                    return self.coeff * u
                if order == 1:
                    return np.full(u.shape, self.coeff, dtype=float)
                return np.zeros_like(u, dtype=float)
            A = self.tensor
            if order == 0:
                return np.einsum("ijk,k...->ij...", A, u)
            if order == 1:
                return np.broadcast_to(A[..., None], A.shape + u.shape[1:]).copy()
            return np.zeros((self.m, self.n) + (self.m,) * order + u.shape[1:])
        fns, _ = _SCALAR_CATALOG[self.name]
        return self.coeff * fns[order](u)

    def c_norm(self, k: int, radius: float = np.inf) -> float:
        """||F||_{C^k} = sum over j <= k of sup |F^{(j)}|, on the ball of given radius."""
        if not 0 <= k <= 3:
            raise ValidationError(f"C^k norm only for k <= 3, got {k}")
        if self.name == "zero":
            return 0.0
        if self.name == "linear":
            a = abs(self.coeff) if self.tensor is None else float(np.linalg.norm(
                self.tensor.reshape(self.m * self.n, self.m), 2))
            return a * radius + (a if k >= 1 else 0.0)
        _, sups = _SCALAR_CATALOG[self.name]
        return abs(self.coeff) * float(sum(sups[: k + 1]))


def make_field(name: str, **params) -> VectorField:
    """Build a catalog field.

    ``zero``; ``linear`` with scalar ``a`` or tensor ``A`` of shape (m, n, m);
    ``sin``, ``tanh``, ``rational`` (u / (1 + u^2)) and ``cos`` (the one
    catalog entry with F(0) != 0) with optional ``c`` multiplying the field.
    """
    if name == "zero":
        m = int(params.get("m", 1))
        n = int(params.get("n", 1))
        return VectorField("zero", m, n, dict(params))
    if name == "linear":
        if "A" in params:
            A = np.asarray(params["A"], dtype=float)
            if A.ndim != 3 or A.shape[0] != A.shape[2]:
                raise ValidationError(f"linear tensor must have shape (m, n, m), got {A.shape}")
            A.flags.writeable = False
            return VectorField("linear", A.shape[0], A.shape[1], {"A": A.tolist()}, 1.0, A)
        a = float(params.get("a", 1.0))
        return VectorField("linear", 1, 1, {"a": a}, a)
    if name in _SCALAR_CATALOG:
        c = float(params.get("c", 1.0))
        return VectorField(name, 1, 1, {"c": c}, c)
    raise ValidationError(f"unknown field {name!r}; known: zero, linear, {', '.join(_SCALAR_CATALOG)}")


def _check_dims(F: VectorField, u: GridSignal):
    want = () if F.is_scalar else (F.m,)
    if u.shape != want:
        raise ValidationError(f"field {F.name} expects channel shape {want}, got {u.shape}")


def apply_field(F: VectorField, u: GridSignal, order: int = 0) -> GridSignal:
    """Samplewise F^{(order)}(u)."""
    _check_dims(F, u)
    return GridSignal(u.spec, F.evaluate(u.values, order))


def sampled_c_norm(F: VectorField, k: int, u: GridSignal) -> float:
    """sum over j <= k of max |F^{(j)}| over the values visited by u."""
    _check_dims(F, u)
    total = 0.0
    for j in range(k + 1):
        v = F.evaluate(u.values, j)
        total += float(np.max(np.abs(v))) if v.size else 0.0
    return total


def paralinearize(F: VectorField, g: GridSignal, part: DyadicPartition | None = None):
    """(T_{F'(g)} g, R_F(g)) with F(g) - F(0) = T_{F'(g)} g + R_F(g)."""
    _check_dims(F, g)
    part = partition_for(g, part)
    principal = paraproduct(apply_field(F, g, 1), g, part)
    Fg = apply_field(F, g)
    F0 = F.evaluate(np.zeros(g.shape + (1,)))[..., 0]
    rem = GridSignal(g.spec, Fg.values - F0[..., None] - principal.values)
    return principal, rem


def _require_scalar(F: VectorField, what: str):
    if not F.is_scalar:
        raise ValidationError(f"{what} is implemented for scalar fields (m = n = 1)")
    if not F.f0_zero:
        raise ValidationError("F(0) must vanish")


def pi_F(F: VectorField, u: GridSignal, xi: GridSignal,
         part: DyadicPartition | None = None) -> GridSignal:
    """Pi_F(u, xi) = Gamma(F'(u), u, xi) + pi(R_F(u), xi)."""
    _require_scalar(F, "Pi_F")
    part = partition_for(u, part)
    _, rem = paralinearize(F, u, part)
    return commutator(apply_field(F, u, 1), u, xi, part) + resonant(rem, xi, part)
