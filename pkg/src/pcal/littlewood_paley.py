"""Dyadic partition of unity, Littlewood-Paley blocks and Besov norms.

Levels run from -1 (the low-pass block built from ``chi``) through ``J``
(annuli ``rho_j``) to ``J + 1``, a tail block that absorbs whatever part of
the spectrum the annuli do not cover.  Every mask depends on ``|xi|`` only.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateFitError, ValidationError
from .grid import GridSignal, GridSpec, check_p, lp_of_array

CHI_INNER = 0.75
CHI_OUTER = 4.0 / 3.0


def smoothstep(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, monotone in between."""
    t = np.asarray(t, dtype=float)
    out = np.where(t >= 1.0, 1.0, 0.0)
    mid = (t > 0.0) & (t < 1.0)
    tm = t[mid]
    a = np.exp(-1.0 / tm)
    b = np.exp(-1.0 / (1.0 - tm))
    out[mid] = a / (a + b)
    return out


def smoothstep_derivative(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    mid = (t > 0.0) & (t < 1.0)
    tm = t[mid]
    a = np.exp(-1.0 / tm)
    b = np.exp(-1.0 / (1.0 - tm))
    da = a / tm**2
    db = -b / (1.0 - tm) ** 2
    out[mid] = (da * b - a * db) / (a + b) ** 2
    return out


def chi(xi):
    """Low-pass profile: 1 on |xi| <= 3/4, 0 on |xi| >= 4/3."""
    r = np.abs(np.asarray(xi, dtype=float))
    return 1.0 - smoothstep((r - CHI_INNER) / (CHI_OUTER - CHI_INNER))


def rho(xi):
    """Annulus profile chi(xi/2) - chi(xi), supported in 3/4 <= |xi| <= 8/3."""
    xi = np.asarray(xi, dtype=float)
    return chi(xi / 2.0) - chi(xi)


def top_level(spec: GridSpec) -> int:
    """Largest j with (8/3) 2^j <= xi_nyq."""
    return int(np.floor(np.log2(3.0 * spec.xi_nyq / 8.0) + 1e-12))


def _masks_on(xi: np.ndarray, J: int) -> np.ndarray:
    rows = [chi(xi)]
    for j in range(J + 1):
        rows.append(rho(xi / 2.0**j))
    body = np.array(rows)
    tail = 1.0 - body.sum(axis=0)
    return np.vstack([body, tail[None]])


class DyadicPartition:
    """Spectral masks for the levels -1 ... J+1 of a grid."""

    def __init__(self, spec: GridSpec):
        J = top_level(spec)
        if J < 2:
            raise ValidationError(
                f"grid too coarse: top dyadic level J={J} < 2 (L={spec.L}, N={spec.N})")
        self.spec = spec
        self.J = J
        self.masks = _masks_on(np.abs(spec.frequencies), J)
        self.rmasks = _masks_on(spec.rfrequencies, J)
        for a in (self.masks, self.rmasks):
            a.flags.writeable = False

    @property
    def levels(self) -> range:
        return range(-1, self.J + 2)

    @property
    def nlev(self) -> int:
        return self.J + 3

    @property
    def chi_mask(self) -> np.ndarray:
        return self.masks[0]

    @property
    def rho_masks(self) -> np.ndarray:
        return self.masks[1:-1]

    @property
    def tail_mask(self) -> np.ndarray:
        return self.masks[-1]

    def mask(self, j: int) -> np.ndarray:
        self.check_level(j)
        return self.masks[j + 1]

    def check_level(self, j: int, top: int | None = None):
        top = self.J + 1 if top is None else top
        if not -1 <= j <= top:
            raise ValidationError(f"level {j} outside [-1, {top}]")

    def __repr__(self):
        return f"DyadicPartition(L={self.spec.L}, N={self.spec.N}, J={self.J})"


@lru_cache(maxsize=64)
def build_partition(spec: GridSpec) -> DyadicPartition:
    return DyadicPartition(spec)


def partition_for(f: GridSignal, part: DyadicPartition | None) -> DyadicPartition:
    if part is None:
        return build_partition(f.spec)
    if part.spec != f.spec:
        raise ValidationError("partition was built for a different grid")
    return part


def filter_array(values: np.ndarray, masks: np.ndarray, part: DyadicPartition) -> np.ndarray:
    """Apply each full-order mask row of ``masks`` to ``values``.

    Returns an array of shape ``(len(masks), *values.shape)``.
    """
    N = part.spec.N
    if np.iscomplexobj(values):
        F = np.fft.fft(values, axis=-1)
        return np.fft.ifft(masks.reshape((-1,) + (1,) * (values.ndim - 1) + (N,)) * F, axis=-1)
    # masks depend on |xi| only, so the half spectrum carries everything
    nr = N // 2 + 1
    rm = masks[..., :nr]
    F = np.fft.rfft(values, axis=-1)
    return np.fft.irfft(rm.reshape((-1,) + (1,) * (values.ndim - 1) + (nr,)) * F, n=N, axis=-1)


def blocks_array(values: np.ndarray, part: DyadicPartition) -> np.ndarray:
    """All blocks at once, shape ``(J + 3, *values.shape)``; row ``j + 1`` is level j."""
    N = part.spec.N
    if np.iscomplexobj(values):
        return filter_array(values, part.masks, part)
    F = np.fft.rfft(values, axis=-1)
    m = part.rmasks.reshape((part.nlev,) + (1,) * (values.ndim - 1) + (N // 2 + 1,))
    return np.fft.irfft(m * F, n=N, axis=-1)


def lp_block(f: GridSignal, j: int, part: DyadicPartition | None = None) -> GridSignal:
    """Delta_j f."""
    part = partition_for(f, part)
    part.check_level(j)
    return GridSignal(f.spec, filter_array(f.values, part.masks[j + 1:j + 2], part)[0])


def partial_sum(f: GridSignal, j: int, part: DyadicPartition | None = None) -> GridSignal:
    """S_j f = sum of the blocks with index <= j - 1."""
    part = partition_for(f, part)
    part.check_level(j, top=part.J + 2)
    if j == -1:
        return GridSignal.zeros(f.spec, f.shape)
    m = part.masks[: j + 1].sum(axis=0)
    return GridSignal(f.spec, filter_array(f.values, m[None], part)[0])


@dataclass(frozen=True)
class LPDecomposition:
    partition: DyadicPartition
    blocks: tuple

    def block(self, j: int) -> GridSignal:
        self.partition.check_level(j)
        return self.blocks[j + 1]

    def reconstruct(self) -> GridSignal:
        total = self.blocks[0].values.copy()
        for b in self.blocks[1:]:
            total = total + b.values
        return GridSignal(self.partition.spec, total)


def decompose(f: GridSignal, part: DyadicPartition | None = None) -> LPDecomposition:
    part = partition_for(f, part)
    B = blocks_array(f.values, part)
    return LPDecomposition(part, tuple(GridSignal(f.spec, b) for b in B))


@dataclass(frozen=True)
class BesovIndex:
    """Besov index (alpha, p, q); p and q may be ``inf``."""

    alpha: float
    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "p", check_p(self.p))
        q = float(self.q)
        if not q >= 1:
            raise ValidationError(f"summability exponent must be >= 1, got {q}")
        object.__setattr__(self, "q", q)

    def __str__(self):
        return f"B^{self.alpha:g}_{{{self.p:g},{self.q:g}}}"


def level_weights(part: DyadicPartition, alpha: float) -> np.ndarray:
    return 2.0 ** (alpha * np.arange(-1, part.J + 2))


def lq_sum(a: np.ndarray, q: float) -> float:
    if q == np.inf:
        return float(np.max(a))
    top = float(np.max(a))
    if top == 0.0:
        return 0.0
    return top * float(np.sum((a / top) ** q)) ** (1.0 / q)


def block_norms(f: GridSignal, p: float, part: DyadicPartition | None = None) -> np.ndarray:
    """lp_norm(Delta_j f, p) for j = -1 ... J+1."""
    part = partition_for(f, part)
    p = check_p(p)
    return lp_of_array(blocks_array(f.values, part), p, f.spec.dx, len(f.shape))


def besov_norm_lp(f: GridSignal, idx: BesovIndex, part: DyadicPartition | None = None) -> float:
    """l^q over j = -1 ... J+1 of 2^{j alpha} ||Delta_j f||_p."""
    part = partition_for(f, part)
    bn = block_norms(f, idx.p, part)
    return lq_sum(level_weights(part, idx.alpha) * bn, idx.q)


def modulus_of_continuity(f: GridSignal, p: float) -> tuple[np.ndarray, np.ndarray]:
    """omega_p(f, h_m) at the dyadic shifts h_m = 2^m dx, m = 0 ... log2(N) - 1.

    Returns ``(h, omega)``.  omega is the running max over all grid shifts of
    size at most h_m; shifts by -h have the same norm as shifts by +h on a
    periodic grid, so only positive shifts are evaluated.
    """
    p = check_p(p)
    spec = f.spec
    nch = len(f.shape)
    half = spec.N // 2
    diffs = np.empty(half)
    for k in range(1, half + 1):
        d = f.values - np.roll(f.values, k, axis=-1)
        diffs[k - 1] = lp_of_array(d, p, spec.dx, nch)
    running = np.maximum.accumulate(diffs)
    M = int(np.log2(spec.N))
    ks = 2 ** np.arange(M)
    return ks * spec.dx, running[ks - 1]


def besov_norm_modulus(f: GridSignal, idx: BesovIndex) -> float:
    """||f||_p + (integral over h of |h|^{-alpha q} omega_p(f, |h|)^q dh/|h|)^{1/q}.

    The integral over h in R is discretized on the dyadic shifts h_m with the
    logarithmic weight dh/h = ln 2 per octave, counted twice for both signs.
    """
    if not 0.0 < idx.alpha < 1.0:
        raise ValidationError(f"modulus characterization needs 0 < alpha < 1, got {idx.alpha}")
    base = float(lp_of_array(f.values, idx.p, f.spec.dx, len(f.shape)))
    h, om = modulus_of_continuity(f, idx.p)
    terms = h ** (-idx.alpha) * om
    if idx.q == np.inf:
        return base + float(np.max(terms))
    w = 2.0 * np.log(2.0)
    return base + lq_sum(terms, idx.q) * w ** (1.0 / idx.q)


def regularity_estimate(f: GridSignal, p: float, part: DyadicPartition | None = None,
                        levels: tuple[int, int] | None = None, rel_floor: float = 1e-9) -> float:
    """Minus the least-squares slope of log2 ||Delta_j f||_p against j.

    The fit runs over j = 1 ... J unless ``levels = (lo, hi)`` narrows it.
    Levels whose block norm is below ``rel_floor`` times the largest fitted
    block norm are treated as empty.
    """
    part = partition_for(f, part)
    lo, hi = (1, part.J) if levels is None else levels
    if lo < -1 or hi > part.J + 1 or lo > hi:
        raise ValidationError(f"fit range {lo}..{hi} outside the partition")
    bn = block_norms(f, p, part)
    js = np.arange(lo, hi + 1)
    vals = bn[js + 1]
    top = np.max(vals) if vals.size else 0.0
    use = vals > rel_floor * top if top > 0 else np.zeros_like(vals, dtype=bool)
    if np.count_nonzero(use) < 3:
        raise DegenerateFitError(
            f"only {np.count_nonzero(use)} usable levels in {lo}..{hi}; need at least 3")
    slope = np.polyfit(js[use], np.log2(vals[use]), 1)[0]
    return float(-slope)


__all__ = [
    "BesovIndex", "DyadicPartition", "LPDecomposition", "besov_norm_lp", "besov_norm_modulus",
    "block_norms", "blocks_array", "build_partition", "chi", "decompose", "filter_array",
    "lp_block", "modulus_of_continuity", "partial_sum", "regularity_estimate", "rho",
    "smoothstep", "smoothstep_derivative",
]
