"""Bony decomposition: paraproducts, resonant term and commutators.

All sums run over the levels -1 ... J+1 of the partition, in ascending level
order, so every (i, j) block pair of the product is visited exactly once and
results are bit-reproducible.  Products are taken on the grid as they are;
nothing is projected back onto a band.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpecMismatchError
from .grid import GridSignal, contract
from .littlewood_paley import DyadicPartition, blocks_array, filter_array, partition_for


def _same_grid(*fs: GridSignal):
    spec = fs[0].spec
    for f in fs[1:]:
        if f.spec != spec:
            raise SpecMismatchError(f"grid mismatch: {spec} vs {f.spec}")


def para_blocks(Bf: np.ndarray, Bg: np.ndarray) -> np.ndarray:
    """sum_j S_{j-1} f * Delta_j g from block arrays (row j+1 holds level j)."""
    S = np.cumsum(Bf, axis=0)  # S[i] = sum of levels <= i - 1, i.e. S_{i} f
    out = None
    for j in range(1, Bg.shape[0] - 1):
        # S_{j-1} f collects levels <= j - 2, which is S[j - 1]
        term = contract(S[j - 1], Bg[j + 1])
        out = term if out is None else out + term
    return out


def resonant_blocks(Bf: np.ndarray, Bg: np.ndarray) -> np.ndarray:
    """sum over |i - j| <= 1 of Delta_i f * Delta_j g from block arrays."""
    n = Bf.shape[0]
    out = None
    for i in range(n):
        near = Bg[i]
        if i > 0:
            near = Bg[i - 1] + near
        if i < n - 1:
            near = near + Bg[i + 1]
        term = contract(Bf[i], near)
        out = term if out is None else out + term
    return out


def paraproduct(f: GridSignal, g: GridSignal, part: DyadicPartition | None = None) -> GridSignal:
    """T_f g = sum_j S_{j-1} f Delta_j g."""
    _same_grid(f, g)
    part = partition_for(f, part)
    v = para_blocks(blocks_array(f.values, part), blocks_array(g.values, part))
    return GridSignal(f.spec, v)


def resonant(f: GridSignal, g: GridSignal, part: DyadicPartition | None = None) -> GridSignal:
    """pi(f, g) = sum_{|i-j|<=1} Delta_i f Delta_j g."""
    _same_grid(f, g)
    part = partition_for(f, part)
    v = resonant_blocks(blocks_array(f.values, part), blocks_array(g.values, part))
    return GridSignal(f.spec, v)


@dataclass(frozen=True)
class BonyParts:
    Tfg: GridSignal
    Tgf: GridSignal
    pi: GridSignal
    product: GridSignal


def _swap_para(Bf, Bg):
    # T_g f with the contraction order of f * g kept: S_{j-1} g against Delta_j f
    S = np.cumsum(Bg, axis=0)
    out = None
    for j in range(1, Bf.shape[0] - 1):
        term = contract(Bf[j + 1], S[j - 1])
        out = term if out is None else out + term
    return out


def bony_product(f: GridSignal, g: GridSignal, part: DyadicPartition | None = None) -> BonyParts:
    """T_f g, T_g f, pi(f, g) and their sum.

    For matrix-times-vector contraction ``T_g f`` keeps ``f`` on the left so
    that the three parts add up to the contracted product f g.
    """
    _same_grid(f, g)
    part = partition_for(f, part)
    Bf = blocks_array(f.values, part)
    Bg = blocks_array(g.values, part)
    a = para_blocks(Bf, Bg)
    b = _swap_para(Bf, Bg)
    c = resonant_blocks(Bf, Bg)
    s = f.spec
    return BonyParts(GridSignal(s, a), GridSignal(s, b), GridSignal(s, c), GridSignal(s, a + b + c))


def block_commutator(f: GridSignal, g: GridSignal, j: int,
                     part: DyadicPartition | None = None) -> GridSignal:
    """[Delta_j, f] g = Delta_j(f g) - f Delta_j g."""
    _same_grid(f, g)
    part = partition_for(f, part)
    part.check_level(j)
    m = part.masks[j + 1:j + 2]
    fg = contract(f.values, g.values)
    v = filter_array(fg, m, part)[0] - contract(f.values, filter_array(g.values, m, part)[0])
    return GridSignal(f.spec, v)


def commutator(f: GridSignal, g: GridSignal, h: GridSignal,
               part: DyadicPartition | None = None) -> GridSignal:
    """Gamma(f, g, h) = pi(T_f g, h) - f pi(g, h)."""
    _same_grid(f, g, h)
    part = partition_for(f, part)
    Bg = blocks_array(g.values, part)
    Bh = blocks_array(h.values, part)
    Tfg = para_blocks(blocks_array(f.values, part), Bg)
    v = resonant_blocks(blocks_array(Tfg, part), Bh) - contract(f.values, resonant_blocks(Bg, Bh))
    return GridSignal(f.spec, v)
