"""Littlewood-Paley analysis, Bony paraproducts and paracontrolled solvers on periodic grids."""

__version__ = "0.1.0"

from .errors import DegenerateFitError, PcalError, SolverError, SpecMismatchError, ValidationError
from .grid import GridSignal, GridSpec, lp_norm
from .littlewood_paley import (BesovIndex, DyadicPartition, besov_norm_lp, besov_norm_modulus,
                               build_partition, decompose, regularity_estimate)
from .paraproduct import bony_product, commutator, paraproduct, resonant
from .calculus import antiderivative, derivative, make_localizer, make_weight, scale
from .composition import make_field, paralinearize, pi_F
from .solvers import (GeometricRoughPath, SolverConfig, grid_exact_path, paracontrolled_solve,
                      young_solve)
from .signals import (RandomSeriesParams, gen_brownian, gen_fbm, gen_wavelet_series,
                      gen_weierstrass, lift, localized_resonant)

__all__ = [
    "BesovIndex", "DegenerateFitError", "DyadicPartition", "GeometricRoughPath", "GridSignal",
    "GridSpec", "PcalError", "RandomSeriesParams", "SolverConfig", "SolverError",
    "SpecMismatchError", "ValidationError", "antiderivative", "besov_norm_lp",
    "besov_norm_modulus", "bony_product", "build_partition", "commutator", "decompose",
    "derivative", "gen_brownian", "gen_fbm", "gen_wavelet_series", "gen_weierstrass",
    "grid_exact_path", "lift", "localized_resonant", "lp_norm", "make_field", "make_localizer",
    "make_weight", "paracontrolled_solve", "paralinearize", "paraproduct", "pi_F",
    "regularity_estimate", "resonant", "scale", "young_solve",
]
