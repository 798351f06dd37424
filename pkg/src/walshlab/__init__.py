"""Walsh-Fourier series on the unit square: kernels, summation methods,
generalized variations and divergence probes at the origin."""
from __future__ import annotations

from .dyadic import DyadicInterval, DyadicRational, dyadic_add
from .funcrep import GridFunction2D, PiecewiseLinear1D, SeparableFunction2D, w_continuous_at
from .series import cesaro_mean, fourier_coeffs, partial_sum
from .walsh import dirichlet, fwht, walsh
from .weights import WeightSequence

__version__ = "0.1.0"

__all__ = [
    "DyadicInterval",
    "DyadicRational",
    "GridFunction2D",
    "PiecewiseLinear1D",
    "SeparableFunction2D",
    "WeightSequence",
    "cesaro_mean",
    "dirichlet",
    "dyadic_add",
    "fourier_coeffs",
    "fwht",
    "partial_sum",
    "w_continuous_at",
    "walsh",
]
