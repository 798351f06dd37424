"""Tent trains and the divergence probes at the origin.

``phi_N`` is a train of unit tents on the dyadic cells of length
``2**-2N`` (all but the first). Multiplying it by the sign of a kernel that is
constant on those cells keeps it continuous, and the integral of the product
against the kernel turns into ``sum |kernel| * (tent area)``. Reported
functional values are the raw integrals. Each report pairs them with a
certified upper bound for the weighted variation of the witness, and their
ratio is the quantity that must grow without bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .dyadic import DyadicRational
from .funcrep import PiecewiseLinear1D, SeparableFunction2D, integrate_against_step, ordered_sum
from .intervals import weighted_value
from .series import cesaro_kernel_grid, cesaro_mean, partial_sum
from .variation import tent_train_budget
from .walsh import dirichlet_grid, q_index
from .weights import WeightSequence, cesaro_class, divergence_class

MAX_PHI_N = 8
MAX_G_N = 6
MAX_H_N = 5
MAX_TEV_N = 10


def _check_range(N: int, cap: int, what: str) -> None:
    if not 1 <= N <= cap:
        raise ValueError(f"{what} needs 1 <= N <= {cap}, got {N}")


def _check_orders(alpha: float, beta: float) -> None:
    if not (0 < alpha < 1 and 0 < beta < 1):
        raise ValueError("alpha and beta must lie in (0, 1)")
    if alpha + beta >= 1:
        raise ValueError("alpha + beta must be below 1")


def build_phi(N: int) -> PiecewiseLinear1D:
    """``phi_N``: tents of height 1 on ``[j 2**-2N, (j+1) 2**-2N]`` for ``1 <= j < 4**N``."""
    _check_range(N, MAX_PHI_N, "build_phi")
    m = 2 * N + 1
    k = np.arange((1 << m) + 1)
    values = ((k % 2 == 1) & (k >= 3)).astype(float)
    return PiecewiseLinear1D(m, values)


def phi_tent_count(N: int) -> int:
    return (1 << (2 * N)) - 1


def _sign(values: np.ndarray) -> np.ndarray:
    # sgn(0) = 0
    return np.sign(np.asarray(values, dtype=float))


def dirichlet_signs(N: int) -> np.ndarray:
    """``sgn D_{q_N}`` on the cells of length ``2**-2N``."""
    return _sign(dirichlet_grid(q_index(N), 2 * N))


def cesaro_signs(N: int, alpha: float) -> np.ndarray:
    """``sgn K_{4**N}^{-alpha}`` on the cells of length ``2**-2N``."""
    return _sign(cesaro_kernel_grid(1 << (2 * N), -alpha))


def build_gN(N: int) -> SeparableFunction2D:
    """``g_N(x, y) = phi_N(x) phi_N(y) sgn D_{q_N}(x) sgn D_{q_N}(y)``."""
    _check_range(N, MAX_G_N, "build_gN")
    u = build_phi(N).with_cell_signs(dirichlet_signs(N), 2 * N)
    return SeparableFunction2D.product(u, u)


def build_hN(N: int, alpha: float, beta: float) -> SeparableFunction2D:
    """``h_N(x, y) = phi_N(x) phi_N(y) sgn K^{-alpha}(x) sgn K^{-beta}(y)``, kernels of order ``4**N``."""
    _check_orders(alpha, beta)
    _check_range(N, MAX_H_N, "build_hN")
    phi = build_phi(N)
    u = phi.with_cell_signs(cesaro_signs(N, alpha), 2 * N)
    v = phi.with_cell_signs(cesaro_signs(N, beta), 2 * N)
    return SeparableFunction2D.product(u, v)


@dataclass(frozen=True)
class ProbeReport:
    family: str
    N: int
    functional_value: float
    kernel_integrals: tuple[float, ...]
    variation_upper: float
    variation_lower: float
    bound_check: float
    growth_ratio: float
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.variation_lower > self.variation_upper:
            raise ValueError("variation bounds are inverted")
        if self.functional_value < 0:
            raise ValueError("functional value must be nonnegative")

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "N": self.N,
            "functional_value": self.functional_value,
            "kernel_integrals": list(self.kernel_integrals),
            "variation_upper": self.variation_upper,
            "variation_lower": self.variation_lower,
            "bound_check": self.bound_check,
            "growth_ratio": self.growth_ratio,
            **self.extra,
        }


def tent_integral_exact(kernel_cells: np.ndarray, N: int) -> Fraction:
    """``∫ phi_N |K|`` for a kernel with integer values on cells of length ``2**-2N``.

    Each tent has area ``2**(-2N-1)``; the first cell carries no tent.
    """
    total = sum(abs(int(v)) for v in kernel_cells[1:])
    return Fraction(total, 1 << (2 * N + 1))


def tent_integral(kernel_cells: np.ndarray, N: int) -> float:
    """Float version of :func:`tent_integral_exact` by the per-cell formula."""
    return ordered_sum(np.abs(np.asarray(kernel_cells[1:], dtype=float))) / (1 << (2 * N + 1))


def half_tent_lower(N: int, lam: WeightSequence) -> float:
    """Weighted value of the system of all half-tents (each increment equals 1)."""
    P = 2 * phi_tent_count(N)
    return weighted_value(np.ones(P), lam.reciprocals(P))


def harmonic_fraction(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def probe_partial_sum(N: int, lam: WeightSequence | None = None, cross_check: bool | None = None) -> ProbeReport:
    """Partial sums ``S_{q_N, q_N}(0, 0; g_N)`` against the budget of ``g_N``.

    ``I_N = ∫ phi_N |D_{q_N}|`` is exact; ``S = I_N**2``.
    ``bound_check = H_{4**N - 1} / 8``: on the cell starting at ``j 2**-2N``,
    ``|D_{q_N}| >= 4**N / (4j)`` and the tent has area ``2**(-2N-1)``.
    """
    _check_range(N, MAX_G_N, "probe_partial_sum")
    lam = divergence_class() if lam is None else lam
    d = dirichlet_grid(q_index(N), 2 * N)
    exact = tent_integral_exact(d, N)
    bound = harmonic_fraction(phi_tent_count(N)) / 8
    if exact < bound:
        raise AssertionError(f"I_{N} = {exact} is below H/8 = {bound}")
    I_N = float(exact)
    quad = integrate_against_step(build_phi(N), np.abs(d).astype(float))
    P = 2 * phi_tent_count(N)
    upper = tent_train_budget(P, 1.0, lam)
    extra: dict[str, Any] = {
        "I_exact": str(exact),
        "I_quadrature": quad,
        "pieces": P,
        "lambda": lam.describe(),
        "lambda_clamped": lam.clamped_count(P),
    }
    if cross_check if cross_check is not None else N <= 4:
        zero = DyadicRational.zero()
        q = q_index(N)
        extra["S_fwht"] = partial_sum(build_gN(N), q, q, zero, zero, strategy="coeff")
    value = I_N * I_N
    return ProbeReport("partial-sum", N, value, (I_N,), upper, half_tent_lower(N, lam), float(bound),
                       value / upper, extra)


def band_integrals(kernel_cells: np.ndarray) -> np.ndarray:
    """``∫ |K|`` over the bands ``[2**(m-M-1), 2**(m-M))`` for ``m = 1..M``.

    ``kernel_cells`` holds the values on the ``2**M`` cells of length ``2**-M``.
    """
    n = kernel_cells.shape[0]
    M = n.bit_length() - 1
    absk = np.abs(np.asarray(kernel_cells, dtype=float))
    return np.array([ordered_sum(absk[1 << (m - 1): 1 << m]) / n for m in range(1, M + 1)])


@dataclass(frozen=True)
class BandReport:
    N: int
    alpha: float
    integrals: np.ndarray
    slope: float
    min_ratio: float

    def to_json(self) -> dict:
        return {"N": self.N, "alpha": self.alpha, "band_integrals": self.integrals.tolist(),
                "slope": self.slope, "min_ratio": self.min_ratio}


def tev_band_integrals(N: int, alpha: float) -> BandReport:
    """Band integrals of ``|K_{2**N}^{-alpha}|``, the least-squares slope of their
    base-2 logarithms against ``m = 2..N``, and ``min_m integral / 2**(m alpha)``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    _check_range(N, MAX_TEV_N, "tev_band_integrals")
    bands = band_integrals(cesaro_kernel_grid(1 << N, -alpha))
    m = np.arange(1, N + 1)
    slope = float(np.polyfit(m[1:], np.log2(bands[1:]), 1)[0]) if N >= 3 else float("nan")
    ratio = float(np.min(bands / 2.0 ** (m * alpha)))
    return BandReport(N, alpha, bands, slope, ratio)


def _cesaro_lower(bands: np.ndarray, order: float) -> float:
    """``(1/2) c sum_m 2**(m order)`` with ``c = min_m band_m / 2**(m order)``.

    The tent integral equals half the sum of the bands, so this never
    exceeds it.
    """
    m = np.arange(1, bands.size + 1)
    weights = 2.0 ** (m * order)
    return 0.5 * float(np.min(bands / weights)) * ordered_sum(weights)


def probe_cesaro(N: int, alpha: float = 0.3, beta: float = 0.3, lam: WeightSequence | None = None,
                 cross_check: bool | None = None) -> ProbeReport:
    """Means ``sigma^{-alpha,-beta}_{4**N, 4**N}(0, 0; h_N)`` against the budget of ``h_N``."""
    _check_orders(alpha, beta)
    _check_range(N, MAX_H_N, "probe_cesaro")
    lam = cesaro_class(alpha, beta) if lam is None else lam
    ka = cesaro_kernel_grid(1 << (2 * N), -alpha)
    kb = ka if beta == alpha else cesaro_kernel_grid(1 << (2 * N), -beta)
    J_a = tent_integral(ka, N)
    J_b = tent_integral(kb, N)
    phi = build_phi(N)
    quad = (integrate_against_step(phi, np.abs(ka)), integrate_against_step(phi, np.abs(kb)))
    bound = _cesaro_lower(band_integrals(ka), alpha) * _cesaro_lower(band_integrals(kb), beta)
    P = 2 * phi_tent_count(N)
    upper = tent_train_budget(P, 1.0, lam)
    extra: dict[str, Any] = {
        "alpha": alpha,
        "beta": beta,
        "J_quadrature": list(quad),
        "pieces": P,
        "lambda": lam.describe(),
        "lambda_clamped": lam.clamped_count(P),
    }
    if cross_check if cross_check is not None else N <= 3:
        zero = DyadicRational.zero()
        n = 1 << (2 * N)
        extra["sigma_direct"] = cesaro_mean(build_hN(N, alpha, beta), n, n, -alpha, -beta, zero, zero,
                                            strategy="definition")
    value = J_a * J_b
    return ProbeReport("cesaro", N, value, (J_a, J_b), upper, half_tent_lower(N, lam), bound,
                       value / upper, extra)
