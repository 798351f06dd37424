"""Walsh-Fourier coefficients, rectangular partial sums and Cesàro means.

Two routes are offered for each summation method. The coefficient route
builds ``f^(m, n)`` with the FWHT and sums the series; the kernel route
integrates ``f`` against ``D_M(x ∔ s) D_N(y ∔ t)`` (or the Cesàro kernels),
using that these kernels are step functions on dyadic cells. The routes
share nothing beyond the Walsh evaluation itself and serve as cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyadic import DyadicRational
from .funcrep import (
    GridFunction2D,
    PiecewiseLinear1D,
    SeparableFunction2D,
    cell_average,
    cell_integrals,
    ordered_sum,
)
from .walsh import dirichlet_grid, dirichlet_table, fwht, kernel_scale, walsh_at

MAX_SEPARABLE_SCALE = 24
MAX_GRID_SCALE = 11


class ForbiddenOrderError(ValueError):
    """Cesàro order is a negative integer, or a normalizer vanishes."""


@dataclass(frozen=True, eq=False)
class CesaroTable:
    """``A_0^alpha, ..., A_n^alpha``."""

    order: float
    values: np.ndarray

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    def __len__(self) -> int:
        return len(self.values)


def _is_negative_integer(alpha: float) -> bool:
    return alpha < 0 and float(alpha).is_integer()


def cesaro_numbers(alpha: float, n: int, *, strict: bool = True) -> CesaroTable:
    """Table of ``A_k^alpha = (alpha+1)...(alpha+k)/k!`` for ``k <= n``.

    Built by the recurrence ``A_k = A_{k-1} (alpha + k) / k``. With
    ``strict=False`` negative integer orders are allowed; they occur as the
    weight table ``A^{alpha-1}`` for integer ``alpha``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if strict and _is_negative_integer(alpha):
        raise ForbiddenOrderError(f"order {alpha} is a negative integer")
    vals = np.empty(n + 1)
    vals[0] = 1.0
    for k in range(1, n + 1):
        vals[k] = vals[k - 1] * (alpha + k) / k
    return CesaroTable(float(alpha), vals)


def _normalizer(alpha: float, n: int) -> float:
    a = cesaro_numbers(alpha, n - 1)[n - 1]
    if a == 0:
        raise ForbiddenOrderError(f"A_{n - 1}^{alpha} vanishes")
    return a


def cesaro_weights(alpha: float, n: int) -> np.ndarray:
    """``A_{n-k}^{alpha-1} / A_{n-1}^alpha`` for ``k = 1..n``."""
    if n < 1:
        raise ValueError("n must be positive")
    norm = _normalizer(alpha, n)
    low = cesaro_numbers(alpha - 1, n - 1, strict=False).values
    return low[::-1] / norm


def cesaro_kernel_grid(n: int, alpha: float, scale: int | None = None) -> np.ndarray:
    """``K_n^alpha`` on the grid at ``scale`` (default: the coarsest scale it is constant on)."""
    ks = kernel_scale(n)
    if scale is None:
        scale = ks
    w = cesaro_weights(alpha, n)
    if scale < ks:
        raise ValueError(f"K_{n} is not constant on cells at scale {scale}")
    table = dirichlet_table(n, ks).astype(float)
    vals = w @ table
    return np.repeat(vals, 1 << (scale - ks))


def cesaro_kernel(n: int, alpha: float, x: DyadicRational) -> float:
    ks = kernel_scale(n)
    idx = x.num >> (x.scale - ks) if x.scale > ks else x.num << (ks - x.scale)
    return float(cesaro_kernel_grid(n, alpha)[idx])


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    values: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __getitem__(self, idx):
        return self.values[idx]


def _factor_coeffs(u: PiecewiseLinear1D, count: int) -> np.ndarray:
    s = max(u.resolution, kernel_scale(count))
    if s > MAX_SEPARABLE_SCALE:
        raise ValueError(f"index {count} needs scale {s} > {MAX_SEPARABLE_SCALE}")
    return fwht(cell_average(u.refine(s), s))[:count]


def _grid_coeffs(f: GridFunction2D, rows: int, cols: int) -> np.ndarray:
    s = max(f.resolution, kernel_scale(max(rows, cols)))
    if s > MAX_GRID_SCALE:
        raise ValueError(f"index range needs scale {s} > {MAX_GRID_SCALE}")
    c = f.refine(s).cell_values
    return fwht(fwht(c, axis=0), axis=1)[:rows, :cols]


def fourier_coeffs(f, rows: int, cols: int) -> CoefficientMatrix:
    """``f^(m, n)`` for ``m < rows``, ``n < cols``, exact up to rounding."""
    if rows < 1 or cols < 1:
        raise ValueError("index counts must be positive")
    if isinstance(f, SeparableFunction2D):
        vals = sum(np.outer(_factor_coeffs(u, rows), _factor_coeffs(v, cols)) for u, v in f.terms)
    elif isinstance(f, GridFunction2D):
        vals = _grid_coeffs(f, rows, cols)
    else:
        raise TypeError(f"unsupported function type {type(f).__name__}")
    return CoefficientMatrix(np.asarray(vals, dtype=float))


def _walsh_row(count: int, x: DyadicRational) -> np.ndarray:
    return walsh_at(np.arange(count), x.num, x.scale).astype(float)


def _partial_sum_rows(f, rows: int, cols: int, x: DyadicRational, y: DyadicRational):
    """Yield pairs ``(P, Q)`` with ``S_{i,j}(x, y) = sum P[i-1] Q[j-1]`` (separable),
    or the full matrix of ``S_{i,j}`` (grid)."""
    wx = _walsh_row(rows, x)
    wy = _walsh_row(cols, y)
    if isinstance(f, SeparableFunction2D):
        return [
            (np.cumsum(_factor_coeffs(u, rows) * wx), np.cumsum(_factor_coeffs(v, cols) * wy))
            for u, v in f.terms
        ]
    if isinstance(f, GridFunction2D):
        g = _grid_coeffs(f, rows, cols) * np.outer(wx, wy)
        return np.cumsum(np.cumsum(g, axis=0), axis=1)
    raise TypeError(f"unsupported function type {type(f).__name__}")


def _truncate(x: DyadicRational, scale: int) -> int:
    return x.num >> (x.scale - scale) if x.scale > scale else x.num << (scale - x.scale)


def _shifted_step(kernel_vals: np.ndarray, x: DyadicRational) -> np.ndarray:
    """Cell values of ``s -> K(x ∔ s)`` for a kernel constant on cells at its own scale."""
    n = kernel_vals.shape[0]
    scale = n.bit_length() - 1
    cells = np.arange(n, dtype=np.int64)
    return kernel_vals[cells ^ _truncate(x, scale)]


def _grid_cell_integrals(step: np.ndarray, resolution: int) -> np.ndarray:
    """``∫`` of a step function over each cell of the grid at ``resolution``."""
    n = step.shape[0]
    scale = n.bit_length() - 1
    if scale >= resolution:
        return step.reshape(1 << resolution, -1).sum(axis=1) / n
    return np.repeat(step, 1 << (resolution - scale)) / (1 << resolution)


def _integrate_kernels(f, step_x: np.ndarray, step_y: np.ndarray) -> float:
    if isinstance(f, SeparableFunction2D):
        total = []
        for u, v in f.terms:
            sx = step_x.shape[0].bit_length() - 1
            sy = step_y.shape[0].bit_length() - 1
            total.append(ordered_sum(step_x * cell_integrals(u, sx)) * ordered_sum(step_y * cell_integrals(v, sy)))
        return ordered_sum(np.array(total))
    if isinstance(f, GridFunction2D):
        a = _grid_cell_integrals(step_x, f.resolution)
        b = _grid_cell_integrals(step_y, f.resolution)
        return float(a @ f.cell_values @ b)
    raise TypeError(f"unsupported function type {type(f).__name__}")


def partial_sum(f, rows: int, cols: int, x: DyadicRational, y: DyadicRational, strategy: str = "coeff") -> float:
    """Rectangular partial sum ``S_{rows, cols}(x, y; f)``."""
    if rows < 1 or cols < 1:
        raise ValueError("partial sum orders must be positive")
    if strategy == "coeff":
        parts = _partial_sum_rows(f, rows, cols, x, y)
        if isinstance(parts, list):
            return ordered_sum(np.array([p[-1] * q[-1] for p, q in parts]))
        return float(parts[-1, -1])
    if strategy == "kernel":
        dx = dirichlet_grid(rows, kernel_scale(rows)).astype(float)
        dy = dirichlet_grid(cols, kernel_scale(cols)).astype(float)
        return _integrate_kernels(f, _shifted_step(dx, x), _shifted_step(dy, y))
    raise ValueError(f"unknown strategy {strategy!r}")


def cesaro_mean(f, n: int, m: int, alpha: float, beta: float, x: DyadicRational, y: DyadicRational,
                strategy: str = "definition") -> float:
    """``sigma_{n,m}^{alpha,beta}(x, y; f)``."""
    if n < 1 or m < 1:
        raise ValueError("orders must be positive")
    if strategy == "definition":
        a = cesaro_weights(alpha, n)
        b = cesaro_weights(beta, m)
        parts = _partial_sum_rows(f, n, m, x, y)
        if isinstance(parts, list):
            return ordered_sum(np.array([(a @ p) * (b @ q) for p, q in parts]))
        return float(a @ parts @ b)
    if strategy == "kernel":
        kx = cesaro_kernel_grid(n, alpha)
        ky = cesaro_kernel_grid(m, beta)
        return _integrate_kernels(f, _shifted_step(kx, x), _shifted_step(ky, y))
    raise ValueError(f"unknown strategy {strategy!r}")
