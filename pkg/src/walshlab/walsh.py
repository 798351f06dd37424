"""Rademacher and Walsh-Paley functions, Walsh-Dirichlet kernels, and the
fast Walsh-Hadamard transform in Paley ordering.

Kernels are exact integers. Grid routines take numerators ``j`` of points
``j / 2**scale`` as integer arrays. For ``k < 2**scale`` the function ``w_k``
is constant on grid cells of length ``2**-scale``.

Transform normalization: :func:`fwht` includes the factor ``2**-M``, so for a
vector of cell values of a step function at scale ``M`` its output is exactly
the list of Walsh-Fourier coefficients ``f^(0), ..., f^(2**M - 1)``. Applying
it twice returns the input divided by ``2**M``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dyadic import DyadicRational, digit

STRATEGIES = ("direct", "recursive", "w3")


def _as_int_array(values) -> np.ndarray:
    return np.asarray(values, dtype=np.int64)


def bit_reverse(values, width: int) -> np.ndarray:
    """Reverse the lowest ``width`` bits of each entry."""
    v = _as_int_array(values)
    out = np.zeros_like(v)
    for i in range(width):
        out |= ((v >> i) & 1) << (width - 1 - i)
    return out


def _parity(values: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(values) & 1).astype(np.int64)


def rademacher(n: int, x: DyadicRational) -> int:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return -1 if digit(x, n) else 1


def walsh(k: int, x: DyadicRational) -> int:
    """``w_k(x)``: product of ``r_j(x)`` over the set bits ``j`` of ``k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    # only digits below x.scale can be nonzero
    low = k & ((1 << x.scale) - 1)
    rev = int(bit_reverse(x.num, x.scale))
    return -1 if (low & rev).bit_count() & 1 else 1


def walsh_at(k, nums, scale: int) -> np.ndarray:
    """Vectorized ``w_k(j / 2**scale)``; ``k`` and ``nums`` broadcast."""
    k = _as_int_array(k) & ((1 << scale) - 1)
    rev = bit_reverse(nums, scale)
    return 1 - 2 * _parity(k & rev)


def walsh_matrix(count: int, scale: int) -> np.ndarray:
    """Array ``W[k, j] = w_k(j / 2**scale)`` for ``k < count``, ``j < 2**scale``."""
    k = np.arange(count, dtype=np.int64)[:, None]
    j = np.arange(1 << scale, dtype=np.int64)[None, :]
    return walsh_at(k, j, scale).astype(np.int64)


def dirichlet_pow2(a: int, nums, scale: int) -> np.ndarray:
    """``D_{2^a}`` on grid points: ``2**a`` on ``[0, 2**-a)``, zero elsewhere."""
    nums = _as_int_array(nums)
    if a <= scale:
        inside = nums < (1 << (scale - a))
    else:
        inside = nums == 0
    return np.where(inside, np.int64(1) << a, 0).astype(np.int64)


def _direct(n: int, nums: np.ndarray, scale: int) -> np.ndarray:
    out = np.zeros(nums.shape, dtype=np.int64)
    rev = bit_reverse(nums, scale)
    mask = (1 << scale) - 1
    for k in range(n):
        out += 1 - 2 * _parity((k & mask) & rev)
    return out


def _recursive(n: int, nums: np.ndarray, scale: int) -> np.ndarray:
    # D_{2^a + m} = D_{2^a} + w_{2^a} D_m with 0 <= m < 2^a, peeled from the top bit
    out = np.zeros(nums.shape, dtype=np.int64)
    sign = np.ones(nums.shape, dtype=np.int64)
    m = n
    while m:
        a = m.bit_length() - 1
        out += sign * dirichlet_pow2(a, nums, scale)
        sign = sign * walsh_at(1 << a, nums, scale)
        m -= 1 << a
    return out


def _w3(n: int, nums: np.ndarray, scale: int) -> np.ndarray:
    # D_n = w_n * sum_j n_j w_{2^j} D_{2^j}
    acc = np.zeros(nums.shape, dtype=np.int64)
    for j in range(n.bit_length()):
        if (n >> j) & 1:
            acc += walsh_at(1 << j, nums, scale) * dirichlet_pow2(j, nums, scale)
    return walsh_at(n, nums, scale) * acc


_IMPL = {"direct": _direct, "recursive": _recursive, "w3": _w3}


def dirichlet_at(n: int, nums, scale: int, strategy: str = "recursive") -> np.ndarray:
    """``D_n(j / 2**scale)`` for an array of numerators ``j``."""
    if n < 1:
        raise ValueError("n must be positive")
    try:
        impl = _IMPL[strategy]
    except KeyError:
        raise ValueError(f"unknown strategy {strategy!r}") from None
    return impl(n, _as_int_array(nums), scale)


def dirichlet(n: int, x: DyadicRational, strategy: str = "recursive") -> int:
    return int(dirichlet_at(n, [x.num], x.scale, strategy)[0])


def dirichlet_grid(n: int, scale: int, strategy: str = "recursive") -> np.ndarray:
    return dirichlet_at(n, np.arange(1 << scale), scale, strategy)


def dirichlet_table(n_max: int, scale: int) -> np.ndarray:
    """Rows ``D_1 .. D_{n_max}`` on the full grid at ``scale`` (row ``k-1`` is ``D_k``)."""
    return np.cumsum(walsh_matrix(n_max, scale), axis=0)


def kernel_scale(n: int) -> int:
    """Smallest ``s`` with ``n <= 2**s``; ``D_n`` and ``K_n`` are constant on cells at this scale."""
    return max(0, (n - 1).bit_length())


@dataclass(frozen=True)
class KernelSample:
    n: int
    x: DyadicRational
    value: int

    def __post_init__(self) -> None:
        if abs(self.value) > self.n:
            raise ValueError(f"|D_{self.n}| cannot exceed {self.n}")


def kernel_samples(n: int, scale: int, strategy: str = "recursive") -> list[KernelSample]:
    vals = dirichlet_grid(n, scale, strategy)
    return [KernelSample(n, DyadicRational(j, scale), int(v)) for j, v in enumerate(vals)]


def q_index(n: int) -> int:
    """``q_n = 4**(n-1) + 4**(n-2) + ... + 4 + 1``."""
    if n < 1:
        raise ValueError("n must be positive")
    return sum(1 << (2 * i) for i in range(n))


def bit_reversal_permutation(m: int) -> np.ndarray:
    return bit_reverse(np.arange(1 << m), m)


def fwht(values, axis: int = -1) -> np.ndarray:
    """Paley-ordered Walsh-Hadamard transform with ``2**-M`` normalization.

    ``out[k] = 2**-M * sum_j values[j] * w_k(j / 2**M)``, computed with
    ``M * 2**M`` butterflies along ``axis``.
    """
    a = np.asarray(values, dtype=float)
    n = a.shape[axis]
    if n < 1 or n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    m = n.bit_length() - 1
    a = np.moveaxis(a, axis, -1)
    lead = a.shape[:-1]
    a = a[..., bit_reversal_permutation(m)]
    h = 1
    while h < n:
        a = a.reshape(lead + (n // (2 * h), 2, h))
        lo = a[..., 0, :]
        hi = a[..., 1, :]
        a = np.stack((lo + hi, lo - hi), axis=-2)
        h *= 2
    a = a.reshape(lead + (n,)) / n
    return np.moveaxis(a, -1, axis)


def naive_walsh_transform(values) -> np.ndarray:
    """Quadratic-time reference for :func:`fwht`."""
    v = np.asarray(values, dtype=float)
    n = v.shape[0]
    m = n.bit_length() - 1
    return walsh_matrix(n, m) @ v / n


@dataclass(frozen=True)
class LowestReport:
    n: int
    grid_scale: int
    start_exponent: int
    min_product: Fraction
    argmin: DyadicRational

    @property
    def holds(self) -> bool:
        return self.min_product >= 1


def check_lowest(n: int, grid_scale: int | None = None, start_exponent: int | None = None) -> LowestReport:
    """Minimum of ``|D_{q_n}(x)| * 4x`` over grid points ``x`` in ``[2**-start_exponent, 1)``.

    ``start_exponent`` defaults to ``2n + 1``. The bound ``>= 1`` only holds
    from ``2**-2n`` on: on ``[2**(-2n-1), 2**-2n)`` the kernel equals ``q_n`` and
    the product dips to about 2/3. The products are exact rationals.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if start_exponent is None:
        start_exponent = 2 * n + 1
    if grid_scale is None:
        grid_scale = 2 * n + 2
    if grid_scale < start_exponent:
        raise ValueError(f"grid_scale must be at least {start_exponent}")
    start = 1 << (grid_scale - start_exponent)
    nums = np.arange(start, 1 << grid_scale, dtype=np.int64)
    d = np.abs(dirichlet_at(q_index(n), nums, grid_scale))
    # |D| * 4 * j / 2^s, compared on the common denominator 2^s
    scaled = d * 4 * nums
    i = int(np.argmin(scaled))
    return LowestReport(
        n=n,
        grid_scale=grid_scale,
        start_exponent=start_exponent,
        min_product=Fraction(int(scaled[i]), 1 << grid_scale),
        argmin=DyadicRational(int(nums[i]), grid_scale),
    )
