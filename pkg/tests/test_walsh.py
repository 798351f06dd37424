from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from conftest import tolerance
from hypothesis import given
from hypothesis import strategies as st

from walshlab.dyadic import DyadicRational, dyadic_add, grid
from walshlab.walsh import (
    STRATEGIES,
    bit_reverse,
    check_lowest,
    dirichlet,
    dirichlet_at,
    dirichlet_grid,
    dirichlet_pow2,
    dirichlet_table,
    fwht,
    kernel_samples,
    kernel_scale,
    naive_walsh_transform,
    q_index,
    rademacher,
    walsh,
    walsh_at,
    walsh_matrix,
)


def d(text: str) -> DyadicRational:
    return DyadicRational.from_fraction(text)


def direct_sum(n: int, x: DyadicRational) -> int:
    """Reference: add the Walsh functions one by one from their Rademacher factors."""
    total = 0
    for k in range(n):
        sign = 1
        for j in range(k.bit_length()):
            if k >> j & 1:
                sign *= rademacher(j, x)
        total += sign
    return total


@pytest.mark.parametrize("n, x, expected", [(0, "1/4", 1), (0, "3/4", -1), (1, "1/4", -1)])
def test_rademacher_examples(n, x, expected):
    assert rademacher(n, d(x)) == expected


@pytest.mark.parametrize("k, x, expected", [(0, "5/8", 1), (3, "1/4", -1), (2, "1/2", 1)])
def test_walsh_examples(k, x, expected):
    assert walsh(k, d(x)) == expected


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_dirichlet_examples(strategy):
    for n in (1, 2, 7, 8, 33):
        assert dirichlet(n, DyadicRational.zero(), strategy) == n
    assert dirichlet(8, d("1/4"), strategy) == 0
    assert dirichlet(5, d("1/2"), strategy) == 1


def test_q_index_examples():
    assert [q_index(n) for n in (1, 2, 3)] == [1, 5, 21]
    with pytest.raises(ValueError):
        q_index(0)


def test_walsh_from_rademacher_products():
    for x in grid(5):
        for k in range(64):
            assert walsh(k, x) == direct_sum(k + 1, x) - direct_sum(k, x)


def test_vectorized_walsh_matches_scalar():
    W = walsh_matrix(32, 5)
    for k, j in itertools.product(range(32), range(32)):
        assert W[k, j] == walsh(k, DyadicRational(j, 5))


def test_character_property_scale_8():
    nums = np.arange(256)
    W = walsh_matrix(256, 8)
    for x in range(0, 256, 7):
        # w_k(x ∔ y) = w_k(x) w_k(y) for every y on the grid and every k < 2^8
        assert np.array_equal(W[:, nums ^ x], W[:, [x]] * W)


def test_character_property_scalar_points():
    for x, y in itertools.product(grid(3), repeat=2):
        for k in range(8):
            assert walsh(k, dyadic_add(x, y)) == walsh(k, x) * walsh(k, y)


def test_strategies_agree_on_grid():
    nums = np.arange(1 << 10)
    table = dirichlet_table(256, 10)
    for n in range(1, 257):
        ref = dirichlet_at(n, nums, 10, "direct")
        assert np.array_equal(ref, table[n - 1])
        for s in ("recursive", "w3"):
            assert np.array_equal(dirichlet_at(n, nums, 10, s), ref), (n, s)


def test_dirichlet_direct_matches_reference_sum():
    for n in range(1, 40):
        for x in grid(6)[::5]:
            assert dirichlet(n, x, "direct") == direct_sum(n, x)


def test_power_of_two_closed_form():
    nums = np.arange(1 << 12)
    for m in range(11):
        expected = np.where(nums < (1 << (12 - m)), 1 << m, 0)
        for s in STRATEGIES:
            assert np.array_equal(dirichlet_at(1 << m, nums, 12, s), expected)
        assert np.array_equal(dirichlet_pow2(m, nums, 12), expected)


def test_kernel_scale_constancy():
    for n in range(1, 70):
        s = kernel_scale(n)
        fine = dirichlet_grid(n, s + 2)
        assert np.array_equal(fine, np.repeat(dirichlet_grid(n, s), 4))


def test_kernel_samples_bounded():
    samples = kernel_samples(13, 4)
    assert len(samples) == 16
    assert all(abs(s.value) <= 13 for s in samples)
    assert samples[0].value == 13


def test_bit_reverse():
    assert bit_reverse([1, 2, 3, 6], 3).tolist() == [4, 2, 6, 3]


@pytest.mark.parametrize("c", [0.0, 2.5, -1.0])
def test_fwht_constant(c):
    out = fwht(np.full(16, c))
    assert out[0] == c
    assert np.all(out[1:] == 0)


def test_fwht_small_example():
    assert fwht([4.0, 0.0, 0.0, 0.0]).tolist() == [1.0, 1.0, 1.0, 1.0]


def test_fwht_matches_naive_and_involution():
    rng = np.random.default_rng(7)
    tol = tolerance("FWHT")
    for m in range(1, 11):
        v = rng.standard_normal(1 << m)
        assert np.max(np.abs(fwht(v) - naive_walsh_transform(v))) <= tol
        assert np.max(np.abs(fwht(fwht(v)) * (1 << m) - v)) <= tol


def test_fwht_parseval():
    rng = np.random.default_rng(8)
    v = rng.standard_normal(1 << 9)
    assert abs(np.mean(v**2) - np.sum(fwht(v) ** 2)) <= 1e-10


def test_fwht_coefficients_of_walsh_function():
    v = walsh_at(5, np.arange(16), 4).astype(float)
    out = fwht(v)
    assert out[5] == 1.0 and np.count_nonzero(out) == 1


def test_fwht_axis_argument():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((4, 8))
    assert np.allclose(fwht(a, axis=0), fwht(a.T).T)
    with pytest.raises(ValueError):
        fwht(np.ones(6))


# The lower bound |D_{q_n}(x)| >= 1/(4x) on the stated range [2^{-2n-1}, 1).
# On [2^{-2n-1}, 2^{-2n}) the kernel equals q_n and the product is about 2/3,
# so these three cases fail as stated (see the decisions ledger).


def test_lowest_stated_range_n1_scale4():
    assert check_lowest(1, 4).min_product >= 1


def test_lowest_stated_range_n3_scale8():
    assert check_lowest(3, 8).min_product >= 1


def test_lowest_stated_range_exact_minima():
    # exhaustive minima recorded for reference
    expected = [Fraction(1, 2), Fraction(5, 8), Fraction(21, 32), Fraction(85, 128), Fraction(341, 512)]
    assert [check_lowest(n).min_product for n in range(1, 6)] == expected


def test_lowest_bound_from_first_full_cell():
    for n in range(1, 7):
        rep = check_lowest(n, start_exponent=2 * n)
        assert rep.holds and rep.min_product == 1


def test_lowest_single_point_example():
    # n = 2, x = 1/2: |D_5(1/2)| * 4 * 1/2 = 2
    assert abs(dirichlet(5, d("1/2"))) * 4 * Fraction(1, 2) == 2


@given(st.integers(1, 300), st.integers(0, 9).flatmap(lambda s: st.tuples(st.just(s), st.integers(0, (1 << s) - 1))))
def test_strategies_agree_random(n, point):
    s, j = point
    x = DyadicRational(j, s)
    vals = {dirichlet(n, x, strategy) for strategy in STRATEGIES}
    assert len(vals) == 1
