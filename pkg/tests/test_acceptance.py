"""Acceptance criteria, one test per criterion.

Each test prints ``PASS criterion k: ...`` or ``FAIL criterion k: ...`` with
the measured quantities and the runtime, then asserts the verdict. Runtime
limits are part of the verdict. Tolerances come from ``conftest.tolerance``
and can be overridden through ``WALSHLAB_TOL_<NAME>``.
"""
from __future__ import annotations

import time
from fractions import Fraction

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES, CORPUS_SEED, grid_corpus, tolerance
from oracles import lambda_var_line, sharp_var_line, v_sharp_line

from walshlab.counterexamples import harmonic_fraction, probe_cesaro, probe_partial_sum, tev_band_integrals
from walshlab.dyadic import DyadicRational, grid
from walshlab.funcrep import GridFunction2D, PiecewiseLinear1D, SeparableFunction2D
from walshlab.series import cesaro_mean, cesaro_numbers, partial_sum
from walshlab.variation import lambda_var_1, lambda_var_2, sharp_var, tail_sharp_var, v_sharp
from walshlab.walsh import STRATEGIES, check_lowest, dirichlet_at, fwht, naive_walsh_transform
from walshlab.weights import harmonic, n_over_log, ones, power


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def verdict(number: int, title: str, ok: bool, detail: str, clock: Clock, limit: float) -> None:
    in_time = clock.elapsed < limit
    passed = ok and in_time
    line = (f"{'PASS' if passed else 'FAIL'} criterion {number}: {title}; {detail}; "
            f"runtime {clock.elapsed:.2f} s (limit {limit:g} s)")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert in_time, line


def test_criterion_01_kernel_identities():
    scale = 10
    nums = np.arange(1 << scale)
    with Clock() as clock:
        mismatches = 0
        for n in range(1, 257):
            ref = dirichlet_at(n, nums, scale, "direct")
            for s in STRATEGIES:
                mismatches += int(np.count_nonzero(dirichlet_at(n, nums, scale, s) != ref))
        closed_bad = 0
        for m in range(11):
            expected = np.where(nums < (1 << (scale - m)), 1 << m, 0)
            for s in STRATEGIES:
                closed_bad += int(np.count_nonzero(dirichlet_at(1 << m, nums, scale, s) != expected))
    verdict(1, "Dirichlet strategies agree, closed form for 2^m", mismatches == 0 and closed_bad == 0,
            f"strategy mismatches {mismatches}, closed-form mismatches {closed_bad}", clock, 10)


def test_criterion_02_lowest_bound():
    with Clock() as clock:
        minima = [check_lowest(n).min_product for n in range(1, 6)]
    ok = all(m >= 1 for m in minima)
    verdict(2, "min |D_q_n(x)| 4x >= 1 on [2^(-2n-1), 1), n = 1..5", ok,
            "exact minima " + ", ".join(str(m) for m in minima), clock, 5)


def test_criterion_03_fwht():
    tol = tolerance("FWHT")
    rng = np.random.default_rng(CORPUS_SEED)
    with Clock() as clock:
        worst = worst_inv = 0.0
        for m in range(4, 13):
            V = rng.standard_normal((1 << m, 20))
            fast = fwht(V, axis=0)
            worst = max(worst, float(np.max(np.abs(fast - naive_walsh_transform(V)))))
            worst_inv = max(worst_inv, float(np.max(np.abs(fwht(fast, axis=0) * (1 << m) - V))))
    verdict(3, "FWHT against the quadratic transform, involution", worst <= tol and worst_inv <= tol,
            f"max error {worst:.2e}, involution error {worst_inv:.2e}, tolerance {tol:g}", clock, 10)


def test_criterion_04_cesaro_consistency():
    tol_f1 = tolerance("CESARO_NUMBERS")
    tol_routes = tolerance("ROUTES")
    rng = np.random.default_rng(CORPUS_SEED + 4)
    with Clock() as clock:
        rel = 0.0
        for alpha in (-0.7, -0.3, 0.5, 1.0):
            hi = cesaro_numbers(alpha, 512).values
            lo = cesaro_numbers(alpha - 1, 512, strict=False).values
            rel = max(rel, float(np.max(np.abs(np.cumsum(lo) - hi) / np.abs(hi))))
        diff = 0.0
        for _ in range(50):
            g = GridFunction2D.random(int(rng.integers(0, 6)), rng)
            n, m = (int(v) for v in rng.integers(1, 65, size=2))
            a, b = (float(v) for v in rng.choice([-0.7, -0.3, 0.5, 1.0], size=2))
            x, y = (DyadicRational(int(rng.integers(0, 64)), 6) for _ in range(2))
            lhs = cesaro_mean(g, n, m, a, b, x, y, "definition")
            rhs = cesaro_mean(g, n, m, a, b, x, y, "kernel")
            diff = max(diff, abs(lhs - rhs))
    verdict(4, "Cesaro number identity and mean routes", rel <= tol_f1 and diff <= tol_routes,
            f"identity relative error {rel:.2e} (tol {tol_f1:g}), route difference {diff:.2e} (tol {tol_routes:g})",
            clock, 60)


def test_criterion_05_variation_oracle(corpus200):
    lambdas = (ones(), harmonic(), n_over_log())
    with Clock() as clock:
        mismatches = bracket = 0
        for f in corpus200:
            S = f.cell_values
            for lam in lambdas:
                r = lam.reciprocals(S.shape[0] - 1)
                for fn, ref in ((lambda m: lambda_var_1(f, lam, m), lambda_var_line(S, r)),
                                (lambda m: lambda_var_2(f, lam, m), lambda_var_line(S.T, r)),
                                (lambda m: sharp_var(f, 1, lam, m), sharp_var_line(S, r))):
                    exact, heur = fn("exact"), fn("heuristic")
                    mismatches += exact.value != ref
                    bracket += not (heur.lower <= exact.value <= heur.upper)
            for n in range(1, 5):
                mismatches += v_sharp(f, 1, n) != v_sharp_line(S, n)
                mismatches += v_sharp(f, 2, n) != v_sharp_line(S.T, n)
    verdict(5, "exact variation equals enumeration, heuristics bracket it", mismatches == 0 and bracket == 0,
            f"{len(corpus200)} functions, exact mismatches {mismatches}, bracket violations {bracket}", clock, 120)


def test_criterion_06_partial_sum_probe():
    with Clock() as clock:
        reports = [probe_partial_sum(N) for N in range(1, 7)]
    below = [r.N for r in reports if Fraction(r.extra["I_exact"]) < harmonic_fraction(4**r.N - 1) / 8]
    fwht_err = max(abs(r.extra["S_fwht"] - r.functional_value) for r in reports if r.N <= 4)
    ratios = [r.growth_ratio for r in reports if r.N >= 2]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    tol = tolerance("IDENTITY")
    ok = not below and fwht_err <= tol and increasing
    verdict(6, "tent train against the Dirichlet kernel", ok,
            f"I_N >= H/8 fails at {below or 'none'}, coefficient cross-check error {fwht_err:.2e}, "
            f"growth ratios {', '.join(f'{x:.4f}' for x in ratios)}", clock, 60)


def test_criterion_07_cesaro_probe():
    alpha = 0.3
    tol = tolerance("IDENTITY")
    with Clock() as clock:
        reports = {N: probe_cesaro(N, alpha, alpha, cross_check=N <= 4) for N in range(2, 6)}
    J = {N: r.kernel_integrals[0] for N, r in reports.items()}
    growth = [J[N + 1] / J[N] for N in range(2, 5)]
    threshold = 2 ** (2 * alpha * 0.8)
    sigma_err = max(abs(reports[N].extra["sigma_direct"] - reports[N].functional_value) for N in range(2, 5))
    ratios = [reports[N].growth_ratio for N in range(2, 5)]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    ok = all(g >= threshold for g in growth) and sigma_err <= tol and increasing
    verdict(7, "tent train against the negative-order Cesaro kernel", ok,
            f"J ratios {', '.join(f'{g:.3f}' for g in growth)} vs {threshold:.3f}, sigma error {sigma_err:.2e}, "
            f"growth ratios {', '.join(f'{x:.4f}' for x in ratios)}", clock, 120)


def test_criterion_08_band_slopes():
    cases = [(8, 0.3), (8, 0.5), (10, 0.3)]
    with Clock() as clock:
        slopes = [(N, a, tev_band_integrals(N, a).slope) for N, a in cases]
    ok = all(s >= 0.8 * a for _, a, s in slopes)
    verdict(8, "least-squares slope of log2 band integrals >= 0.8 alpha", ok,
            ", ".join(f"(N={N}, alpha={a}): {s:.4f} vs {0.8 * a:.2f}" for N, a, s in slopes), clock, 60)


def test_criterion_09_convergence_xy():
    ident = PiecewiseLinear1D.identity()
    f = SeparableFunction2D.product(ident, ident)
    pts = grid(4)
    with Clock() as clock:
        worst = []
        for k in range(4, 9):
            n = 1 << k
            err = max(abs(partial_sum(f, n, n, x, y) - float(x) * float(y)) for x in pts for y in pts)
            worst.append((k, err, 2.0 * 2.0**-k))
    ok = all(err <= bound for _, err, bound in worst)
    verdict(9, "partial sums of xy converge at rate 2^-k", ok,
            ", ".join(f"k={k}: {err:.2e} <= {b:.2e}" for k, err, b in worst), clock, 30)


def test_criterion_10_tail_variation():
    lam = power(0.5)
    functions = grid_corpus(10, seed=CORPUS_SEED + 10)
    with Clock() as clock:
        monotone = True
        reached = 0
        worst_ratio = 0.0
        for f in functions:
            L = f.cell_values.shape[0]
            increments = L * (L - 1)
            vals = [tail_sharp_var(f, 1, lam, n).value for n in range(1, 10 * increments + 1)]
            monotone &= all(b <= a for a, b in zip(vals, vals[1:]))
            ratio = min(vals) / vals[0]
            worst_ratio = max(worst_ratio, ratio)
            reached += ratio < 0.01
    ok = monotone and reached == len(functions)
    verdict(10, "tail variation with sqrt weights falls below 1% within 10x the increments", ok,
            f"nonincreasing {monotone}, below 1% in {reached}/{len(functions)}, "
            f"worst final ratio {worst_ratio:.3f}", clock, 30)


@pytest.fixture(autouse=True, scope="module")
def _reset_lines():
    ACCEPTANCE_LINES.clear()
    yield
