from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from walshlab.counterexamples import (
    MAX_G_N,
    MAX_PHI_N,
    band_integrals,
    build_gN,
    build_hN,
    build_phi,
    cesaro_signs,
    dirichlet_signs,
    harmonic_fraction,
    probe_cesaro,
    probe_partial_sum,
    tent_integral,
    tent_integral_exact,
    tev_band_integrals,
)
from walshlab.dyadic import DyadicRational
from walshlab.funcrep import integrate_against_step
from walshlab.series import cesaro_kernel, cesaro_kernel_grid
from walshlab.walsh import dirichlet_grid, q_index
from walshlab.weights import cesaro_class, divergence_class

ZERO = DyadicRational.zero()


# ------------------------------------------------------------- builders


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_phi_area(N):
    phi = build_phi(N)
    area = integrate_against_step(phi, np.ones(1 << (2 * N)))
    assert area == ((1 << (2 * N)) - 1) * 2.0 ** (-2 * N - 1)


def test_builder_limits():
    with pytest.raises(ValueError):
        build_phi(MAX_PHI_N + 1)
    with pytest.raises(ValueError):
        build_gN(MAX_G_N + 1)
    with pytest.raises(ValueError):
        build_hN(2, 0.6, 0.5)
    with pytest.raises(ValueError):
        build_phi(0)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_gN_modulus_and_origin(N):
    g = build_gN(N)
    assert g(ZERO, ZERO) == 0.0
    phi = build_phi(N)
    signs = dirichlet_signs(N)
    res = 2 * N + 1
    mids = np.arange(1, 1 << (2 * N)) * 2 + 1
    u = g.terms[0][0].values
    nonzero = signs[1:] != 0
    assert np.array_equal(np.abs(u[mids])[nonzero], phi.values[mids][nonzero])
    assert max(g.resolutions) == res


@pytest.mark.parametrize("N", [1, 2, 3])
def test_gN_and_hN_vanish_on_cross(N):
    first = 1 << 2  # sub-samples of the first cell at two extra levels
    fine = 2 * N + 2
    for f in (build_gN(N), build_hN(N, 0.3, 0.3)):
        S = f.refined().samples()
        n = S.shape[0] - 1
        edge = n >> (2 * N)  # samples covering [0, 2^-2N]
        assert np.all(S[: edge + 1, :] == 0) and np.all(S[:, : edge + 1] == 0)
        for j in range(first):
            x = DyadicRational(j, fine)
            assert f(x, DyadicRational(5, 5)) == 0.0 and f(DyadicRational(5, 5), x) == 0.0


@pytest.mark.parametrize("N", [1, 2, 3])
def test_hN_signs_follow_kernel(N):
    alpha = 0.3
    h = build_hN(N, alpha, 0.4)
    u = h.terms[0][0].values
    mids = np.arange(1, 1 << (2 * N)) * 2 + 1
    left = [np.sign(cesaro_kernel(1 << (2 * N), -alpha, DyadicRational(j, 2 * N))) for j in range(1, 1 << (2 * N))]
    assert np.array_equal(np.sign(u[mids]), np.array(left))
    assert np.array_equal(cesaro_signs(N, alpha), np.sign(cesaro_kernel_grid(1 << (2 * N), -alpha)))
    assert h(ZERO, ZERO) == 0.0


# ----------------------------------------------------------- exactness


@pytest.mark.parametrize("N", range(1, 7))
def test_tent_integral_two_routes(N):
    d = dirichlet_grid(q_index(N), 2 * N)
    exact = tent_integral_exact(d, N)
    quad = integrate_against_step(build_phi(N), np.abs(d).astype(float))
    assert abs(float(exact) - quad) <= 1e-12 * float(exact)
    assert tent_integral(d, N) == float(exact)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_cesaro_tent_integral_two_routes(N):
    k = cesaro_kernel_grid(1 << (2 * N), -0.3)
    quad = integrate_against_step(build_phi(N), np.abs(k))
    assert abs(tent_integral(k, N) - quad) <= 1e-12 * quad


def test_tent_integral_exact_is_rational():
    d = dirichlet_grid(q_index(2), 4)
    value = tent_integral_exact(d, 2)
    assert isinstance(value, Fraction) and value.denominator <= 32


def test_band_integrals_sum_to_kernel_mass():
    k = cesaro_kernel_grid(256, -0.3)
    bands = band_integrals(k)
    assert bands.size == 8
    assert abs(bands.sum() - np.abs(k[1:]).sum() / 256) <= 1e-12


# -------------------------------------------------------------- probes


def test_partial_sum_probe_examples():
    reports = [probe_partial_sum(N) for N in range(1, 7)]
    for rep in reports:
        I_N = rep.kernel_integrals[0]
        assert Fraction(rep.extra["I_exact"]) >= harmonic_fraction(4**rep.N - 1) / 8
        assert rep.bound_check <= I_N
        assert rep.variation_lower <= rep.variation_upper
        assert rep.functional_value == I_N * I_N
    for rep in reports[1:]:
        assert rep.kernel_integrals[0] / rep.N >= 0.17
    ratios = [r.growth_ratio for r in reports[1:]]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_partial_sum_matches_coefficient_route(N):
    rep = probe_partial_sum(N)
    assert abs(rep.extra["S_fwht"] - rep.functional_value) <= 1e-8
    assert abs(rep.extra["I_quadrature"] - rep.kernel_integrals[0]) <= 1e-12


def test_partial_sum_probe_reports_clamping():
    rep = probe_partial_sum(2, divergence_class())
    js = rep.to_json()
    assert js["lambda"]["name"] == "sqrtlog"
    assert isinstance(js["lambda_clamped"], int)
    assert js["pieces"] == 2 * (4**2 - 1)


def test_cesaro_probe_examples():
    alpha = 0.3
    reports = [probe_cesaro(N, alpha, alpha) for N in range(1, 5)]
    J = [r.kernel_integrals[0] for r in reports]
    for a, b in zip(J[1:], J[2:]):
        assert b / a >= 2 ** (2 * alpha * 0.8)
    for rep in reports[:3]:
        assert abs(rep.extra["sigma_direct"] - rep.functional_value) <= 1e-8
    ratios = [r.growth_ratio for r in reports[1:]]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    for rep in reports:
        assert rep.bound_check <= rep.functional_value
        assert rep.variation_lower <= rep.variation_upper


def test_cesaro_probe_asymmetric_orders():
    rep = probe_cesaro(2, 0.2, 0.5)
    J_a, J_b = rep.kernel_integrals
    assert J_a != J_b
    assert abs(rep.extra["sigma_direct"] - J_a * J_b) <= 1e-8
    assert rep.to_json()["lambda"]["params"] == cesaro_class(0.2, 0.5).describe()["params"]


def test_cesaro_probe_parameter_errors():
    with pytest.raises(ValueError):
        probe_cesaro(2, 0.6, 0.6)
    with pytest.raises(ValueError):
        probe_cesaro(2, 0.0, 0.3)


def test_tev_bands_positive_and_stable():
    reports = [tev_band_integrals(N, 0.3) for N in (6, 8, 10)]
    for rep in reports:
        assert np.all(rep.integrals > 0)
    mins = [r.min_ratio for r in reports]
    assert max(mins) / min(mins) <= 4


@pytest.mark.parametrize("N, alpha", [(8, 0.5), (10, 0.3)])
def test_tev_slope_order(N, alpha):
    assert tev_band_integrals(N, alpha).slope >= 0.8 * alpha


def test_tev_slope_order_short_range():
    # the fit over m = 2..8 at alpha = 0.3 comes out near 0.232, just under 0.24
    assert tev_band_integrals(8, 0.3).slope >= 0.8 * 0.3


def test_tev_parameter_errors():
    with pytest.raises(ValueError):
        tev_band_integrals(8, 1.2)
    with pytest.raises(ValueError):
        tev_band_integrals(11, 0.3)
