import logging
import math

import numpy as np
import pytest
from scipy.integrate import quad

from uavcov import (
    DensityCoeffs,
    DeploymentParams,
    DomainError,
    EnvironmentParams,
    McConfig,
    Optimum,
    RadioParams,
    cardano_radicand_roots,
    coverage_density_approx,
    coverage_rayleigh,
    density_coeffs,
    height_objective_fn,
    optimal_density_closed,
    optimal_density_numeric,
    optimal_height,
    rho_closed_n4,
)
from uavcov.optimize import _local_maxima_count, _median_window_interference

ENV = EnvironmentParams(4.6, 0.0075, 12.6, d0=100.0)

# Frozen from a 50-digit evaluation of the defining expressions at
# z=100, theta=0.1, beta0=1e-3, d0=100, rho = sqrt(theta)*atan(sqrt(theta)).
COEFF_RHO = 0.09685340823403892
COEFF_A = 707036.07404384493
COEFF_B = 5936998344795.8295
COEFF_C = 3042.7395578318988

# Positive root of x^3 + x - 1 = 0, and the value the misprinted radicand
# variant produces for the same unit coefficients.
UNIT_ROOT = 0.68232780382801933
UNIT_PRINTED_8 = 0.55357378221766643


def reference_coeffs():
    return density_coeffs(
        z=100.0, theta=0.1, beta0=1e-3, d0=100.0, rho=rho_closed_n4(0.1)
    )


def test_density_coeffs_reference_values():
    assert rho_closed_n4(0.1) == pytest.approx(COEFF_RHO, rel=1e-14)
    co = reference_coeffs()
    assert co.coef_A == pytest.approx(COEFF_A, rel=1e-13)
    assert co.coef_B == pytest.approx(COEFF_B, rel=1e-13)
    assert co.coef_C == pytest.approx(COEFF_C, rel=1e-13)


def test_density_coeffs_validation():
    for bad in (
        dict(z=100.0, theta=0.0, beta0=1e-3, d0=100.0, rho=0.1),
        dict(z=100.0, theta=0.1, beta0=0.0, d0=100.0, rho=0.1),
        dict(z=100.0, theta=0.1, beta0=1e-3, d0=0.0, rho=0.1),
        dict(z=100.0, theta=0.1, beta0=1e-3, d0=100.0, rho=-0.1),
        dict(z=-1.0, theta=0.1, beta0=1e-3, d0=100.0, rho=0.1),
    ):
        with pytest.raises(DomainError):
            density_coeffs(**bad)
    with pytest.raises(DomainError):
        DensityCoeffs(coef_A=0.0, coef_B=1.0, coef_C=1.0)
    with pytest.raises(DomainError):
        DensityCoeffs(coef_A=1.0, coef_B=-1.0, coef_C=1.0)
    with pytest.raises(DomainError):
        DensityCoeffs(coef_A=1.0, coef_B=1.0, coef_C=-1.0)


def test_density_approx_value_and_validity():
    co = DensityCoeffs(coef_A=1.0, coef_B=1.0, coef_C=1.0)
    x = 0.5
    expected = x * math.exp(-x) / math.sqrt(1.0 + x * x)
    got = coverage_density_approx(x, co)
    assert got.value == pytest.approx(expected, rel=1e-15)
    assert got.valid
    # the approximation is reported raw, not clamped
    big = coverage_density_approx(0.5, DensityCoeffs(1e6, 1.0, 1.0))
    assert big.value > 1.0
    assert not big.valid
    with pytest.raises(DomainError):
        coverage_density_approx(0.0, co)


def test_closed_density_unit_cubic_root():
    co = DensityCoeffs(coef_A=1.0, coef_B=1.0, coef_C=1.0)
    opt = optimal_density_closed(co)
    assert opt.method == "cubic-closed"
    assert opt.argument == pytest.approx(UNIT_ROOT, rel=1e-12)
    assert opt.value == pytest.approx(
        coverage_density_approx(opt.argument, co).value, rel=1e-15
    )


def test_closed_density_residual_over_coefficient_grid():
    rng = np.random.default_rng(3)
    for _ in range(60):
        b = 10.0 ** rng.uniform(-3.0, 8.0)
        c = 10.0 ** rng.uniform(-3.0, 4.0)
        co = DensityCoeffs(coef_A=1e-30, coef_B=b, coef_C=c)
        opt = optimal_density_closed(co)
        assert 0.0 < opt.argument < 1.0 / c
        # both cubic terms are at most 1 at the root, so absolute residual
        # is the right scale
        residual = b * c * opt.argument**3 + c * opt.argument - 1.0
        assert abs(residual) < 1e-10


def test_cardano_variants_against_bracketed_root(caplog):
    # well-conditioned coefficient range; the misprinted variant is checked
    # at the unit point where both radicands are exactly representable
    rng = np.random.default_rng(4)
    for _ in range(40):
        b = 10.0 ** rng.uniform(-2.0, 2.0)
        c = 10.0 ** rng.uniform(-2.0, 2.0)
        co = DensityCoeffs(coef_A=1e-30, coef_B=b, coef_C=c)
        root = optimal_density_closed(co).argument
        variants = cardano_radicand_roots(co)
        assert variants["standard_27"] == pytest.approx(root, rel=1e-9)

    unit = DensityCoeffs(coef_A=1.0, coef_B=1.0, coef_C=1.0)
    variants = cardano_radicand_roots(unit)
    assert variants["printed_8"] == pytest.approx(UNIT_PRINTED_8, rel=1e-9)
    assert abs(variants["printed_8"] - UNIT_ROOT) / UNIT_ROOT > 1e-3

    with caplog.at_level(logging.INFO, logger="uavcov.optimize"):
        optimal_density_closed(unit)
    joined = " ".join(r.getMessage() for r in caplog.records)
    assert "standard_27" in joined and "printed_8" in joined
    assert "MISMATCH" in joined


def test_closed_density_scale_invariance():
    co1 = DensityCoeffs(coef_A=1e-6, coef_B=50.0, coef_C=3.0)
    co2 = DensityCoeffs(coef_A=1e-5, coef_B=50.0, coef_C=3.0)
    o1 = optimal_density_closed(co1)
    o2 = optimal_density_closed(co2)
    assert o1.argument == o2.argument
    assert o2.value == pytest.approx(10.0 * o1.value, rel=1e-12)


def test_closed_density_rejects_zero_c_and_invalid_regime():
    with pytest.raises(DomainError):
        optimal_density_closed(DensityCoeffs(coef_A=1.0, coef_B=1.0, coef_C=0.0))
    # huge A pushes the approximation past 1 at its own stationary point
    with pytest.raises(DomainError):
        optimal_density_closed(DensityCoeffs(coef_A=1e9, coef_B=1.0, coef_C=1.0))


def test_closed_density_reference_coefficients():
    co = reference_coeffs()
    opt = optimal_density_closed(co)
    assert 0.0 < opt.argument < 1.0 / co.coef_C
    residual = co.coef_B * co.coef_C * opt.argument**3 + co.coef_C * opt.argument - 1.0
    assert abs(residual) < 1e-10
    assert 0.0 < opt.value <= 1.0


def test_numeric_density_matches_dense_grid():
    dep = DeploymentParams(1e-6, 100.0)
    radio = RadioParams(theta=0.1, beta0=1e-3)
    bounds = (1e-8, 1e-4)
    opt = optimal_density_numeric(dep, radio, ENV, bounds)
    assert opt.method == "golden-section"

    lams = np.geomspace(bounds[0], bounds[1], 4000)
    from uavcov import coverage_rayleigh_n4_closed
    from dataclasses import replace

    vals = [coverage_rayleigh_n4_closed(replace(dep, density=l), radio, ENV).value
            for l in lams]
    i = int(np.argmax(vals))
    assert abs(math.log(opt.argument) - math.log(lams[i])) < 2e-3
    assert opt.value >= vals[i] - 1e-9


def test_numeric_density_bounds_validation():
    dep = DeploymentParams(1e-6, 100.0)
    radio = RadioParams(theta=0.1, beta0=1e-3)
    with pytest.raises(DomainError):
        optimal_density_numeric(dep, radio, ENV, (1e-4, 1e-8))
    with pytest.raises(DomainError):
        optimal_density_numeric(dep, radio, ENV, (0.0, 1e-4))


def test_local_maxima_count():
    assert _local_maxima_count(np.array([0.0, 1.0, 0.0])) == 1
    assert _local_maxima_count(np.array([1.0, 0.0, 1.0])) == 2
    assert _local_maxima_count(np.array([1.0, 2.0, 3.0])) == 1
    assert _local_maxima_count(np.array([1.0, 1.0, 1.0])) == 0


def test_median_window_interference_matches_quadrature():
    lam, z, d0, radius = 2e-6, 120.0, 100.0, 4000.0
    r_med = math.sqrt(math.log(2.0) / (lam * math.pi))
    for n in (2.0, 3.5, 4.0):
        def integrand(r):
            return lam * 2.0 * math.pi * r * ((r * r + z * z) / (d0 * d0)) ** (-0.5 * n)

        expected, _ = quad(integrand, r_med, radius)
        got = _median_window_interference(lam, z, n, d0, radius)
        assert got == pytest.approx(expected, rel=1e-10)


def test_optimum_validation():
    with pytest.raises(DomainError):
        Optimum(argument=1.0, value=0.5, method="newton")
    with pytest.raises(DomainError):
        Optimum(argument=1.0, value=1.5, method="grid")
    with pytest.raises(DomainError):
        Optimum(argument=math.inf, value=0.5, method="grid")


def test_height_bounds_validation():
    dep = DeploymentParams(1e-6, 100.0)
    radio = RadioParams(theta=1.0, beta0=1e-2)
    with pytest.raises(DomainError):
        optimal_height(dep, radio, ENV, bounds=(5.0, 100.0))
    with pytest.raises(DomainError):
        optimal_height(dep, radio, ENV, bounds=(300.0, 100.0))
    with pytest.raises(DomainError):
        height_objective_fn(dep, radio, ENV, evaluator="bisect")


def test_height_degenerate_bounds():
    dep = DeploymentParams(1e-6, 100.0)
    radio = RadioParams(theta=1.0, beta0=1e-2)
    opt = optimal_height(dep, radio, ENV, bounds=(50.0, 50.0))
    assert opt.method == "grid"
    assert opt.argument == 50.0
    assert opt.value == pytest.approx(
        coverage_rayleigh(DeploymentParams(1e-6, 50.0), radio, ENV).value, rel=1e-12
    )


def test_height_interior_optimum():
    # low threshold, noise at the signal scale: the optimum sits where the
    # exponent fit reaches its floor, strictly inside the search interval
    dep = DeploymentParams(1e-6, 100.0)
    radio = RadioParams(theta=10.0 ** -1.5, beta0=1.0)
    opt = optimal_height(dep, radio, ENV)
    assert opt.method == "golden-section"
    assert 330.0 < opt.argument < 375.0
    assert 0.0 < opt.value < 1.0
    # not a boundary solution
    assert opt.argument > dep.l_min + 1.0
    assert opt.argument < dep.l_max - 1.0


def test_height_objective_matches_exact_coverage():
    dep = DeploymentParams(1e-6, 100.0)
    radio = RadioParams(theta=1.0, beta0=1e-2)
    f = height_objective_fn(dep, radio, ENV)
    direct = coverage_rayleigh(DeploymentParams(1e-6, 150.0), radio, ENV).value
    assert f(150.0) == pytest.approx(direct, rel=1e-12)


def test_height_mc_evaluator_deterministic():
    dep = DeploymentParams(1e-6, 100.0)
    radio = RadioParams(theta=1.0, beta0=1e-2)
    mc = McConfig(trials=2000, seed=5)
    kwargs = dict(evaluator="mc", bounds=(20.0, 170.0), mc=mc, grid_step=75.0)
    o1 = optimal_height(dep, radio, ENV, **kwargs)
    o2 = optimal_height(dep, radio, ENV, **kwargs)
    assert o1 == o2
    assert 20.0 <= o1.argument <= 170.0
