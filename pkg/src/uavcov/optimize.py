"""Design solvers: coverage-optimal UAV density and altitude.

The density solver exists in two forms. The closed route maximizes the
Q-function approximation of the n = 4 coverage expression, whose
stationarity condition is the cubic B*C*x^3 + C*x - 1 = 0 with exactly one
positive root; a bracketing root-finder is the ground truth and both
printed Cardano radicand variants are cross-checked against it (they
disagree in the literature; see cardano_radicand_roots). The numeric route
maximizes the exact n = 4 closed form directly.

The altitude solver scans a grid first because the path loss exponent's
floor at 2 puts a kink (and, for the exact interference model, a jump) in
the objective, then refines by golden section. Where the interference
integral diverges (the floor region) it routes to the noise-limited form
when noise dominates and to Monte Carlo otherwise.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .analytic import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    coverage_noise_limited,
    coverage_rayleigh,
    coverage_rayleigh_n4_closed,
)
from .channel import DeploymentParams, EnvironmentParams, RadioParams, ple
from .errors import DivergenceError, DomainError, QuadratureError
from .montecarlo import McConfig, auto_region_radius, simulate_coverage

logger = logging.getLogger(__name__)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

#: The noise-limited analytic route is trusted where the mean windowed
#: interference seen from the median serving distance is at most this
#: fraction of the noise level.
NOISE_DOMINANCE_RATIO = 0.25


@dataclass(frozen=True)
class DensityCoeffs:
    """Coefficients of the approximate coverage-vs-density curve
    A * x * exp(-C*x) / sqrt(1 + B*x^2); A scales the value only and drops
    out of the argmax."""

    coef_A: float
    coef_B: float
    coef_C: float

    def __post_init__(self) -> None:
        if self.coef_A <= 0 or self.coef_B <= 0:
            raise DomainError("coef_A and coef_B must be positive")
        if self.coef_C < 0:
            raise DomainError("coef_C must be non-negative")


@dataclass(frozen=True)
class ApproxCoverage:
    """Raw value of the density approximation; valid means it landed inside
    the probability range (the approximation may exceed 1 outside its
    regime, and is deliberately not clamped)."""

    value: float
    valid: bool


@dataclass(frozen=True)
class Optimum:
    """Result of a scalar maximization: the argument (meters or per-m2
    density), the objective value there, and which solver produced it."""

    argument: float
    value: float
    method: str

    def __post_init__(self) -> None:
        if self.method not in ("cubic-closed", "golden-section", "grid"):
            raise DomainError(f"unknown optimizer method tag: {self.method!r}")
        if not (0.0 <= self.value <= 1.0):
            raise DomainError(f"optimum value {self.value} outside [0, 1]")
        if not math.isfinite(self.argument):
            raise DomainError("optimum argument must be finite")


def density_coeffs(z: float, theta: float, beta0: float, d0: float, rho: float) -> DensityCoeffs:
    """Coefficients of the approximate coverage-vs-density curve at n = 4:

        A = d0^2/sqrt(2*theta*beta0) * exp(-theta*beta0*z^4/d0^4)
        B = pi^2*(1+rho)^2*d0^4 / (2*theta*beta0)
        C = pi*rho*z^2

    rho is the caller's interference factor (rho_closed_n4(theta) in the
    n = 4 regime these coefficients model).
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    if beta0 <= 0:
        raise DomainError("the density approximation is undefined at beta0 = 0")
    if d0 <= 0:
        raise DomainError("d0 must be positive")
    if rho < 0:
        raise DomainError("rho must be non-negative")
    if z < 0:
        raise DomainError("altitude must be non-negative")
    tb2 = 2.0 * theta * beta0
    d02 = d0 * d0
    a = d02 / math.sqrt(tb2) * math.exp(-theta * beta0 * (z / d0) ** 4)
    b = math.pi * math.pi * (1.0 + rho) ** 2 * d02 * d02 / tb2
    c = math.pi * rho * z * z
    return DensityCoeffs(a, b, c)


def coverage_density_approx(density: float, coeffs: DensityCoeffs) -> ApproxCoverage:
    """Approximate coverage A*x*exp(-C*x)/sqrt(1+B*x^2) at density x.

    Unimodal on (0, inf) with a single interior maximum; reported raw, with
    valid flagging whether it stayed within [0, 1].
    """
    if density <= 0:
        raise DomainError("density must be positive")
    x = density
    value = coeffs.coef_A * x * math.exp(-coeffs.coef_C * x) / math.sqrt(
        1.0 + coeffs.coef_B * x * x
    )
    return ApproxCoverage(value=value, valid=value <= 1.0 + 1e-12)


def cardano_radicand_roots(coeffs: DensityCoeffs) -> dict[str, float]:
    """Both closed-form candidates for the positive root of
    B*C*x^3 + C*x - 1 = 0, i.e. x^3 + p*x + q = 0 with p = 1/B, q = -1/(B*C).

    Standard Cardano has radicand q^2/4 + p^3/27 = 1/(4B^2C^2) + 1/(27B^3);
    a published variant prints 1/(8B^3) in place of the 27 term. Both are
    evaluated so the bracketing ground truth can report which one is right;
    the discrepancy is logged by optimal_density_closed, never silently
    resolved.
    """
    b, c = coeffs.coef_B, coeffs.coef_C
    half_q = 1.0 / (2.0 * b * c)
    base = 1.0 / (4.0 * b * b * c * c)
    out = {}
    for name, denom in (("standard_27", 27.0), ("printed_8", 8.0)):
        rad = base + 1.0 / (denom * b ** 3)
        s = math.sqrt(rad)
        out[name] = float(np.cbrt(half_q + s) + np.cbrt(half_q - s))
    return out


def optimal_density_closed(coeffs: DensityCoeffs) -> Optimum:
    """Density maximizing the approximate coverage curve: the unique
    positive root of B*C*x^3 + C*x - 1 = 0.

    Bracketed on (0, 1/C] (the cubic is -1 at 0 and B/C^2 > 0 at 1/C) and
    solved to 1e-12 relative precision. The two Cardano radicand variants
    are evaluated and compared against this root; the comparison outcome is
    logged at INFO level.
    """
    b, c = coeffs.coef_B, coeffs.coef_C
    if c <= 0:
        raise DomainError("closed-form optimum needs coef_C > 0 (nonzero altitude)")

    def cubic(x: float) -> float:
        return b * c * x ** 3 + c * x - 1.0

    root = float(brentq(cubic, 0.0, 1.0 / c, xtol=1e-300, rtol=1e-12))
    variants = cardano_radicand_roots(coeffs)
    verdicts = {
        name: abs(val - root) <= 1e-9 * root for name, val in variants.items()
    }
    logger.info(
        "cubic stationarity root %.15e; Cardano radicand variants: "
        "standard_27=%.15e (%s), printed_8=%.15e (%s)",
        root,
        variants["standard_27"], "match" if verdicts["standard_27"] else "MISMATCH",
        variants["printed_8"], "match" if verdicts["printed_8"] else "MISMATCH",
    )
    approx = coverage_density_approx(root, coeffs)
    if not approx.valid:
        raise DomainError(
            "approximate coverage exceeds 1 at the stationary point; "
            "coefficients are outside the approximation's validity regime"
        )
    return Optimum(argument=root, value=approx.value, method="cubic-closed")


def _golden_max(f, a: float, b: float, xatol: float):
    """Golden-section maximization of f on [a, b] to the given interval
    tolerance; returns (argmax, value)."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xatol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    mid = 0.5 * (a + b)
    return mid, f(mid)


def _local_maxima_count(values: np.ndarray) -> int:
    v = np.asarray(values)
    count = 0
    for i in range(len(v)):
        left = v[i - 1] if i > 0 else -math.inf
        right = v[i + 1] if i + 1 < len(v) else -math.inf
        if v[i] > left and v[i] > right:
            count += 1
    return count


def optimal_density_numeric(
    dep_template: DeploymentParams,
    radio: RadioParams,
    env: EnvironmentParams,
    bounds: tuple[float, float],
) -> Optimum:
    """Density maximizing the exact n = 4 closed-form coverage, by a coarse
    log-spaced scan followed by golden section in log density, refined to
    1e-4 relative. If the scan sees more than one local maximum the solver
    falls back to a dense 1000-point grid and flags it with a warning."""
    lo, hi = bounds
    if not (0.0 < lo < hi):
        raise DomainError("density bounds must satisfy 0 < lo < hi")

    def cov(lam: float) -> float:
        return coverage_rayleigh_n4_closed(replace(dep_template, density=lam), radio, env).value

    ts = np.linspace(math.log(lo), math.log(hi), 64)
    vals = np.array([cov(math.exp(t)) for t in ts])
    if _local_maxima_count(vals) > 1:
        warnings.warn(
            "coverage is not unimodal over the density bounds; "
            "falling back to a dense grid",
            RuntimeWarning,
        )
        tg = np.linspace(math.log(lo), math.log(hi), 1000)
        vg = np.array([cov(math.exp(t)) for t in tg])
        i = int(np.argmax(vg))
        return Optimum(argument=math.exp(tg[i]), value=float(vg[i]), method="grid")
    i = int(np.argmax(vals))
    a = ts[max(i - 1, 0)]
    b = ts[min(i + 1, len(ts) - 1)]
    t_best, v_best = _golden_max(lambda t: cov(math.exp(t)), a, b, xatol=1e-4)
    return Optimum(argument=math.exp(t_best), value=float(v_best), method="golden-section")


def _median_window_interference(
    density: float, z: float, n: float, d0: float, radius: float
) -> float:
    """Mean fading-averaged interference from PPP points between the median
    nearest-point distance and the window radius, at altitude z."""
    r2_med = math.log(2.0) / (density * math.pi)
    d02 = d0 * d0
    lo = (r2_med + z * z) / d02
    hi = (radius * radius + z * z) / d02
    if n == 2.0:
        return density * math.pi * d02 * math.log(hi / lo)
    p = 0.5 * n - 1.0
    return density * math.pi * d02 / p * (lo ** (-p) - hi ** (-p))


def _height_bounds(
    dep_template: DeploymentParams, bounds: tuple[float, float] | None
) -> tuple[float, float]:
    lo, hi = bounds if bounds is not None else (dep_template.l_min, dep_template.l_max)
    if lo < 20.0:
        raise DomainError("height search is limited to altitudes >= 20 m "
                          "(validity floor of the terrain PLE fit)")
    if lo > hi:
        raise DomainError("need l_min <= l_max")
    return float(lo), float(hi)


def height_objective_fn(
    dep_template: DeploymentParams,
    radio: RadioParams,
    env: EnvironmentParams,
    evaluator: str = "analytic",
    bounds: tuple[float, float] | None = None,
    mc: McConfig | None = None,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
):
    """Coverage-as-a-function-of-altitude callable with the routing and the
    fixed simulation window that optimal_height uses; exposed so curve
    emission and the solver see the exact same objective.

    The analytic evaluator uses the exact Rayleigh expression wherever the
    interference factor is finite; in the exponent-floor region it neglects
    interference only when the mean windowed interference from the median
    serving distance is at most NOISE_DOMINANCE_RATIO of the noise level,
    and simulates otherwise. The "mc" evaluator simulates every point with
    a window radius fixed across the scan and a common seed, so the curve
    is smooth in z and the argmax is stable.
    """
    if evaluator not in ("analytic", "mc"):
        raise DomainError("evaluator must be 'analytic' or 'mc'")
    lo, hi = _height_bounds(dep_template, bounds)
    mc = mc if mc is not None else McConfig(trials=20_000, seed=0)
    # one window for the whole scan, sized for its highest altitude
    radius = auto_region_radius(replace(dep_template, z=hi, l_max=max(hi, dep_template.l_max)), env)
    mc_fixed = McConfig(
        trials=mc.trials,
        seed=mc.seed,
        region_radius_policy="explicit",
        region_radius=radius,
        confidence_level=mc.confidence_level,
    )

    def dep_at(z: float) -> DeploymentParams:
        return DeploymentParams(
            density=dep_template.density,
            z=z,
            l_min=min(dep_template.l_min, z),
            l_max=max(dep_template.l_max, z),
        )

    def eval_z(z: float) -> float:
        d = dep_at(z)
        if evaluator == "mc":
            return simulate_coverage(d, radio, env, mc_fixed).estimate
        n = ple(z, env)
        if n > 2.0:
            try:
                return coverage_rayleigh(d, radio, env, cfg).value
            except (DivergenceError, QuadratureError):
                pass
        if radio.beta0 > 0:
            mean_intf = _median_window_interference(d.density, z, n, env.d0, radius)
            if mean_intf <= NOISE_DOMINANCE_RATIO * radio.beta0:
                return coverage_noise_limited(d, radio, env, cfg=cfg).value
        return simulate_coverage(d, radio, env, mc_fixed).estimate

    return eval_z


def optimal_height(
    dep_template: DeploymentParams,
    radio: RadioParams,
    env: EnvironmentParams,
    evaluator: str = "analytic",
    bounds: tuple[float, float] | None = None,
    mc: McConfig | None = None,
    grid_step: float = 5.0,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> Optimum:
    """Altitude maximizing coverage over [l_min, l_max] under the
    height-dependent path loss exponent.

    A grid scan (default 5 m) locates the best cell before golden-section
    refinement, because the exponent floor at 2 puts a kink (and, for the
    exact interference model, a jump) in the objective that a pure
    bracketing search could mis-handle. Evaluator routing is described on
    height_objective_fn.
    """
    lo, hi = _height_bounds(dep_template, bounds)
    eval_z = height_objective_fn(dep_template, radio, env, evaluator, (lo, hi), mc, cfg)

    if lo == hi:
        return Optimum(argument=lo, value=eval_z(lo), method="grid")

    zs = list(np.arange(lo, hi, grid_step))
    zs.append(hi)
    vals = [eval_z(z) for z in zs]
    i = int(np.argmax(vals))
    a = zs[max(i - 1, 0)]
    b = zs[min(i + 1, len(zs) - 1)]
    z_best, v_best = _golden_max(eval_z, a, b, xatol=1e-3)
    if vals[i] > v_best:
        z_best, v_best = zs[i], vals[i]
    return Optimum(argument=float(z_best), value=float(v_best), method="golden-section")
