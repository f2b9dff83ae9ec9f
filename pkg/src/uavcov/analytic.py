"""Closed-form and quadrature evaluation of downlink coverage probability.

The typical user sits at the origin under a 2D Poisson field of aerial base
stations at a common altitude, associates with the nearest one, and all
links fade independently. For Rayleigh fading the coverage probability has
a one-dimensional integral representation; at path loss exponent 4 it
collapses to a Gaussian-tail closed form. Interference enters through the
threshold-dependent factor rho(theta, n), which diverges as n -> 2 on an
infinite plane, so that regime is served by the noise-limited form or by
Monte Carlo instead of a silently regularized number.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.integrate import IntegrationWarning, quad
from scipy.special import erfc, erfcx

from .channel import DeploymentParams, EnvironmentParams, RadioParams, ple
from .errors import DivergenceError, DomainError, QuadratureError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

#: Method tags carried by CoverageEstimate.
METHOD_TAGS = (
    "exact-quadrature",
    "closed-n4",
    "no-noise",
    "noise-limited",
    "density-approx",
    "monte-carlo",
    "nakagami-semianalytic",
)


@dataclass(frozen=True)
class CoverageEstimate:
    """A coverage probability with how it was obtained and an absolute error
    estimate (quadrature bound or 95% confidence half-width)."""

    value: float
    method: str
    error_bound: float

    def __post_init__(self) -> None:
        if self.method not in METHOD_TAGS:
            raise DomainError(f"unknown method tag: {self.method!r}")
        if not (0.0 <= self.value <= 1.0):
            raise DomainError(f"coverage {self.value} outside [0, 1]")
        if self.error_bound < 0:
            raise DomainError("error_bound must be non-negative")


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive quadratures; defaults sit two orders
    below the tightest acceptance tolerance."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 10:
            raise DomainError("max_subdivisions must be at least 10")


DEFAULT_QUADRATURE = QuadratureConfig()


def _quad(f, a: float, b: float, cfg: QuadratureConfig,
          points: list[float] | None = None) -> tuple[float, float]:
    """scipy quad with the config's tolerances; non-convergence becomes a
    QuadratureError carrying the best estimate."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, err = quad(
            f, a, b,
            epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions,
            points=points if points else None,
        )
    for w in caught:
        if issubclass(w.category, IntegrationWarning):
            raise QuadratureError(str(w.message), best_estimate=value, error_bound=err)
    return value, err


def _noise_breakpoints(rate: float, scale: float, z2: float, d02: float,
                       half_n: float, upper: float) -> list[float]:
    """Subdivision seeds for the truncated u-integral of the coverage
    expressions.

    When theta*beta0 is large relative to the point-process rate the noise
    exponent confines the integrand to a sliver of [0, upper] narrower than
    the first adaptive panel, which would otherwise be missed entirely. A
    geometric ladder of panel edges from a quarter of the smallest
    characteristic u-scale (where the exponent crosses 1, and where it
    starts decaying from v = 0) up to the truncation point guarantees every
    scale gets a panel whose nodes actually sample it: the integrand's
    relative decay length is never below ~1/(half_n * exponent_at_death),
    far wider than the leftmost Gauss-Kronrod node offset of a
    doubling panel.
    """
    if scale <= 0.0:
        return []
    scales = []
    v_on = d02 * scale ** (-1.0 / half_n) - z2
    if v_on > 0.0:
        scales.append(rate * v_on)
    if z2 > 0.0:
        v_dec = d02 ** half_n / (scale * half_n * z2 ** (half_n - 1.0))
        scales.append(rate * v_dec)
    if not scales:
        return []
    # below 2^-60 of the range the bracketed mass is itself negligible
    u = max(0.25 * min(scales), upper * 2.0 ** -60)
    pts = []
    while u < upper:
        pts.append(u)
        u *= 2.0
    return pts


def q_function(x: float) -> float:
    """Standard normal tail probability Q(x) = erfc(x / sqrt(2)) / 2."""
    return 0.5 * erfc(x / _SQRT2)


def q_function_scaled(x: float) -> float:
    """exp(x^2/2) * Q(x), evaluated fused through the scaled complementary
    error function so it stays finite where exp(x^2/2) alone overflows."""
    return 0.5 * erfcx(x / _SQRT2)


def q_approx(x: float) -> float:
    """Large-argument approximation exp(-x^2/2) / (sqrt(2*pi) * sqrt(1+x^2)).

    Intended for x >= 0; at x = 0 it returns 0.399 against the true 0.5, so
    it is only used where the design formulas call for it.
    """
    return math.exp(-0.5 * x * x) * _INV_SQRT_2PI / math.sqrt(1.0 + x * x)


def rho(theta: float, n: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Interference factor rho(theta, n) = theta^(2/n) * I, where I is the
    tail integral of 1 / (1 + x^(n/2)) from theta^(-2/n) to infinity.

    The tail is mapped to a finite interval by x -> 1/t; combining that with
    t = u^(1/(n/2-1)) removes the endpoint singularity for every n > 2, so
    the adaptive quadrature sees a smooth integrand:

        rho = theta^(2/n) / (n/2 - 1) * int_0^T du / (1 + u^q),
        T = theta^((n-2)/n),  q = (n/2) / (n/2 - 1).

    Diverges as n -> 2 (the mean interference of an unbounded plane).
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    if n <= 2:
        raise DivergenceError(
            "interference factor diverges for path loss exponent <= 2; "
            "use the noise-limited form or Monte Carlo over a finite window"
        )
    p = 0.5 * n - 1.0
    q = (0.5 * n) / p
    upper = theta ** (p * 2.0 / n)
    value, _err = _quad(lambda u: 1.0 / (1.0 + u ** q), 0.0, upper, cfg)
    return theta ** (2.0 / n) / p * value


def rho_closed_n4(theta: float) -> float:
    """Closed form of rho at n = 4: sqrt(theta) * (pi/2 - arctan(1/sqrt(theta)))."""
    if theta <= 0:
        raise DomainError("theta must be positive")
    rt = math.sqrt(theta)
    return rt * (0.5 * math.pi - math.atan(1.0 / rt))


def laplace_interference(
    theta: float,
    r: float,
    z: float,
    density: float,
    n: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Laplace transform of the interference seen past the serving link,
    evaluated at the serving link's effective point theta * (d/d0)^n with
    d = sqrt(r^2 + z^2): equals exp(-density * pi * d^2 * rho(theta, n)).

    The reference-distance factors cancel, which is why theta enters
    directly rather than through the effective argument.
    """
    if r < 0 or z < 0:
        raise DomainError("distances must be non-negative")
    if density <= 0:
        raise DomainError("density must be positive")
    d2 = r * r + z * z
    return math.exp(-density * math.pi * d2 * rho(theta, n, cfg))


def _require_rayleigh(radio: RadioParams, what: str) -> None:
    if radio.fading.kind != "rayleigh":
        raise DomainError(f"{what} is a Rayleigh-fading formula; "
                          f"got fading kind {radio.fading.kind!r}")


def _exponent_n(dep: DeploymentParams, env: EnvironmentParams | None, n: float | None) -> float:
    if n is not None:
        return float(n)
    if env is None:
        raise DomainError("provide either env (for the height-PLE fit) or an explicit n")
    return ple(dep.z, env)


def coverage_rayleigh(
    dep: DeploymentParams,
    radio: RadioParams,
    env: EnvironmentParams,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    n: float | None = None,
) -> CoverageEstimate:
    """Exact coverage probability under Rayleigh fading for any n > 2.

    P = density*pi * exp(-density*pi*rho*z^2)
        * int_0^inf exp(-density*pi*(1+rho)*v - theta*beta0*((v+z^2)/d0^2)^(n/2)) dv

    with rho = rho(theta, n). n defaults to the height-PLE fit at dep.z;
    pass n explicitly for fixed-exponent studies. The integral is computed
    after substituting u = density*pi*(1+rho)*v, truncated at
    U = -ln(abs_tol) so the discarded tail is below exp(-U); the tail bound
    is added to the error bound.

    Raises DivergenceError when the PLE is at the floor of 2 (interference
    diverges on the infinite plane); the noise-limited form or Monte Carlo
    cover that regime.
    """
    _require_rayleigh(radio, "coverage_rayleigh")
    exponent = _exponent_n(dep, env, n)
    if exponent <= 2:
        hint = ("coverage_noise_limited applies when noise dominates"
                if radio.beta0 > 0 else "only Monte Carlo over a finite window applies")
        raise DivergenceError(
            f"interference integral diverges at path loss exponent {exponent}; {hint}"
        )
    d0 = env.d0
    lam, zz = dep.density, dep.z
    theta, beta0 = radio.theta, radio.beta0
    r = rho(theta, exponent, cfg)
    rate = lam * math.pi * (1.0 + r)
    scale = theta * beta0
    z2, d02 = zz * zz, d0 * d0

    def integrand(u: float) -> float:
        v = u / rate
        return math.exp(-u - scale * ((v + z2) / d02) ** (0.5 * exponent))

    upper = -math.log(cfg.abs_tol)
    pts = _noise_breakpoints(rate, scale, z2, d02, 0.5 * exponent, upper)
    value, err = _quad(integrand, 0.0, upper, cfg, points=pts)
    prefactor = math.exp(-lam * math.pi * r * z2) / (1.0 + r)
    cov = prefactor * value
    bound = prefactor * (err + math.exp(-upper))
    return CoverageEstimate(min(max(cov, 0.0), 1.0), "exact-quadrature", bound)


def coverage_rayleigh_n4_closed(
    dep: DeploymentParams,
    radio: RadioParams,
    env: EnvironmentParams,
) -> CoverageEstimate:
    """Closed form of coverage_rayleigh at n = 4 (taken by contract, not
    from the height-PLE fit), for beta0 > 0.

    Written out longhand,

        P = (density * pi^(3/2) * d0^2 / sqrt(theta*beta0))
            * exp(kappa^2/2 + density*pi*z^2) * Q(kappa + s),
        kappa = density*pi*(1+rho)*d0^2 / sqrt(2*theta*beta0),
        s = (z^2/d0^2) * sqrt(2*theta*beta0),

    the product exp(kappa^2/2) * Q(kappa + s) is evaluated fused through
    erfcx. Using kappa*s = density*pi*(1+rho)*z^2 the whole expression
    reduces to non-positive exponents only:

        P = prefactor/2 * erfcx((kappa+s)/sqrt(2))
            * exp(-density*pi*rho*z^2 - theta*beta0*z^4/d0^4),

    finite for arbitrarily large kappa.
    """
    _require_rayleigh(radio, "coverage_rayleigh_n4_closed")
    if radio.beta0 <= 0:
        raise DomainError("closed form needs beta0 > 0; use coverage_no_noise at beta0 = 0")
    lam, zz, d0 = dep.density, dep.z, env.d0
    theta, beta0 = radio.theta, radio.beta0
    r = rho_closed_n4(theta)
    d02 = d0 * d0
    s2tb = math.sqrt(2.0 * theta * beta0)
    kappa = lam * math.pi * (1.0 + r) * d02 / s2tb
    shift = (zz * zz / d02) * s2tb
    prefactor = lam * math.pi ** 1.5 * d02 / (2.0 * math.sqrt(theta * beta0))
    damp = math.exp(-lam * math.pi * r * zz * zz - theta * beta0 * (zz / d0) ** 4)
    value = prefactor * erfcx((kappa + shift) / _SQRT2) * damp
    # exact formula; the bound covers floating-point evaluation only
    bound = 1e-13 * max(1.0, value)
    return CoverageEstimate(min(max(value, 0.0), 1.0), "closed-n4", bound)


def coverage_no_noise(
    dep: DeploymentParams,
    radio: RadioParams,
    env: EnvironmentParams | None = None,
    *,
    n: float | None = None,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> CoverageEstimate:
    """Interference-only limit exp(-density*pi*rho*z^2) / (1 + rho).

    Pass env to take n from the height-PLE fit or an explicit n (required
    for z = 0, where the fit is undefined); exactly one of the two.
    """
    _require_rayleigh(radio, "coverage_no_noise")
    if env is not None and n is not None:
        raise DomainError("pass either env or n, not both")
    exponent = _exponent_n(dep, env, n)
    if exponent <= 2:
        raise DivergenceError(
            "no-noise coverage needs n > 2; interference diverges otherwise"
        )
    r = rho(radio.theta, exponent, cfg)
    value = math.exp(-dep.density * math.pi * r * dep.z * dep.z) / (1.0 + r)
    # propagate the rho tolerance through both factors
    drho = cfg.rel_tol * r + cfg.abs_tol
    bound = value * (dep.density * math.pi * dep.z * dep.z + 1.0 / (1.0 + r)) * drho
    return CoverageEstimate(min(max(value, 0.0), 1.0), "no-noise", bound)


def coverage_noise_limited(
    dep: DeploymentParams,
    radio: RadioParams,
    env: EnvironmentParams,
    *,
    n: float | None = None,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> CoverageEstimate:
    """Coverage with interference neglected (rho forced to 0), valid for all
    n >= 2 and beta0 > 0:

        P = density*pi * int_0^inf exp(-density*pi*v
                                       - theta*beta0*((v+z^2)/d0^2)^(n/2)) dv.

    This is the only analytic route at the PLE floor n = 2, where the
    interference integral diverges.
    """
    _require_rayleigh(radio, "coverage_noise_limited")
    if radio.beta0 <= 0:
        raise DomainError("noise-limited form needs beta0 > 0")
    exponent = _exponent_n(dep, env, n)
    if exponent < 2:
        raise DomainError("path loss exponent below 2 is outside the model")
    d0 = env.d0
    lam, zz = dep.density, dep.z
    scale = radio.theta * radio.beta0
    rate = lam * math.pi
    z2, d02 = zz * zz, d0 * d0

    def integrand(u: float) -> float:
        v = u / rate
        return math.exp(-u - scale * ((v + z2) / d02) ** (0.5 * exponent))

    upper = -math.log(cfg.abs_tol)
    pts = _noise_breakpoints(rate, scale, z2, d02, 0.5 * exponent, upper)
    value, err = _quad(integrand, 0.0, upper, cfg, points=pts)
    bound = err + math.exp(-upper)
    return CoverageEstimate(min(max(value, 0.0), 1.0), "noise-limited", bound)
