"""Air-to-ground channel primitives.

Height-dependent path loss exponent (SUI-style terrain fit with a floor of
2), deterministic power-law path gain relative to a reference distance, and
unit-mean small-scale fading samplers. All units are SI: meters, UAVs per
square meter, linear power ratios. dB and per-km2 conversions happen at the
CLI boundary only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class EnvironmentParams:
    """Terrain constants of the height-PLE fit n(z) = max(a - b*z + c/z, 2)
    and the reference distance d0 of the power-law path gain."""

    terrain_a: float
    terrain_b: float
    terrain_c: float
    d0: float = 100.0

    def __post_init__(self) -> None:
        if self.terrain_a <= 0:
            raise DomainError("terrain_a must be positive")
        if self.terrain_b < 0 or self.terrain_c < 0:
            raise DomainError("terrain_b and terrain_c must be non-negative")
        if self.d0 <= 0:
            raise DomainError("reference distance d0 must be positive")


#: Suburban terrain fit used throughout the reference scenarios.
SUI_SUBURBAN = EnvironmentParams(terrain_a=4.6, terrain_b=0.0075, terrain_c=12.6)


@dataclass(frozen=True)
class DeploymentParams:
    """UAV deployment: density of the 2D Poisson field and common altitude.

    The density field is the PPP intensity in UAVs per square meter
    (the CLI accepts per km2 and converts). l_min/l_max bound the altitude
    search interval for the height optimizer. l_min may be 0 so that
    ground-level limits (z = 0 with an explicit exponent) stay expressible.
    """

    density: float
    z: float
    l_min: float = 20.0
    l_max: float = 600.0

    def __post_init__(self) -> None:
        if self.density <= 0:
            raise DomainError("UAV density must be positive")
        if self.l_min < 0:
            raise DomainError("l_min must be non-negative")
        if not (self.l_min <= self.z <= self.l_max):
            raise DomainError("altitude z must satisfy l_min <= z <= l_max")


@dataclass(frozen=True)
class FadingModel:
    """Small-scale fading of every link, always normalized to unit mean power.

    kind is one of "rayleigh", "nakagami", "rician". Rician(k) is realized
    through its Nakagami equivalent shape m = (k^2 + 2k + 1) / (2k + 1); the
    k factor is kept for reporting. Nakagami(1) and Rician(0) coincide with
    Rayleigh in distribution.
    """

    kind: str
    m: float = 1.0
    k: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("rayleigh", "nakagami", "rician"):
            raise DomainError(f"unknown fading kind: {self.kind!r}")
        if self.m < 0.5:
            raise DomainError("Nakagami shape m must be >= 0.5")

    @classmethod
    def rayleigh(cls) -> "FadingModel":
        return cls("rayleigh", m=1.0)

    @classmethod
    def nakagami(cls, m: float) -> "FadingModel":
        return cls("nakagami", m=float(m))

    @classmethod
    def rician(cls, k: float) -> "FadingModel":
        return cls("rician", m=rician_k_to_m(k), k=float(k))


@dataclass(frozen=True)
class RadioParams:
    """Link-level parameters: linear SINR threshold theta and the noise level
    beta0 normalized by the received power at the reference distance
    (1/beta0 is the reference SNR). Transmit power and the reference gain
    never appear separately; they are folded into beta0."""

    theta: float
    beta0: float
    fading: FadingModel = FadingModel("rayleigh")

    def __post_init__(self) -> None:
        if self.theta <= 0:
            raise DomainError("SINR threshold theta must be positive")
        if self.beta0 < 0:
            raise DomainError("noise ratio beta0 must be non-negative")


def ple(z: float, env: EnvironmentParams) -> float:
    """Path loss exponent at altitude z: max(a - b*z + c/z, 2).

    Strictly decreasing in z until the floor of 2 engages (near 351.5 m for
    the suburban terrain constants).
    """
    if z <= 0:
        raise DomainError("altitude must be positive to evaluate the PLE")
    return max(env.terrain_a - env.terrain_b * z + env.terrain_c / z, 2.0)


def ple_floor_height(env: EnvironmentParams) -> float:
    """Altitude where a - b*z + c/z first hits the floor of 2.

    Positive root of b*z^2 - (a - 2)*z - c = 0. Returns infinity when the
    fit never reaches 2 (b = 0 with a above the floor).
    """
    a, b, c = env.terrain_a, env.terrain_b, env.terrain_c
    if b == 0.0:
        # n(z) = a + c/z decreases toward a: crosses 2 only when a < 2
        if a > 2.0:
            return math.inf
        if a == 2.0:
            return math.inf if c > 0 else 0.0
        return c / (2.0 - a)
    disc = (a - 2.0) ** 2 + 4.0 * b * c
    return ((a - 2.0) + math.sqrt(disc)) / (2.0 * b)


def path_gain(d: float, env: EnvironmentParams, n: float) -> float:
    """Deterministic link gain (d/d0)^(-n); equals 1 at the reference
    distance and exceeds 1 inside it."""
    if d <= 0:
        raise DomainError("link distance must be positive")
    if n < 2:
        raise DomainError("path loss exponent below 2 is outside the model")
    return (d / env.d0) ** (-n)


def rician_k_to_m(k: float) -> float:
    """Nakagami shape equivalent to a Rician K factor: (k^2+2k+1)/(2k+1).

    Monotone increasing, equals 1 at k = 0 (the Rayleigh limit).
    """
    if k < 0:
        raise DomainError("Rician K factor must be non-negative")
    return (k * k + 2.0 * k + 1.0) / (2.0 * k + 1.0)


def sample_fading(model: FadingModel, rng: np.random.Generator, size=None):
    """Draw unit-mean fading power gains.

    Rayleigh uses the unit-mean exponential; Nakagami(m) and Rician(k)
    (through its Nakagami shape) use Gamma(shape m, scale 1/m).
    """
    if model.kind == "rayleigh":
        return rng.exponential(1.0, size)
    return rng.gamma(model.m, 1.0 / model.m, size)


def nearest_distance_pdf(r, density: float):
    """Density of the horizontal distance to the closest point of a 2D PPP:
    f(r) = 2*pi*density*r * exp(-density*pi*r^2). Accepts scalars or arrays."""
    if density <= 0:
        raise DomainError("density must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("distance must be non-negative")
    out = 2.0 * math.pi * density * r * np.exp(-density * math.pi * r * r)
    return float(out) if out.ndim == 0 else out
