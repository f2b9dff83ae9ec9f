"""Downlink coverage probability for a network of UAV aerial base stations
hovering at a common altitude over a plane of users.

Analytic expressions (exact quadrature, a closed form for exponent 4, and
interference-free / noise-free limits), a Monte Carlo oracle, and design
solvers for the coverage-optimal altitude and station density.
"""

from .analytic import (
    DEFAULT_QUADRATURE,
    METHOD_TAGS,
    CoverageEstimate,
    QuadratureConfig,
    coverage_no_noise,
    coverage_noise_limited,
    coverage_rayleigh,
    coverage_rayleigh_n4_closed,
    laplace_interference,
    q_approx,
    q_function,
    q_function_scaled,
    rho,
    rho_closed_n4,
)
from .channel import (
    SUI_SUBURBAN,
    DeploymentParams,
    EnvironmentParams,
    FadingModel,
    RadioParams,
    nearest_distance_pdf,
    path_gain,
    ple,
    ple_floor_height,
    rician_k_to_m,
    sample_fading,
)
from .errors import DivergenceError, DomainError, QuadratureError
from .montecarlo import (
    CHUNK_TRIALS,
    McConfig,
    McResult,
    auto_region_radius,
    coverage_nakagami_semianalytic,
    generate_ppp,
    sample_annulus_interference,
    sample_sinr_components,
    simulate_coverage,
    wilson_interval,
)
from .optimize import (
    NOISE_DOMINANCE_RATIO,
    ApproxCoverage,
    DensityCoeffs,
    Optimum,
    cardano_radicand_roots,
    coverage_density_approx,
    density_coeffs,
    height_objective_fn,
    optimal_density_closed,
    optimal_density_numeric,
    optimal_height,
)

__version__ = "0.1.0"

__all__ = [
    "CHUNK_TRIALS",
    "DEFAULT_QUADRATURE",
    "METHOD_TAGS",
    "NOISE_DOMINANCE_RATIO",
    "SUI_SUBURBAN",
    "ApproxCoverage",
    "CoverageEstimate",
    "DensityCoeffs",
    "DeploymentParams",
    "DivergenceError",
    "DomainError",
    "EnvironmentParams",
    "FadingModel",
    "McConfig",
    "McResult",
    "Optimum",
    "QuadratureConfig",
    "QuadratureError",
    "RadioParams",
    "auto_region_radius",
    "cardano_radicand_roots",
    "coverage_density_approx",
    "coverage_nakagami_semianalytic",
    "coverage_no_noise",
    "coverage_noise_limited",
    "coverage_rayleigh",
    "coverage_rayleigh_n4_closed",
    "density_coeffs",
    "generate_ppp",
    "height_objective_fn",
    "laplace_interference",
    "nearest_distance_pdf",
    "optimal_density_closed",
    "optimal_density_numeric",
    "optimal_height",
    "path_gain",
    "ple",
    "ple_floor_height",
    "q_approx",
    "q_function",
    "q_function_scaled",
    "rho",
    "rho_closed_n4",
    "rician_k_to_m",
    "sample_annulus_interference",
    "sample_fading",
    "sample_sinr_components",
    "simulate_coverage",
    "wilson_interval",
    "__version__",
]
