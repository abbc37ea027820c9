from .exceptions import (
    RieszError,
    InvalidInputError,
    GridMismatchError,
    DomainError,
    PreconditionError,
    SingularInputError,
    UnsupportedRegimeError,
    GammaPoleError
)
from .eval_method import EvalMethod
from .family import Family
from .membership import Membership
from .shape_kind import ShapeKind
from .suite import Suite
from .geometry import (
    FluxProfile,
    PolarPoint,
    flux_alpha,
    phase_integral,
    dist_geo,
    dist_diff,
    b_param,
    morse_change,
    normalize_angle
)
from .specialfn import (
    bessel_j,
    bessel_j_array,
    gamma_fn,
    hankel_amplitude,
    hankel_expansion,
    scaled_bessel
)
from .quadrature import OscillatorySpec, QuadResult, integrate_adaptive, integrate_oscillatory_s
from .kernels import (
    KernelParams,
    KernelValue,
    a_alpha,
    b_alpha,
    br_kernel,
    leading_kernels,
    spectral_measure_kernel
)
from .dyadic import (
    difference_bounds,
    dyadic_cutoff_index,
    dyadic_kernel_pieces,
    kd_kernel,
    model_kernels
)
from .fourier import indicator_fourier_partial, truncation_error_norm
from .polar_operator import (
    GridFunction,
    KernelRowCache,
    PolarGrid,
    ShapeSpec,
    apply_br,
    apply_br_direct,
    free_kernel_oracle,
    free_multiplier_oracle,
    lp_norm,
    make_indicator,
    sharp_cutoff_projection
)
from .region import RegionPoint, region_membership, vertices
from .experiments import (
    GridConfig,
    RatioSweep,
    ScalingFit,
    StabilityReport,
    pair_scaling_regression,
    ratio_sweep,
    scaling_regression,
    stability_experiment
)
from .suites import BoundReport, resolve_suites, verify_bounds
from .reports import RunManifest, bound_report_rows, write_csv
from .settings import DEFAULT_SETTINGS, build_settings
from .helper import (
    RIESZ_BANNER,
    CONFIG_BANNER,
    VERIFY_BANNER,
    FINISHED_BANNER,
    CHECKS_PASSED,
    CHECKS_FAILED,
    display_banner
)
from ._version import __version__ as VERSION

__all__ = [
    "RieszError", "InvalidInputError", "GridMismatchError", "DomainError", "PreconditionError",
    "SingularInputError", "UnsupportedRegimeError", "GammaPoleError",
    "EvalMethod", "Family", "Membership", "ShapeKind", "Suite",
    "FluxProfile", "PolarPoint", "flux_alpha", "phase_integral", "dist_geo", "dist_diff", "b_param", "morse_change", "normalize_angle",
    "bessel_j", "bessel_j_array", "gamma_fn", "hankel_amplitude", "hankel_expansion", "scaled_bessel",
    "OscillatorySpec", "QuadResult", "integrate_adaptive", "integrate_oscillatory_s",
    "KernelParams", "KernelValue", "a_alpha", "b_alpha", "br_kernel", "leading_kernels",
    "spectral_measure_kernel",
    "difference_bounds", "dyadic_cutoff_index", "dyadic_kernel_pieces", "kd_kernel", "model_kernels",
    "indicator_fourier_partial", "truncation_error_norm",
    "GridFunction", "KernelRowCache", "PolarGrid", "ShapeSpec", "apply_br", "apply_br_direct",
    "free_kernel_oracle", "free_multiplier_oracle", "lp_norm", "make_indicator", "sharp_cutoff_projection",
    "RegionPoint", "region_membership", "vertices",
    "GridConfig", "RatioSweep", "ScalingFit", "StabilityReport", "pair_scaling_regression",
    "ratio_sweep", "scaling_regression", "stability_experiment",
    "BoundReport", "resolve_suites", "verify_bounds",
    "RunManifest", "bound_report_rows", "write_csv",
    "DEFAULT_SETTINGS", "build_settings",
    "RIESZ_BANNER", "CONFIG_BANNER", "VERIFY_BANNER", "FINISHED_BANNER", "CHECKS_PASSED",
    "CHECKS_FAILED", "display_banner", "VERSION"
    ]
