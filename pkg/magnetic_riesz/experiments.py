"""Empirical L^p -> L^q experiments: ratio sweeps, lambda-scaling fits and the truncated-jump model."""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import InvalidInputError
from .family import Family
from .fourier import indicator, indicator_fourier_partial, partial_sum_l1
from .geometry import PolarPoint, dist_geo
from .kernels import DEFAULT_TOL, KernelParams, br_kernel
from .polar_operator import (
    DEFAULT_OPERATOR_TOL,
    GridFunction,
    KernelRowCache,
    PolarGrid,
    ShapeSpec,
    apply_br,
    free_multiplier_oracle,
    lp_norm,
    make_indicator,
)
from .region import RegionPoint
from .workers import threaded_map

log = logging.getLogger("processor")

MIN_ACTIVE_NODES = 32
SATURATION_NOISE = 0.05
ENGINES = ("kernel", "oracle")


@dataclass(frozen=True)
class GridConfig:
    """Polar grid parameters as they appear in the [grid] section."""

    n_r: int = 64
    n_theta: int = 64
    r_max: float = 40.0
    spacing: str = "uniform"
    r_min: Optional[float] = None

    def build(self) -> PolarGrid:
        if self.spacing == "uniform":
            return PolarGrid.uniform(self.n_r, self.r_max, self.n_theta)
        if self.spacing == "geometric":
            return PolarGrid.geometric(self.n_r, self.r_max, self.n_theta, self.r_min)
        raise InvalidInputError(f"Unknown grid spacing {self.spacing!r}")


@dataclass
class RatioSweep:
    delta: float
    region_point: RegionPoint
    family: Family
    scales: List[float]
    measures: List[float]
    ratios: List[float]
    slope: float
    skipped: List[float] = field(default_factory=list)


def family_shape(family: Family, scale: float) -> ShapeSpec:
    """Member of an indicator family at a dyadic scale."""
    family = Family(family)
    if family is Family.BALLS:
        return ShapeSpec.ball(scale)
    if family is Family.ANNULI:
        return ShapeSpec.annulus(scale, scale + 1.0)
    if family is Family.SHRINKING_ANNULI:
        width = 1.0 / scale
        return ShapeSpec.annulus(1.0 - 0.5 * width, 1.0 + 0.5 * width)
    return ShapeSpec.tube(0.0, scale, 1.0)


def _shape_extent(shape: ShapeSpec) -> float:
    if shape.radius:
        return shape.radius
    if shape.r_out:
        return shape.r_out
    return math.hypot(0.5 * shape.length, 0.5 * shape.width)


def _check_dyadic(scales: Sequence[float]):
    for scale in scales:
        exponent = math.log2(scale) if scale > 0 else float("nan")
        if not math.isfinite(exponent) or abs(exponent - round(exponent)) > 1e-12:
            raise InvalidInputError(f"Scales must be powers of two, got {scale}")


def fit_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def ratio_sweep(delta_signed: float,
                pt: RegionPoint,
                family: Family,
                scales: Sequence[float],
                grid_cfg: GridConfig,
                alpha: float = 0.0,
                engine: str = "kernel",
                tol: float = DEFAULT_OPERATOR_TOL,
                max_threads: int = None
                ) -> RatioSweep:
    """||S chi_E||_q / ||chi_E||_p at lambda = 1 for one family over dyadic scales."""
    family = Family(family)
    _check_dyadic(scales)
    if not -1.5 < delta_signed < 0:
        raise InvalidInputError(f"Signed orders lie in (-3/2, 0), got {delta_signed}")
    if engine not in ENGINES:
        raise InvalidInputError(f"Unknown engine {engine!r}, expected one of {ENGINES}")
    params = KernelParams(delta_signed, 1.0, alpha)
    if engine == "oracle" and params.alpha != 0:
        raise InvalidInputError("The multiplier oracle covers the free case alpha = 0 only")
    grid = grid_cfg.build()
    cache = KernelRowCache()
    kept, measures, ratios, skipped = [], [], [], []
    for scale in scales:
        shape = family_shape(family, scale)
        if _shape_extent(shape) >= grid.r_max:
            log.warning("%s at scale %g does not fit in r_max=%g, skipped", family.value, scale, grid.r_max)
            skipped.append(scale)
            continue
        chi = make_indicator(grid, shape)
        active = int(np.count_nonzero(chi.values))
        if active < MIN_ACTIVE_NODES:
            log.warning("%s at scale %g has %i active nodes, skipped", family.value, scale, active)
            skipped.append(scale)
            continue
        if engine == "kernel":
            out = apply_br(params, chi, tol, max_threads, cache)
        else:
            out = free_multiplier_oracle(params.delta, params.lam, chi)
        ratio = lp_norm(out, pt.q) / lp_norm(chi, pt.p)
        if not ratio > 0:
            log.warning("Zero output for %s at scale %g, skipped", family.value, scale)
            skipped.append(scale)
            continue
        kept.append(scale)
        measures.append(chi.measure())
        ratios.append(ratio)
        log.debug("%s scale=%g |E|=%.4g ratio=%.6g", family.value, scale, measures[-1], ratio)
    if len(kept) < 2:
        raise InvalidInputError(f"Fewer than two usable scales for {family.value}")

    return RatioSweep(delta_signed, pt, family, kept, measures, ratios, fit_slope(measures, ratios), skipped)


@dataclass
class ScalingFit:
    lambdas: List[float]
    values: List[float]
    exponent: float
    target: float

    @property
    def deviation(self) -> float:
        return abs(self.exponent - self.target)


def _check_lambdas(lambdas: Sequence[float]) -> List[float]:
    lambdas = sorted(float(lam) for lam in lambdas)
    if len(lambdas) < 3:
        raise InvalidInputError("A scaling fit needs at least three values of lambda")
    if lambdas[0] <= 0 or lambdas[-1] / lambdas[0] < 4.0:
        raise InvalidInputError("lambda values must be positive and span at least two octaves")
    return lambdas


def scaling_regression(delta_signed: float,
                       pt: RegionPoint,
                       f: GridFunction,
                       lambdas: Sequence[float],
                       alpha: float = 0.0,
                       tol: float = DEFAULT_OPERATOR_TOL,
                       max_threads: int = None
                       ) -> ScalingFit:
    """Fit ||S_lambda f_lambda||_q / ||f_lambda||_p against lambda, f_lambda(x) = f(lambda x).

    The grid of f is co-scaled by 1/lambda, so the node values of f_lambda are those of f.
    """
    lambdas = _check_lambdas(lambdas)
    base = KernelParams(delta_signed, 1.0, alpha)
    values = []
    for lam in lambdas:
        scaled = GridFunction(f.grid.scaled(1.0 / lam), f.values)
        out = apply_br(base.rescaled(lam), scaled, tol, max_threads)
        values.append(lp_norm(out, pt.q) / lp_norm(scaled, pt.p))

    return ScalingFit(lambdas, values, fit_slope(lambdas, values), 2.0 * pt.gap)


def pair_scaling_regression(params: KernelParams,
                            pairs: Sequence[Tuple[PolarPoint, PolarPoint]],
                            pt: RegionPoint,
                            lambdas: Sequence[float],
                            cell: float = 1e-2,
                            tol: float = DEFAULT_TOL
                            ) -> ScalingFit:
    """Rank-one scaling test on point pairs.

    For each pair (x, y) the operator K_lambda(x/lambda, y/lambda) 1_{B_x} (x) 1_{B_y}, with
    cells of area `cell`/lambda^2, has L^p -> L^q norm
    |K| (cell/lambda^2)^(1 + 1/q - 1/p); the fitted exponent is 2(1/p - 1/q).
    """
    lambdas = _check_lambdas(lambdas)
    if not pairs:
        raise InvalidInputError("pair_scaling_regression needs at least one point pair")
    values = []
    for lam in lambdas:
        scaled = params.rescaled(lam)
        total = sum(abs(br_kernel(scaled, x.scaled(1.0 / lam), y.scaled(1.0 / lam), tol).value) for x, y in pairs)
        values.append(total * (cell / lam ** 2) ** (1.0 + pt.inv_q - pt.inv_p))

    return ScalingFit(lambdas, values, fit_slope(lambdas, values), 2.0 * pt.gap)


@dataclass
class StabilityReport:
    lam: float
    q: float
    r: float
    orders: List[int]
    remainder_ratios: List[float]
    truncated_l1: List[float]
    saturated: List[bool]
    jump: str

    @property
    def decreasing(self) -> bool:
        """Remainder ratios never grow by more than the noise margin along the resolved orders."""
        resolved = [v for v, sat in zip(self.remainder_ratios, self.saturated) if not sat]
        return all(b <= a * (1.0 + SATURATION_NOISE) for a, b in zip(resolved, resolved[1:]))

    @property
    def log_growth(self) -> float:
        """Slope of the truncated multiplier size against log M."""
        if len(self.orders) < 2:
            return 0.0
        return float(np.polyfit(np.log(self.orders), self.truncated_l1, 1)[0])


def model_bump(distance: np.ndarray) -> np.ndarray:
    """Smooth radial cutoff supported in [1/2, 2]."""
    d = np.asarray(distance, dtype=float)
    u = np.clip((d - 0.5) * (2.0 - d), 0.0, None)
    with np.errstate(divide="ignore"):
        return np.where(u > 0, np.exp(-0.25 / np.where(u > 0, u, 1.0)), 0.0)


def _angular_factor(jump: str, order: Optional[int], differences: np.ndarray) -> np.ndarray:
    if jump == "constant":
        return np.ones_like(differences)
    if order is None:
        values = indicator(differences)
        # the series converges to the midpoint on the jump
        return np.where(np.isclose(np.abs(differences), math.pi, atol=1e-13), 0.5, values)
    return np.real(indicator_fourier_partial(order, differences))


def _stability_tests(grid: PolarGrid) -> List[GridFunction]:
    reach = grid.r_max
    return [
        make_indicator(grid, ShapeSpec.ball(0.3 * reach)),
        make_indicator(grid, ShapeSpec.sector(0.2 * reach, 0.6 * reach, 0.0, 0.5 * math.pi)),
    ]


def model_operator(lam: float,
                   factor: Callable[[np.ndarray], np.ndarray],
                   f: GridFunction,
                   max_threads: int = None) -> GridFunction:
    """T f(x) = sum_y exp(2 pi i lam |x-y|) psi(|x-y|) factor(theta_x - theta_y) f(y) w(y)."""
    grid = f.grid
    thetas = grid.thetas
    differences = thetas[:, None] - thetas[None, :]
    angular = factor(differences)
    weights = grid.radial_weights

    def output_ring(i):
        total = np.zeros(grid.n_theta, dtype=complex)
        for j in range(grid.n_r):
            if not np.any(f.values[j]):
                continue
            distance = dist_geo(grid.radii[i], grid.radii[j], differences)
            envelope = model_bump(distance)
            if not np.any(envelope):
                continue
            matrix = np.exp(2j * math.pi * lam * distance) * envelope * angular
            total += weights[j] * matrix @ f.values[j]
        return total

    rings = threaded_map(output_ring, range(grid.n_r), max_threads, label="model rings")
    return GridFunction(grid, np.array(rings))


def stability_experiment(lam: float,
                         orders: Sequence[int],
                         q: float,
                         r: float,
                         grid_cfg: GridConfig,
                         jump: str = "indicator",
                         tests: Sequence[GridFunction] = None,
                         max_threads: int = None
                         ) -> StabilityReport:
    """Remainder of the truncated angular jump in the model operator T_G^lambda, versus M.

    The full jump operator is compared with its order-M Fourier truncation; the
    reported ratio is max over test functions of ||(T - T_M) f||_q / ||f||_r.
    """
    if jump not in ("indicator", "constant"):
        raise InvalidInputError(f"jump must be 'indicator' or 'constant', got {jump!r}")
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    if not r > 1 or not q >= 1:
        raise InvalidInputError(f"Need r > 1 and q >= 1, got r={r} q={q}")
    if not orders or any(int(m) != m or m < 1 for m in orders):
        raise InvalidInputError("Truncation orders must be positive integers")
    dual = 3.0 * r / (r - 1.0)
    if abs(q - dual) > 1e-6 * dual:
        log.warning("q=%g is off the q = 3r' line (3r'=%g)", q, dual)
    grid = grid_cfg.build()
    tests = list(tests) if tests is not None else _stability_tests(grid)
    full = [model_operator(lam, lambda d: _angular_factor(jump, None, d), f, max_threads) for f in tests]
    ratios, l1, saturated = [], [], []
    for order in sorted(int(m) for m in orders):
        worst = 0.0
        for f, exact in zip(tests, full):
            truncated = model_operator(lam, lambda d: _angular_factor(jump, order, d), f, max_threads)
            worst = max(worst, lp_norm(exact - truncated, q) / lp_norm(f, r))
        ratios.append(worst)
        l1.append(1.0 if jump == "constant" else partial_sum_l1(order))
        saturated.append(order > grid.n_theta)
        if saturated[-1]:
            log.warning("Truncation order %i exceeds the angular resolution n_theta=%i", order, grid.n_theta)

    return StabilityReport(lam, q, r, sorted(int(m) for m in orders), ratios, l1, saturated, jump)

