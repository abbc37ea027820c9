"""Bound verification suites.

Each suite measures a normalized quantity over a deterministic parameter sweep
and compares it with a configured threshold.  Thresholds encode "uniformly
bounded"; they are not sharp constants.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
from scipy.special import polygamma

from .dyadic import difference_bounds, kd_kernel, lemma_sweep, model_kernels
from .exceptions import InvalidInputError
from .experiments import fit_slope, pair_scaling_regression
from .fourier import truncation_error_norm
from .geometry import PolarPoint, diffractive_distance, diffractive_slope, dist_diff, dist_geo, morse_change
from .kernels import KernelParams, br_kernel, cosh_ratios, flux_split, reduced_b, shifted_angle
from .quadrature import integrate_adaptive
from .region import RegionPoint
from .settings import flux_profile
from .suite import Suite
from .workers import threaded_map

log = logging.getLogger("processor")

DECADES = (1.0, 10.0, 100.0)
INTEGER_FLUXES = (1, -2)
PAIR_FIT_WINDOW = 0.05
# additive recurrence steps for the deterministic sample sequences
SEQUENCE_STEPS = np.sqrt(np.array([2.0, 3.0, 5.0, 7.0, 11.0])) % 1.0


@dataclass
class BoundReport:
    """One measured constant against its threshold."""

    name: str
    parameters: Dict[str, Union[float, int, str]]
    measured_constant: float
    samples: int
    threshold: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.measured_constant = float(self.measured_constant)
        self.passed = bool(self.measured_constant <= self.threshold)


def sample_sequence(count: int, dims: int) -> np.ndarray:
    """Deterministic low-discrepancy points in [0, 1)^dims."""
    if dims > SEQUENCE_STEPS.size:
        raise InvalidInputError(f"At most {SEQUENCE_STEPS.size} sequence dimensions are available")
    index = np.arange(1, count + 1)[:, None]
    return (index * SEQUENCE_STEPS[None, :dims]) % 1.0


def uniformity(constants: Sequence[float]) -> float:
    """max / min of a list of positive constants; infinite when one vanishes."""
    constants = np.asarray(constants, dtype=float)
    if constants.size == 0 or not np.all(np.isfinite(constants)):
        return math.inf
    low = constants.min()
    return math.inf if low <= 0 else float(constants.max() / low)


def _signed_deltas(cfg: dict, key: str = "deltas") -> List[float]:
    return [d for d in cfg["sweeps"][key] if -1.5 < d < 0]


def _levels(cfg: dict) -> List[int]:
    return list(range(1, int(cfg["sweeps"]["j_max"]) + 1))


# Individual suites
def distance_suite(cfg: dict) -> List[BoundReport]:
    """|x - y| <= C |n_s| for every s >= 0."""
    count = int(cfg["sweeps"]["ream_samples"])
    radii = np.geomspace(1e-2, 1e2, 9)
    angles = np.linspace(-math.pi, math.pi, count)
    s = np.linspace(0.0, 10.0, count)
    worst = 0.0
    for r1 in radii:
        for r2 in radii:
            geo = dist_geo(r1, r2, angles)
            diff = diffractive_distance(r1, r2, s)
            worst = max(worst, float(np.max(geo) / np.min(diff)))
    samples = radii.size ** 2 * count * count
    return [BoundReport("ream1", {}, worst, samples, cfg["thresholds"]["ream1"])]


def flux_tail_suite(cfg: dict) -> List[BoundReport]:
    """int_0^inf exp(-|alpha| s) ds, reported per alpha."""
    reports = []
    for alpha in cfg["sweeps"]["alphas"]:
        rate = abs(flux_split(alpha)[1])
        if rate == 0:
            log.warning("Flux tail integral diverges for integer alpha=%g, skipped", alpha)
            continue
        upper = 50.0 / rate
        result = integrate_adaptive(lambda s, r=rate: np.exp(-r * s), 0.0, upper, tol=1e-12)
        value = result.value + math.exp(-rate * upper) / rate
        reports.append(BoundReport("ream2", {"alpha": alpha}, value, result.evaluations,
                                   cfg["thresholds"]["ream2"]))
    return reports


def _cosh_integrals(alpha0: float, angles: np.ndarray) -> Tuple[np.ndarray, np.ndarray, int]:
    shifted = shifted_angle(angles)
    b_sq = 2.0 * np.sin(0.5 * shifted) ** 2
    sin_shift = np.sin(shifted)
    widths = np.sqrt(b_sq[b_sq > 0])
    floor = (widths.min() if widths.size else 1.0) / 8.0
    points = list(np.geomspace(floor, 1.0, max(2, int(math.ceil(math.log2(8.0 / floor))))))
    upper = 40.0 / (1.0 - abs(alpha0))

    def integrand(s):
        sinh_ratio, cosh_ratio, singular = cosh_ratios(alpha0, s, shifted)
        first = np.abs((np.expm1(-s)[:, None] + b_sq[None, :]) * sinh_ratio)
        first = np.where(singular, 2.0 * abs(alpha0), first)
        second = np.abs(sin_shift[None, :] * cosh_ratio)
        return np.concatenate([first, second], axis=1)

    result = integrate_adaptive(integrand, 0.0, upper, tol=1e-8, points=points)
    values = np.asarray(result.value, dtype=float)
    return values[:angles.size], values[angles.size:], result.evaluations


def cosh_tails_suite(cfg: dict) -> List[BoundReport]:
    """The two cosh-denominator integrals of the diffractive amplitude, sup over the angle."""
    angles = np.linspace(-math.pi, math.pi, int(cfg["sweeps"]["ream_samples"]))
    threshold = cfg["thresholds"]["ream34"]
    reports = []
    for alpha in cfg["sweeps"]["alphas"]:
        alpha0 = flux_split(alpha)[1]
        first, second, evaluations = _cosh_integrals(alpha0, angles)
        reports.append(BoundReport("ream3", {"alpha": alpha}, first.max(), evaluations, threshold))
        reports.append(BoundReport("ream4", {"alpha": alpha}, second.max(), evaluations, threshold))
    return reports


def _decay_pair(decade: float, u: np.ndarray) -> Tuple[PolarPoint, PolarPoint]:
    r1 = decade * (0.1 + 1.9 * u[0])
    theta1 = 2.0 * math.pi * u[1]
    step = decade * (0.75 + 0.5 * u[3])
    x1 = r1 * math.cos(theta1) + step * math.cos(2.0 * math.pi * u[2])
    y1 = r1 * math.sin(theta1) + step * math.sin(2.0 * math.pi * u[2])
    return PolarPoint(r1, theta1), PolarPoint(math.hypot(x1, y1), math.atan2(y1, x1) % (2.0 * math.pi))


def decay_suite(cfg: dict) -> List[BoundReport]:
    """sup |K(x, y)| (1 + |x-y|)^(3/2+delta) per distance decade; reports max/min over decades."""
    count = int(cfg["sweeps"]["decay_samples"])
    draws = sample_sequence(count, 4)
    tol = cfg["tolerances"]["kernel_tol"]
    tasks = [(delta, alpha, decade, k)
             for delta in _signed_deltas(cfg) for alpha in cfg["sweeps"]["decay_alphas"]
             for decade in DECADES for k in range(count)]

    def measure(task):
        delta, alpha, decade, k = task
        params = KernelParams(delta, 1.0, alpha)
        x, y = _decay_pair(decade, draws[k])
        if y.r <= 1e-9:
            return 0.0
        value = br_kernel(params, x, y, tol).value
        distance = dist_geo(x.r, y.r, x.theta - y.theta)
        return abs(value) * (1.0 + distance) ** params.decay

    normalized = threaded_map(measure, tasks, cfg["run"]["max_threads"], label="decay samples")
    sups: Dict[tuple, Dict[float, float]] = {}
    for (delta, alpha, decade, _), value in zip(tasks, normalized):
        key = (delta, alpha)
        sups.setdefault(key, {}).setdefault(decade, 0.0)
        sups[key][decade] = max(sups[key][decade], value)

    return [BoundReport("decay", {"delta": delta, "alpha": alpha, **{f"sup_{int(d)}": v for d, v in per.items()}},
                        uniformity(list(per.values())), count * len(DECADES), cfg["thresholds"]["decay_uniformity"])
            for (delta, alpha), per in sups.items()]


def dyadic_suite(cfg: dict) -> List[BoundReport]:
    """j-uniformity of sup |K_D^{l,j}| 2^{j(3/2+delta)} (1 + 2^j r1 r2)^(1/2)."""
    sweeps = cfg["sweeps"]
    levels = _levels(cfg)
    tasks = [(ell, delta, alpha) for ell in (1, 2, 3) for delta in _signed_deltas(cfg, "lemma_deltas")
             for alpha in sweeps["alphas"] if abs(alpha) <= 1]

    def measure(task):
        ell, delta, alpha = task
        return lemma_sweep(ell, alpha, delta, sweeps["lemma_radii"], sweeps["lemma_angles"], levels)

    constants = threaded_map(measure, tasks, cfg["run"]["max_threads"], label="dyadic pieces")
    samples = len(levels) * len(sweeps["lemma_radii"]) * len(sweeps["lemma_angles"])

    return [BoundReport("lemma43", {"ell": ell, "delta": delta, "alpha": alpha}, uniformity(per_j), samples,
                        cfg["thresholds"]["lemma43_uniformity"])
            for (ell, delta, alpha), per_j in zip(tasks, constants)]


def model_suite(cfg: dict) -> List[BoundReport]:
    """j-uniformity of the normalized model difference, the model H and the frozen-amplitude error."""
    sweeps = cfg["sweeps"]
    levels = _levels(cfg)
    tasks = [(delta, alpha, j) for delta in _signed_deltas(cfg, "lemma_deltas") for alpha in sweeps["alphas"]
             if abs(alpha) <= 1 for j in levels]

    def measure(task):
        delta, alpha, j = task
        worst = np.zeros(3)
        for r in sweeps["lemma_radii"]:
            for angle in sweeps["lemma_angles"]:
                model = model_kernels(r, r, angle, j, delta)
                full = kd_kernel(3, alpha, r, r, angle, j, delta)
                scale = 2.0 ** (j * (1.5 + delta)) * math.sqrt(1.0 + 2.0 ** j * r * r)
                current = np.array([abs(model.model_difference), abs(model.h), abs(full - model.kernel)])
                worst = np.maximum(worst, scale * current)
        return worst

    results = threaded_map(measure, tasks, cfg["run"]["max_threads"], label="model kernels")
    grouped: Dict[tuple, List[np.ndarray]] = {}
    for (delta, alpha, _), worst in zip(tasks, results):
        grouped.setdefault((delta, alpha), []).append(worst)
    samples = len(levels) * len(sweeps["lemma_radii"]) * len(sweeps["lemma_angles"])
    threshold = cfg["thresholds"]["model_uniformity"]
    reports = []
    for (delta, alpha), rows in grouped.items():
        table = np.array(rows)
        for column, name in enumerate(("model_difference", "model_h", "model_remainder")):
            reports.append(BoundReport(name, {"delta": delta, "alpha": alpha},
                                       uniformity(table[:, column]), samples, threshold))
    return reports


def difference_suite(cfg: dict) -> List[BoundReport]:
    threshold = cfg["thresholds"]["difference"]
    reports = []
    for alpha in cfg["sweeps"]["alphas"]:
        if abs(alpha) > 1:
            continue
        bounds = difference_bounds(alpha)
        for name, value in bounds._asdict().items():
            reports.append(BoundReport(f"difference_{name}", {"alpha": alpha}, value, 41, threshold))
    return reports


def phase_suite(cfg: dict) -> List[BoundReport]:
    """Facts about s -> |n_s| used by the stationary phase analysis."""
    count = int(cfg["sweeps"]["phase_samples"])
    thresholds = cfg["thresholds"]
    draws = sample_sequence(count, 3)
    r1 = 0.05 + 10.0 * draws[:, 0]
    r2 = 0.05 + 10.0 * draws[:, 1]
    slope_zero = float(np.max(np.abs(diffractive_slope(r1, r2, 0.0))))

    far = np.linspace(1.0, 10.0, 91)
    monotone = 0.0
    for a, b in zip(r1, r2):
        monotone = max(monotone, float(-np.min(dist_diff(a, b, far).d2)))

    # r1 + r2 in [3/8, 4/3]
    total = 0.375 + (4.0 / 3.0 - 0.375) * draws[:, 2]
    share = 0.05 + 0.9 * draws[:, 0]
    q1, q2 = total * share, total * (1.0 - share)
    near = np.linspace(0.0, 1.0, 41)
    d2_ratio = 0.0
    for a, b in zip(q1, q2):
        d2_ratio = max(d2_ratio, float(np.max(0.4 * a * b / (a + b) / dist_diff(a, b, near).d2)))

    morse = 0.0
    grid = np.linspace(0.0, 1.0, 21)
    for a, b in zip(q1[:100], q2[:100]):
        for s in grid:
            change = morse_change(a, b, float(s))
            exact = 2.0 * (diffractive_distance(a, b, s) - (a + b))
            morse = max(morse, abs(a * b * change.s_tilde ** 2 - exact))

    return [
        BoundReport("phase_slope_at_zero", {}, slope_zero, count, thresholds["phase_tolerance"]),
        BoundReport("phase_monotone", {"s_min": 1.0, "s_max": 10.0}, max(monotone, 0.0),
                    count * far.size, thresholds["phase_tolerance"]),
        BoundReport("phase_d2", {"s_max": 1.0}, d2_ratio, count * near.size, thresholds["d2_constant"]),
        BoundReport("phase_morse", {"s_max": 1.0}, morse, min(count, 100) * grid.size,
                    thresholds["morse_tolerance"]),
    ]


def parseval_norm(M: int) -> float:
    """Exact L^2 truncation error (2/pi psi'(m0 + 1/2))^(1/2), m0 = ceil((M-1)/2)."""
    m0 = math.ceil((M - 1) / 2)
    return math.sqrt(2.0 / math.pi * float(polygamma(1, m0 + 0.5)))


def truncation_suite(cfg: dict) -> List[BoundReport]:
    orders = cfg["sweeps"]["truncation_orders"]
    thresholds = cfg["thresholds"]
    reports = []
    for p in cfg["sweeps"]["truncation_powers"]:
        errors = [truncation_error_norm(m, p) for m in orders]
        slope = fit_slope(orders, errors)
        reports.append(BoundReport("truncation_slope", {"p": p, "slope": slope}, abs(slope + 1.0 / p),
                                   len(orders), thresholds["truncation_slope_window"]))
        if p == 2:
            gap = max(abs(err / parseval_norm(m) - 1.0) for m, err in zip(orders, errors))
            reports.append(BoundReport("truncation_parseval", {"p": p}, gap, len(orders),
                                       thresholds["parseval_tolerance"]))
    return reports


def scaling_suite(cfg: dict) -> List[BoundReport]:
    """K_lambda(x, y) = lambda^2 K_1(lambda x, lambda y) within the combined error estimates."""
    profile = flux_profile(cfg)
    tol = cfg["tolerances"]["kernel_tol"]
    count = int(cfg["sweeps"]["pair_samples"])
    draws = sample_sequence(count, 4)
    pairs = [(PolarPoint(0.2 + 2.8 * u[0], 2.0 * math.pi * u[1]), PolarPoint(0.2 + 2.8 * u[2], 2.0 * math.pi * u[3]))
             for u in draws]
    pairs = [(x, y) for x, y in pairs if dist_geo(x.r, y.r, x.theta - y.theta) > 1e-3]
    tasks = [(delta, lam, k) for delta in _signed_deltas(cfg) for lam in cfg["sweeps"]["lambdas"]
             for k in range(len(pairs))]

    def measure(task):
        delta, lam, k = task
        x, y = pairs[k]
        params = KernelParams(delta, lam, profile)
        direct = br_kernel(params, x, y, tol)
        unit = br_kernel(params.rescaled(1.0), x.scaled(lam), y.scaled(lam), tol)
        gap = abs(direct.value - lam * lam * unit.value)
        return max(gap - direct.abs_error_estimate - lam * lam * unit.abs_error_estimate, 0.0)

    excess = threaded_map(measure, tasks, cfg["run"]["max_threads"], label="scaling pairs")
    reports = []
    for delta in _signed_deltas(cfg):
        worst = max((e for (d, _, _), e in zip(tasks, excess) if d == delta), default=0.0)
        reports.append(BoundReport("scaling_identity", {"delta": delta, "alpha": profile.alpha}, worst,
                                   len(pairs) * len(cfg["sweeps"]["lambdas"]), cfg["thresholds"]["scaling_tolerance"]))
    if _signed_deltas(cfg) and pairs:
        target = RegionPoint(2.0 / 3.0, 1.0 / 3.0)
        params = KernelParams(_signed_deltas(cfg)[0], 1.0, profile)
        fit = pair_scaling_regression(params, pairs[:8], target, cfg["sweeps"]["scaling_lambdas"], tol=tol)
        reports.append(BoundReport("scaling_pair_fit", {"exponent": fit.exponent, "target": fit.target},
                                   fit.deviation, len(fit.lambdas), PAIR_FIT_WINDOW))
    return reports


def integer_flux_suite(cfg: dict) -> List[BoundReport]:
    """Integer flux: B vanishes and |K| equals the free modulus."""
    tol = cfg["tolerances"]["kernel_tol"]
    threshold = cfg["thresholds"]["integer_flux_tolerance"]
    deltas = _signed_deltas(cfg) or [-0.5]
    s = np.linspace(0.0, 20.0, 201)
    angles = np.linspace(-math.pi, math.pi, 65)
    draws = sample_sequence(int(cfg["sweeps"]["pair_samples"]), 4)
    reports = []
    for m in INTEGER_FLUXES:
        b_max = float(np.max(np.abs(reduced_b(float(m), s, angles))))
        reports.append(BoundReport("integer_flux_b", {"alpha": m}, b_max, s.size * angles.size, threshold))
        worst = 0.0
        for u in draws:
            x = PolarPoint(0.2 + 4.8 * u[0], 2.0 * math.pi * u[1])
            y = PolarPoint(0.2 + 4.8 * u[2], 2.0 * math.pi * u[3])
            flux = br_kernel(KernelParams(deltas[0], 1.0, float(m)), x, y, tol).value
            free = br_kernel(KernelParams(deltas[0], 1.0, 0.0), x, y, tol).value
            worst = max(worst, abs(abs(flux) - abs(free)))
        reports.append(BoundReport("integer_flux_modulus", {"alpha": m, "delta": deltas[0]}, worst,
                                   len(draws), threshold))
    return reports


SUITES = {
    Suite.DISTANCE: distance_suite,
    Suite.FLUX_TAIL: flux_tail_suite,
    Suite.COSH_TAILS: cosh_tails_suite,
    Suite.DECAY: decay_suite,
    Suite.DYADIC: dyadic_suite,
    Suite.MODEL: model_suite,
    Suite.DIFFERENCE: difference_suite,
    Suite.PHASE: phase_suite,
    Suite.TRUNCATION: truncation_suite,
    Suite.SCALING: scaling_suite,
    Suite.INTEGER_FLUX: integer_flux_suite,
}


def resolve_suites(names: Iterable[str]) -> List[Suite]:
    """Suite members for a list of names; 'all' expands to every suite, duplicates are dropped."""
    resolved = []
    for name in names:
        if str(name).strip().lower() == "all":
            members = list(Suite)
        else:
            try:
                members = [Suite(name)]
            except ValueError as err:
                raise InvalidInputError(f"Unknown suite {name!r}") from err
        resolved.extend(m for m in members if m not in resolved)
    return resolved


def verify_bounds(suite: Union[Suite, str], cfg: dict) -> List[BoundReport]:
    """Run one suite and return its reports."""
    member = resolve_suites([suite.value if isinstance(suite, Suite) else suite])
    if len(member) != 1:
        raise InvalidInputError("verify_bounds runs a single suite; use resolve_suites for 'all'")
    reports = SUITES[member[0]](cfg)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        log.warning("Suite %s: %i of %i checks failed (%s)", member[0].value, len(failed), len(reports),
                    ", ".join(sorted(set(failed))))
    else:
        log.info("Suite %s: %i checks passed", member[0].value, len(reports))
    return reports
