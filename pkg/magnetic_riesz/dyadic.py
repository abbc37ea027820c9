"""Dyadic decomposition of the diffractive kernel.

The smooth partition beta_0(r) + sum_j beta(2^-j r) = 1 splits the kernel into
frequency-localized pieces.  At scale 2^j the diffractive part is the sum of the
three pieces K_D^{l,j}, one per term of B_alpha, and the l = 3 piece is compared
with its quadratic-phase model H.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Sequence

import numpy as np
from scipy.special import wofz

from .exceptions import InvalidInputError
from .geometry import PolarPoint, diffractive_distance, dist_geo
from .kernels import (
    DEFAULT_TOL,
    KernelParams,
    KernelValue,
    br_kernel,
    cosh_ratios,
    shifted_angle,
)
from .quadrature import OscillatorySpec, integrate_oscillatory_s

log = logging.getLogger("processor")

STEP_LOW = 0.75
STEP_HIGH = 4.0 / 3.0
SUPPORT = (0.375, STEP_HIGH)
# 1/(s^2/2 + b^2) has no exponential decay; the integration-by-parts cut ends the tail
MODEL_TAIL_RATE = 0.05

Symbol = Callable[[np.ndarray], np.ndarray]


def _flat_exp(u: np.ndarray) -> np.ndarray:
    """exp(-1/u) for u > 0, 0 otherwise."""
    positive = u > 0
    return np.where(positive, np.exp(-1.0 / np.where(positive, u, 1.0)), 0.0)


def smooth_step(r):
    """C-infinity step: 1 on [0, 3/4], 0 on [4/3, infinity), decreasing in between."""
    r = np.asarray(r, dtype=float)
    upper = _flat_exp(STEP_HIGH - r)
    lower = _flat_exp(r - STEP_LOW)
    result = upper / (upper + lower)
    return float(result) if result.ndim == 0 else result


def bump(r):
    """beta(r) = step(r) - step(2r), supported in [3/8, 4/3]."""
    r = np.asarray(r, dtype=float)
    result = np.asarray(smooth_step(r)) - np.asarray(smooth_step(2.0 * r))
    return float(result) if result.ndim == 0 else result


def bump0(r):
    """beta_0 = step, the low-frequency complement of the dyadic bumps."""
    return smooth_step(r)


def partition_sum(r, levels: int):
    """beta_0(r) + sum_{j=1..levels} beta(2^-j r), summed term by term."""
    r = np.asarray(r, dtype=float)
    total = np.asarray(bump0(r), dtype=float).copy()
    for j in range(1, int(levels) + 1):
        total = total + bump(r * 2.0 ** -j)
    return float(total) if total.ndim == 0 else total


def dyadic_cutoff_index(measure: float) -> int:
    """Largest k with 2^k < |E|^(2/3)."""
    if not measure > 0 or not math.isfinite(measure):
        raise InvalidInputError(f"The measure must be positive, got {measure}")
    threshold = measure ** (2.0 / 3.0)
    k = math.floor(math.log2(threshold))
    while 2.0 ** k >= threshold:
        k -= 1
    while 2.0 ** (k + 1) < threshold:
        k += 1
    return k


@dataclass(frozen=True)
class DyadicPiece:
    """Index (l, j) of one dyadic diffractive piece."""

    ell: int
    j: int

    def __post_init__(self):
        if self.ell not in (1, 2, 3):
            raise InvalidInputError(f"ell must be 1, 2 or 3, got {self.ell}")
        if int(self.j) != self.j or self.j < 0:
            raise InvalidInputError(f"j must be a nonnegative integer, got {self.j}")

    @property
    def frequency(self) -> float:
        return 2.0 ** self.j

    def normalization(self, delta: float) -> float:
        """2^-j(3/2 + delta)."""
        return 2.0 ** (-self.j * (1.5 + delta))

    def tail_rate(self, alpha: float, delta: float) -> float:
        base = abs(alpha) if self.ell == 1 else 1.0 - abs(alpha)
        return base + 0.5 * (1.5 + delta)


def _unit_symbol(r: np.ndarray) -> np.ndarray:
    return np.ones_like(np.asarray(r, dtype=float))


def _check_delta(delta: float):
    if not -1.5 < delta < 0:
        raise InvalidInputError(f"delta must lie in (-3/2, 0), got {delta}")


def piece_amplitude(piece: DyadicPiece,
                    alpha: float,
                    r1: float,
                    r2: float,
                    dtheta: float,
                    delta: float,
                    symbol: Symbol = None
                    ) -> Callable[[np.ndarray], np.ndarray]:
    """The amplitude psi_l(s) of K_D^{l,j}."""
    symbol = symbol or _unit_symbol
    decay = 1.5 + delta
    shifted = float(shifted_angle(dtheta))
    b_sq = 2.0 * math.sin(0.5 * shifted) ** 2

    def amplitude(s):
        s = np.asarray(s, dtype=float)
        distance = diffractive_distance(r1, r2, s)
        base = distance ** -decay * np.asarray(symbol(piece.frequency * distance))
        if piece.ell == 1:
            return base * np.exp(-abs(alpha) * s)
        sinh_ratio, cosh_ratio, singular = cosh_ratios(alpha, s, np.array([shifted]))
        if piece.ell == 2:
            factor = (np.expm1(-s)[:, None] + b_sq) * sinh_ratio
            factor = np.where(singular, -2.0 * alpha, factor)
        else:
            factor = math.sin(shifted) * cosh_ratio
        return base * factor[:, 0]

    return amplitude


def kd_kernel(ell: int,
              profile,
              r1: float,
              r2: float,
              dtheta: float,
              j: int,
              delta: float,
              symbol: Symbol = None,
              tol: float = DEFAULT_TOL
              ) -> complex:
    """K_D^{l,j}(r1, r2; dtheta) = 2^-j(3/2+delta) beta(r1+r2) int exp(i 2^j |n_s|) psi_l(s) ds."""
    piece = DyadicPiece(int(ell), int(j))
    _check_delta(delta)
    alpha = profile.alpha if hasattr(profile, "alpha") else float(profile)
    if abs(alpha) > 1:
        raise InvalidInputError(f"The dyadic pieces are written for |alpha| <= 1, got {alpha}")
    if r1 <= 0 or r2 <= 0:
        raise InvalidInputError("Radii must be positive")
    cutoff = bump(r1 + r2) if piece.j >= 1 else bump0(r1 + r2)
    if cutoff == 0.0:
        return 0.0 + 0.0j
    amplitude = piece_amplitude(piece, alpha, r1, r2, dtheta, delta, symbol)
    width = abs(math.sqrt(2.0) * math.sin(0.5 * float(shifted_angle(dtheta))))
    spec = OscillatorySpec(piece.frequency, r1, r2, amplitude, piece.tail_rate(alpha, delta),
                           peak_width=width if width > 0 else None)
    result = integrate_oscillatory_s(spec, tol)
    if not result.converged:
        log.warning("K_D^{%d,%d} not converged at r1=%g r2=%g dtheta=%g", piece.ell, piece.j, r1, r2, dtheta)

    return complex(piece.normalization(delta) * cutoff * result.value)


class ModelKernels(NamedTuple):
    integral: complex
    kernel: complex
    h: complex
    carrier: complex

    @property
    def model_difference(self) -> complex:
        return self.carrier * self.kernel - self.h


def quadratic_phase_integral(mu: float, b: float) -> complex:
    """int_0^inf exp(i mu s^2) / (s^2/2 + b^2) ds for b != 0, through the Faddeeva function."""
    scale = math.sqrt(2.0) * abs(b)
    return complex(math.pi / scale * wofz(scale * math.sqrt(mu) * complex(math.sqrt(0.5), math.sqrt(0.5))))


def model_kernels(r1: float,
                  r2: float,
                  dtheta: float,
                  j: int,
                  delta: float,
                  symbol: Symbol = None,
                  tol: float = DEFAULT_TOL
                  ) -> ModelKernels:
    """The frozen-amplitude model of K_D^{3,j} and its quadratic-phase counterpart H.

    `integral` is int exp(i 2^j |n_s|) psi_3m ds, `kernel` the normalized K_D,m^{3,j}
    and `h` the model H; `model_difference` is exp(-i 2^j (r1+r2)) K - H.
    """
    piece = DyadicPiece(3, int(j))
    _check_delta(delta)
    if r1 <= 0 or r2 <= 0:
        raise InvalidInputError("Radii must be positive")
    symbol = symbol or _unit_symbol
    decay = 1.5 + delta
    total = r1 + r2
    shifted = float(shifted_angle(dtheta))
    sin_shift = math.sin(shifted)
    b = math.sqrt(2.0) * math.sin(0.5 * shifted)
    cutoff = bump(total) if piece.j >= 1 else bump0(total)
    carrier = complex(math.cos(piece.frequency * total), -math.sin(piece.frequency * total))
    if sin_shift == 0.0 or b == 0.0:
        return ModelKernels(0j, 0j, 0j, carrier)
    weight = total ** -decay * float(np.asarray(symbol(piece.frequency * total))) * sin_shift

    def amplitude(s):
        s = np.asarray(s, dtype=float)
        return weight / (0.5 * s * s + b * b)

    spec = OscillatorySpec(piece.frequency, r1, r2, amplitude, MODEL_TAIL_RATE, peak_width=min(abs(b), 2.0))
    integral = complex(integrate_oscillatory_s(spec, tol).value)
    norm = piece.normalization(delta) * cutoff
    mu = piece.frequency * r1 * r2
    h = norm * total ** decay * weight * quadratic_phase_integral(mu, b)

    return ModelKernels(integral, norm * integral, h, carrier)


class DyadicSplit(NamedTuple):
    kernel: KernelValue
    pieces: np.ndarray

    @property
    def residual(self) -> complex:
        return complex(self.kernel.value - self.pieces.sum())


def dyadic_kernel_pieces(params: KernelParams,
                         x: PolarPoint,
                         y: PolarPoint,
                         j_max: int,
                         tol: float = DEFAULT_TOL):
    """Split br_kernel(x, y) into beta_0 and beta(2^-j .) pieces of lambda |x - y|."""
    if j_max < 0:
        raise InvalidInputError("j_max must be nonnegative")
    kernel = br_kernel(params, x, y, tol)
    distance = params.lam * dist_geo(x.r, y.r, x.theta - y.theta)
    weights = np.array([bump0(distance)] + [bump(distance * 2.0 ** -j) for j in range(1, j_max + 1)])

    return DyadicSplit(kernel, weights * kernel.value)


class DifferenceBounds(NamedTuple):
    """Suprema of the cosh-denominator differences over an (s, b) grid."""

    value: float
    slope: float
    cosh_variation: float
    radial_variation: float


def default_s_grid(b_grid: Sequence[float] = (), points: int = 2001) -> np.ndarray:
    """Uniform grid on [0, 1] refined geometrically towards 0 down to the smallest |b|."""
    widths = [abs(b) for b in b_grid if b != 0]
    floor = min(widths + [1e-3]) / 16.0
    refined = np.geomspace(floor, 1.0, points // 2)
    return np.unique(np.concatenate([np.linspace(0.0, 1.0, points), refined]))


def _ratio_and_model(alpha: float, s: np.ndarray, b: float):
    """The cosh-denominator ratio of the l = 2 amplitude, its quadratic model and their s-derivatives."""
    b_sq = b * b
    numer = np.expm1(-s) + b_sq
    grow = np.sinh(alpha * s)
    denom = 2.0 * np.sinh(0.5 * s) ** 2 + b_sq
    model_num = (b_sq - s) * alpha * s
    model_den = 0.5 * s * s + b_sq
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = numer * grow / denom
        ratio_slope = ((-np.exp(-s) * grow + numer * alpha * np.cosh(alpha * s)) / denom
                       - numer * grow * np.sinh(s) / denom ** 2)
        model = model_num / model_den
        model_slope = ((-alpha * s + (b_sq - s) * alpha) / model_den - model_num * s / model_den ** 2)
    singular = (denom == 0) | (model_den == 0)
    # limits along s at s = 0, b = 0
    ratio = np.where(singular, -2.0 * alpha, ratio)
    model = np.where(singular, -2.0 * alpha, model)
    ratio_slope = np.where(singular, alpha, ratio_slope)
    model_slope = np.where(singular, 0.0, model_slope)
    return ratio, model, ratio_slope, model_slope


def difference_bounds(alpha: float,
                      s_grid: Sequence[float] = None,
                      b_grid: Sequence[float] = None,
                      delta: float = -0.5,
                      r1: float = 0.25,
                      r2: float = 0.25
                      ) -> DifferenceBounds:
    """Measure the three differences between the cosh-denominator amplitudes and their models.

    value / slope: sup of |f - f_model| and |d/ds (f - f_model)| for the l = 2 ratio.
    cosh_variation: sup over b of the total variation on [0, 1] of
        |n_s|^-decay (cosh(alpha s)/(cosh s - cos) - 1/(s^2/2 + b^2)).
    radial_variation: sup over b of the total variation on [0, 1] of
        (|n_s|^-decay - (r1+r2)^-decay) / (s^2/2 + b^2).
    """
    if abs(alpha) > 1:
        raise InvalidInputError("difference_bounds needs |alpha| <= 1")
    _check_delta(delta)
    b_grid = np.linspace(-math.sqrt(2.0), math.sqrt(2.0), 41) if b_grid is None else np.asarray(b_grid, float)
    # nodes within rounding of b = 0 are the singular node itself
    b_grid = np.where(np.abs(b_grid) < 1e-12, 0.0, b_grid)
    s_grid = default_s_grid(b_grid) if s_grid is None else np.unique(np.asarray(s_grid, float))
    if np.any(s_grid < 0):
        raise InvalidInputError("The s grid must be nonnegative")
    decay = 1.5 + delta
    unit = s_grid[s_grid <= 1.0]
    envelope = diffractive_distance(r1, r2, unit) ** -decay
    frozen = (r1 + r2) ** -decay
    value = slope = cosh_var = radial_var = 0.0
    for b in b_grid:
        ratio, model, ratio_slope, model_slope = _ratio_and_model(alpha, s_grid, float(b))
        value = max(value, float(np.max(np.abs(ratio - model))))
        slope = max(slope, float(np.max(np.abs(ratio_slope - model_slope))))
        b_sq = float(b) ** 2
        model_den = 0.5 * unit * unit + b_sq
        with np.errstate(divide="ignore", invalid="ignore"):
            gap = np.cosh(alpha * unit) / (2.0 * np.sinh(0.5 * unit) ** 2 + b_sq) - 1.0 / model_den
            radial = (envelope - frozen) / model_den
        # limits at s = 0, b = 0
        gap = np.where(model_den == 0, alpha * alpha - 1.0 / 6.0, gap)
        radial = np.where(model_den == 0, -decay * r1 * r2 * (r1 + r2) ** (-decay - 2.0), radial)
        cosh_var = max(cosh_var, float(np.abs(np.diff(envelope * gap)).sum()))
        radial_var = max(radial_var, float(np.abs(np.diff(radial)).sum()))

    return DifferenceBounds(value, slope, cosh_var, radial_var)


def lemma_sweep(ell: int,
                alpha: float,
                delta: float,
                radii: Sequence[float],
                angles: Sequence[float],
                levels: Sequence[int],
                tol: float = 1e-8) -> List[float]:
    """max over (r, dtheta) of |K_D^{l,j}| 2^{j(3/2+delta)} (1 + 2^j r1 r2)^(1/2) for each j."""
    constants = []
    for j in levels:
        worst = 0.0
        for r in radii:
            for angle in angles:
                value = kd_kernel(ell, alpha, r, r, angle, j, delta, tol=tol)
                scale = 2.0 ** (j * (1.5 + delta)) * math.sqrt(1.0 + 2.0 ** j * r * r)
                worst = max(worst, abs(value) * scale)
        constants.append(worst)
    return constants
