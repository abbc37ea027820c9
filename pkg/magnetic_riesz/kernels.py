"""Schwartz kernels of the spectral measure and of the Bochner-Riesz means.

Every kernel splits into a geometric part, carried by A_alpha and the straight
line distance |x - y|, and a diffractive part, an s-integral against B_alpha
along the diffractive distance |n_s|.  The flux enters in two ways:

  * a diagonal gauge factor exp(i(G(theta2) - G(theta1))), G = Phi - alpha*theta,
    which is shared by both parts;
  * a reduced kernel that only depends on r1, r2 and theta1 - theta2.

The reduced kernel is what `kernel_row` samples for the polar operator.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from .exceptions import InvalidInputError, SingularInputError
from .geometry import (
    TWO_PI,
    FluxProfile,
    PolarPoint,
    diffractive_distance,
    dist_geo,
    normalize_angle,
    phase_integral,
)
from .quadrature import DEFAULT_MAX_EVALUATIONS, OscillatorySpec, integrate_adaptive, integrate_oscillatory_s
from .specialfn import CROSSOVER, expansion_coefficients, hankel_amplitude, scaled_bessel, sin_pi

log = logging.getLogger("processor")

FOUR_PI_SQ = 4.0 * math.pi * math.pi
DELTA_RANGE = (-1.5, 2.0)
DEFAULT_TOL = 1e-10
PEAK_FLOOR = 1e-12
LARGE_S = 20.0

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class KernelParams:
    """Order delta, frequency lambda and flux profile of a Bochner-Riesz kernel."""

    delta: float
    lam: float
    profile: FluxProfile = field(default_factory=lambda: FluxProfile.constant(0.0))

    def __post_init__(self):
        if not math.isfinite(self.delta) or not DELTA_RANGE[0] < self.delta <= DELTA_RANGE[1]:
            raise InvalidInputError(f"delta must lie in ({DELTA_RANGE[0]}, {DELTA_RANGE[1]}], got {self.delta}")
        if not math.isfinite(self.lam) or self.lam <= 0:
            raise InvalidInputError(f"lambda must be positive, got {self.lam}")
        if isinstance(self.profile, (int, float)):
            object.__setattr__(self, "profile", FluxProfile.constant(float(self.profile)))

    @property
    def alpha(self) -> float:
        return self.profile.alpha

    @property
    def order(self) -> float:
        """Bessel order 1 + delta of the radial profile."""
        return 1.0 + self.delta

    @property
    def decay(self) -> float:
        """Exponent of the far-field decay (1 + lambda |x-y|)^-(3/2 + delta)."""
        return 1.5 + self.delta

    @property
    def prefactor(self) -> float:
        return self.lam ** 2 * math.pi ** (-self.delta) * TWO_PI ** (1.0 + self.delta)

    def rescaled(self, lam: float) -> "KernelParams":
        return KernelParams(self.delta, lam, self.profile)


@dataclass(frozen=True)
class KernelValue:
    """A kernel value as the exact sum of its geometric and diffractive parts."""

    geometric: complex
    diffractive: complex
    abs_error_estimate: float
    converged: bool = True

    @property
    def value(self) -> complex:
        return self.geometric + self.diffractive

    @property
    def parts(self) -> Tuple[complex, complex]:
        return self.geometric, self.diffractive


def flux_split(alpha: float) -> Tuple[int, float]:
    """alpha = m + alpha0 with m = trunc(alpha), |alpha0| < 1."""
    whole = int(math.trunc(alpha))
    return whole, alpha - whole


def is_integer_flux(alpha: float) -> bool:
    return float(alpha) == round(float(alpha))


def b_tail_rate(alpha: float) -> float:
    """Exponential decay rate of B_alpha in s."""
    _, alpha0 = flux_split(alpha)
    return min(abs(alpha0), 1.0 - abs(alpha0))


def shifted_angle(dtheta: ArrayLike) -> np.ndarray:
    """dtheta + pi folded onto [-pi, pi], exact at dtheta = +-pi."""
    shifted = np.asarray(dtheta, dtype=float) + math.pi
    return shifted - TWO_PI * np.round(shifted / TWO_PI)


def branch_factor(alpha: float, dtheta: ArrayLike) -> np.ndarray:
    """Indicator branches of A_alpha on dtheta = theta1 - theta2 in (-2 pi, 2 pi)."""
    dtheta = np.asarray(dtheta, dtype=float)
    outer_plus = complex(math.cos(TWO_PI * alpha), math.sin(TWO_PI * alpha))
    return np.where(dtheta > math.pi, outer_plus,
                    np.where(dtheta < -math.pi, outer_plus.conjugate(), 1.0 + 0.0j))


def a_alpha(profile: FluxProfile, theta1: ArrayLike, theta2: ArrayLike) -> ArrayLike:
    """A_alpha(theta1, theta2): the geometric amplitude, |value| = 1/(4 pi^2)."""
    t1 = np.asarray(normalize_angle(theta1), dtype=float)
    t2 = np.asarray(normalize_angle(theta2), dtype=float)
    phase = np.exp(1j * np.asarray(phase_integral(profile, t1, t2)))
    result = phase * branch_factor(profile.alpha, t1 - t2) / FOUR_PI_SQ
    return complex(result) if np.ndim(result) == 0 else result


def reduced_a(alpha: float, dtheta: ArrayLike, cut_average: bool = False) -> np.ndarray:
    """Gauge-free A_alpha as a 2 pi-periodic function of the angle difference.

    On the cut |dtheta| = pi the value is the [0, pi] branch, or with
    cut_average the mean of both one-sided limits.
    """
    dtheta = np.asarray(dtheta, dtype=float)
    wrapped = dtheta - TWO_PI * np.round(dtheta / TWO_PI)
    result = np.exp(-1j * alpha * wrapped) / FOUR_PI_SQ
    if cut_average:
        on_cut = np.isclose(np.abs(wrapped), math.pi, rtol=0.0, atol=1e-13)
        result = np.where(on_cut, math.cos(math.pi * alpha) / FOUR_PI_SQ + 0.0j, result)
    return result


def cosh_ratios(alpha: float, s: np.ndarray, shifted: np.ndarray):
    """sinh(alpha s)/D and cosh(alpha s)/D with D = cosh s - cos(shifted).

    Rows follow s and columns the shifted angle.  The third output flags the
    0/0 point s = 0, shifted = 0 where both ratios are left at zero.
    """
    s = np.asarray(s, dtype=float).reshape(-1, 1)
    shifted = np.asarray(shifted, dtype=float).reshape(1, -1)
    near = s < LARGE_S
    s_near = np.where(near, s, 0.0)
    half = np.sinh(0.5 * s_near)
    denominator = 2.0 * half * half + 2.0 * np.sin(0.5 * shifted) ** 2
    singular = denominator == 0.0
    safe = np.where(singular, 1.0, denominator)
    sinh_near = np.where(singular, 0.0, np.sinh(alpha * s_near) / safe)
    cosh_near = np.where(singular, 0.0, np.cosh(alpha * s_near) / safe)
    # far branch: numerator and denominator multiplied by 2 exp(-s)
    s_far = np.where(near, LARGE_S, s)
    grow = np.exp((alpha - 1.0) * s_far)
    fade = np.exp(-(alpha + 1.0) * s_far)
    scaled = 1.0 + np.exp(-2.0 * s_far) - 2.0 * np.cos(shifted) * np.exp(-s_far)

    return (np.where(near, sinh_near, (grow - fade) / scaled),
            np.where(near, cosh_near, (grow + fade) / scaled),
            singular)


def _b_reduced(alpha0: float, s: np.ndarray, dtheta: np.ndarray) -> np.ndarray:
    """B for constant flux alpha0 in (-1, 1) on the grid s x dtheta, shape (len(s), len(dtheta))."""
    s = np.asarray(s, dtype=float).reshape(-1, 1)
    shifted = shifted_angle(np.asarray(dtheta, dtype=float).reshape(1, -1))
    b_sq = 2.0 * np.sin(0.5 * shifted) ** 2
    sinh_ratio, cosh_ratio, singular = cosh_ratios(alpha0, s, shifted)
    ratio = (np.expm1(-s) + b_sq) * sinh_ratio - 1j * np.sin(shifted) * cosh_ratio
    # limit of the bracket along s at s = 0, shifted = 0
    ratio = np.where(singular, -2.0 * alpha0 + 0.0j, ratio)
    total = sin_pi(abs(alpha0)) * np.exp(-abs(alpha0) * s) + sin_pi(alpha0) * ratio

    return -total / FOUR_PI_SQ


def reduced_b(alpha: float, s: ArrayLike, dtheta: ArrayLike) -> np.ndarray:
    """Gauge-free B_alpha, vectorized over s (rows) and dtheta (columns)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    dtheta = np.atleast_1d(np.asarray(dtheta, dtype=float))
    if is_integer_flux(alpha):
        return np.zeros((s.size, dtheta.size), dtype=complex)
    whole, alpha0 = flux_split(alpha)
    values = _b_reduced(alpha0, s, dtheta)
    if whole:
        values = values * np.exp(-1j * whole * dtheta)[None, :]
    return values


def gauge_factor(profile: FluxProfile, theta1: ArrayLike, theta2: ArrayLike) -> ArrayLike:
    """exp(i(G(theta2) - G(theta1))) with G the periodic part of Phi."""
    t1 = np.asarray(normalize_angle(theta1), dtype=float)
    t2 = np.asarray(normalize_angle(theta2), dtype=float)
    if profile.is_constant:
        result = np.ones(np.broadcast(t1, t2).shape, dtype=complex)
    else:
        result = np.exp(1j * (np.asarray(profile.gauge_phase(t2)) - np.asarray(profile.gauge_phase(t1))))
    return complex(result) if np.ndim(result) == 0 else result


def b_alpha(profile: FluxProfile, s: ArrayLike, theta1: float, theta2: float) -> ArrayLike:
    """B_alpha(s; theta1, theta2), the diffractive amplitude; zero for integer flux."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise InvalidInputError("B_alpha is defined for s >= 0")
    t1, t2 = normalize_angle(theta1), normalize_angle(theta2)
    values = reduced_b(profile.alpha, s_arr.ravel(), np.array([t1 - t2]))[:, 0]
    values = values * gauge_factor(profile, t1, t2)
    if s_arr.ndim == 0:
        return complex(values[0])
    return values.reshape(s_arr.shape)


def _crossover_parameter(lam: float, r1: float, r2: float) -> float:
    """The s with lam |n_s| = CROSSOVER, or 0 when lam (r1 + r2) is already past it."""
    reach = CROSSOVER / lam
    excess = reach * reach - (r1 + r2) ** 2
    if excess <= 0:
        return 0.0
    return 2.0 * math.asinh(math.sqrt(excess / (4.0 * r1 * r2)))


def peak_width(dthetas: ArrayLike):
    """Smallest nonzero |b| over the angle differences, None when every b vanishes."""
    widths = np.abs(math.sqrt(2.0) * np.sin(0.5 * shifted_angle(np.atleast_1d(dthetas))))
    widths = widths[widths > 0]
    if widths.size == 0:
        return None
    return min(float(widths.min()), 2.0)


def _peak_points(dthetas: np.ndarray, upper: float) -> list:
    width = peak_width(dthetas)
    floor = max(width, PEAK_FLOOR) / 8.0 if width else 0.125
    points, point = [], min(1.0, upper)
    while point > floor:
        points.append(point)
        point *= 0.5
    return points


def diffractive_integral(nu: float,
                          lam: float,
                          r1: float,
                          r2: float,
                          alpha: float,
                          dthetas: ArrayLike,
                          tol: float = DEFAULT_TOL,
                          max_evaluations: int = DEFAULT_MAX_EVALUATIONS
                          ) -> Tuple[np.ndarray, np.ndarray, bool]:
    """int_0^inf F_nu(lam |n_s|) B_alpha(s, dtheta) ds for every dtheta, gauge-free.

    Below the Bessel crossover the integrand is integrated adaptively; above it
    F_nu is split into its two Hankel waves, each integrated by the oscillatory
    rule.
    """
    dthetas = np.atleast_1d(np.asarray(dthetas, dtype=float))
    if is_integer_flux(alpha):
        zeros = np.zeros(dthetas.size)
        return zeros.astype(complex), zeros, True
    split = _crossover_parameter(lam, r1, r2)
    rate = b_tail_rate(alpha) + 0.5 * (nu + 0.5)
    total = np.zeros(dthetas.size, dtype=complex)
    error = np.zeros(dthetas.size)
    converged = True
    pieces = 3 if split > 0 else 2
    share = tol / pieces

    if split > 0:
        def near(s):
            radial, _ = scaled_bessel(nu, lam * diffractive_distance(r1, r2, s))
            return radial[:, None] * reduced_b(alpha, s, dthetas)

        result = integrate_adaptive(near, 0.0, split, share, _peak_points(dthetas, split), max_evaluations)
        total += result.value
        error += result.abs_error_estimate
        converged &= result.converged

    peak = peak_width(dthetas) if split == 0 else None
    for sign in (1, -1):
        def wave(s, sign=sign):
            z = np.maximum(lam * diffractive_distance(r1, r2, s), CROSSOVER)
            amplitude, _ = hankel_amplitude(nu, z, sign)
            return (z ** (-nu - 0.5) * amplitude)[:, None] * reduced_b(alpha, s, dthetas)

        spec = OscillatorySpec(lam, r1, r2, wave, rate, peak_width=peak,
                               phase_sign=sign, lower=split)
        result = integrate_oscillatory_s(spec, share, max_evaluations=max_evaluations)
        total += result.value
        error += result.abs_error_estimate
        converged &= result.converged
    if not converged:
        log.warning("Diffractive integral not converged at r1=%g r2=%g (error %.2e)", r1, r2, error.max())

    return total, error, bool(converged)


def _check_point(point: PolarPoint):
    if point.r <= 0:
        raise InvalidInputError("Kernel points must be off the origin")


def spectral_measure_kernel(params: KernelParams,
                            x: PolarPoint,
                            y: PolarPoint,
                            tol: float = DEFAULT_TOL
                            ) -> KernelValue:
    """Kernel of the spectral measure dE(lambda) of the magnetic Schroedinger operator."""
    _check_point(x)
    _check_point(y)
    lam = params.lam
    distance = dist_geo(x.r, y.r, x.theta - y.theta)
    radial, radial_err = scaled_bessel(0.0, lam * distance)
    amplitude = a_alpha(params.profile, x.theta, y.theta)
    geometric = 2.0 * lam * float(radial) * amplitude
    integral, errors, converged = diffractive_integral(
        0.0, lam, x.r, y.r, params.alpha, x.theta - y.theta, tol
    )
    diffractive = 2.0 * lam * gauge_factor(params.profile, x.theta, y.theta) * complex(integral[0])
    error = 2.0 * lam * (float(radial_err) / FOUR_PI_SQ + float(errors[0]))

    return KernelValue(complex(geometric), complex(diffractive), error, converged)


def br_kernel(params: KernelParams,
              x: PolarPoint,
              y: PolarPoint,
              tol: float = DEFAULT_TOL
              ) -> KernelValue:
    """Kernel of the Bochner-Riesz mean of order delta at frequency lambda."""
    _check_point(x)
    _check_point(y)
    if x.r == y.r and x.theta == y.theta:
        raise SingularInputError("The Bochner-Riesz kernel is not evaluated at x = y")
    pref = params.prefactor
    nu = params.order
    distance = dist_geo(x.r, y.r, x.theta - y.theta)
    radial, radial_err = scaled_bessel(nu, params.lam * distance)
    geometric = pref * float(radial) * a_alpha(params.profile, x.theta, y.theta)
    integral, errors, converged = diffractive_integral(
        nu, params.lam, x.r, y.r, params.alpha, x.theta - y.theta, tol
    )
    diffractive = pref * gauge_factor(params.profile, x.theta, y.theta) * complex(integral[0])
    error = pref * (float(radial_err) / FOUR_PI_SQ + float(errors[0]))

    return KernelValue(complex(geometric), complex(diffractive), error, converged)


def leading_kernels(params: KernelParams,
                    sign: int,
                    x: PolarPoint,
                    y: PolarPoint,
                    part: str = None,
                    tol: float = DEFAULT_TOL
                    ) -> complex:
    """Leading-order wave G^sign + D^sign of the Bochner-Riesz kernel.

    The radial profile is replaced by its first Hankel term
    a_sign exp(sign i z) (1 + z)^-(3/2 + delta); part selects "geometric" or
    "diffractive" alone.
    """
    if sign not in (1, -1):
        raise InvalidInputError("sign must be +1 or -1")
    if part not in (None, "geometric", "diffractive"):
        raise InvalidInputError(f"Unknown kernel part {part!r}")
    _check_point(x)
    _check_point(y)
    if x.r == y.r and x.theta == y.theta:
        raise SingularInputError("The leading kernels are not evaluated at x = y")
    coefficient = expansion_coefficients(params.order, 1).coeffs_plus[0]
    if sign < 0:
        coefficient = coefficient.conjugate()
    lam, decay, pref = params.lam, params.decay, params.prefactor
    total = 0.0 + 0.0j
    if part in (None, "geometric"):
        z = lam * dist_geo(x.r, y.r, x.theta - y.theta)
        wave = complex(math.cos(sign * z), math.sin(sign * z)) * (1.0 + z) ** -decay
        total += pref * coefficient * wave * a_alpha(params.profile, x.theta, y.theta)
    if part in (None, "diffractive") and not is_integer_flux(params.alpha):
        dtheta = np.array([x.theta - y.theta])

        def amplitude(s):
            envelope = (1.0 + lam * diffractive_distance(x.r, y.r, s)) ** -decay
            return (envelope[:, None] * reduced_b(params.alpha, s, dtheta))[:, 0]

        spec = OscillatorySpec(lam, x.r, y.r, amplitude, b_tail_rate(params.alpha) + 0.5 * decay,
                               peak_width=peak_width(dtheta), phase_sign=sign)
        result = integrate_oscillatory_s(spec, tol)
        total += pref * coefficient * gauge_factor(params.profile, x.theta, y.theta) * complex(result.value)

    return complex(total)


def kernel_row(params: KernelParams,
               r1: float,
               r2: float,
               n_theta: int,
               tol: float = DEFAULT_TOL,
               max_evaluations: int = DEFAULT_MAX_EVALUATIONS
               ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauge-free kernel on dtheta = 2 pi k / n_theta: (geometric row, diffractive row, error row).

    The branch cut dtheta = pi uses the average of both sides so that the row
    satisfies row[-k] = conj(row[k]).  At r1 = r2, dtheta = 0 the radial
    profile takes its finite limit.
    """
    if r1 <= 0 or r2 <= 0:
        raise InvalidInputError("Kernel rows need positive radii")
    pref = params.prefactor
    nu = params.order
    dthetas = TWO_PI * np.arange(n_theta) / n_theta
    distances = dist_geo(r1, r2, dthetas)
    radial, radial_err = scaled_bessel(nu, params.lam * distances)
    geometric = pref * radial * reduced_a(params.alpha, dthetas, cut_average=True)
    errors = pref * radial_err / FOUR_PI_SQ
    half = n_theta // 2 + 1
    integral, diff_err, _ = diffractive_integral(
        nu, params.lam, r1, r2, params.alpha, dthetas[:half], tol, max_evaluations
    )
    diffractive = np.empty(n_theta, dtype=complex)
    diffractive[:half] = integral
    mirror = np.arange(half, n_theta)
    diffractive[mirror] = np.conj(integral[n_theta - mirror])
    diffractive *= pref
    full_err = np.empty(n_theta)
    full_err[:half] = diff_err
    full_err[mirror] = diff_err[n_theta - mirror]

    return geometric, diffractive, errors + pref * full_err
