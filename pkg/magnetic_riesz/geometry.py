"""Polar coordinates, magnetic flux profiles and the diffractive phase |n_s|.

The flux profile A(theta) is stored through its uniform samples.  Its
trigonometric interpolant is integrated in closed form, so the antiderivative
Phi is exact for trigonometric polynomials and satisfies Phi(2 pi) = 2 pi alpha.
"""
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence, Union

import numpy as np

from .exceptions import DomainError, InvalidInputError

TWO_PI = 2.0 * math.pi
MORSE_STEP = 1e-6

ArrayLike = Union[float, np.ndarray]


def normalize_angle(theta: ArrayLike) -> ArrayLike:
    """Map angles onto [0, 2 pi)."""
    wrapped = np.mod(theta, TWO_PI)
    # np.mod can round tiny negative inputs up to exactly 2 pi
    wrapped = np.where(wrapped >= TWO_PI, 0.0, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def flux_alpha(profile_samples: Sequence[float]) -> float:
    """Return the mean of A over the circle (periodic trapezoid rule)."""
    samples = np.asarray(profile_samples, dtype=float).ravel()
    if samples.size == 0:
        raise InvalidInputError("At least one flux sample is required")
    if not np.all(np.isfinite(samples)):
        raise InvalidInputError("Flux samples must be finite")

    return math.fsum(samples) / samples.size


@dataclass(frozen=True, eq=False)
class FluxProfile:
    """Angular magnetic potential A(theta), its antiderivative Phi and the flux alpha."""

    samples: np.ndarray
    alpha: float = field(init=False)
    cos_coefficients: np.ndarray = field(init=False, repr=False)
    sin_coefficients: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float).ravel()
        if samples.size == 0:
            raise InvalidInputError("At least one flux sample is required")
        if not np.all(np.isfinite(samples)):
            raise InvalidInputError("Flux samples must be finite")
        samples.setflags(write=False)
        count = samples.size
        spectrum = np.fft.rfft(samples) / count
        cos_part = 2.0 * spectrum[1:].real
        sin_part = -2.0 * spectrum[1:].imag
        if count % 2 == 0 and count > 1:
            # the Nyquist mode is its own conjugate
            cos_part[-1] = spectrum[-1].real
            sin_part[-1] = 0.0
        cos_part.setflags(write=False)
        sin_part.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "alpha", flux_alpha(samples))
        object.__setattr__(self, "cos_coefficients", cos_part)
        object.__setattr__(self, "sin_coefficients", sin_part)

    # Constructors
    @classmethod
    def constant(cls, alpha: float) -> "FluxProfile":
        """A(theta) identically equal to alpha."""
        return cls(np.array([float(alpha)]))

    @classmethod
    def from_samples(cls, samples: Sequence[float]) -> "FluxProfile":
        return cls(np.asarray(samples, dtype=float))

    @classmethod
    def from_coefficients(cls,
                          mean: float,
                          cos_coefficients: Sequence[float] = (),
                          sin_coefficients: Sequence[float] = (),
                          n_samples: int = None
                          ) -> "FluxProfile":
        """A(theta) = mean + sum_k c_k cos(k theta) + s_k sin(k theta)."""
        cos_c = np.asarray(cos_coefficients, dtype=float).ravel()
        sin_c = np.asarray(sin_coefficients, dtype=float).ravel()
        order = max(cos_c.size, sin_c.size)
        count = int(n_samples or max(64, 4 * (order + 1)))
        if count <= 2 * order:
            raise InvalidInputError(
                f"{count} samples cannot represent a profile of degree {order}"
            )
        theta = TWO_PI * np.arange(count) / count
        values = np.full(count, float(mean))
        for k, coef in enumerate(cos_c, start=1):
            values += coef * np.cos(k * theta)
        for k, coef in enumerate(sin_c, start=1):
            values += coef * np.sin(k * theta)

        return cls(values)

    @classmethod
    def from_csv(cls, path: Union[str, Path], n_samples: int = None) -> "FluxProfile":
        """Read a two column (theta, value) table and resample it periodically."""
        thetas, values = [], []
        with open(path, newline="", encoding="utf-8") as handle:
            for row in csv.reader(handle):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    thetas.append(float(row[0]))
                    values.append(float(row[1]))
                except (ValueError, IndexError) as err:
                    if not thetas:
                        # header line
                        continue
                    raise InvalidInputError(f"Malformed flux row {row!r} in {path}") from err
        if not thetas:
            raise InvalidInputError(f"No flux samples found in {path}")
        theta = np.asarray(thetas)
        if theta[0] < 0 or theta[-1] >= TWO_PI or np.any(np.diff(theta) <= 0):
            raise InvalidInputError("Flux file angles must be strictly increasing in [0, 2pi)")
        count = int(n_samples or theta.size)
        grid = TWO_PI * np.arange(count) / count
        resampled = np.interp(grid, theta, np.asarray(values), period=TWO_PI)

        return cls(resampled)

    # Evaluation
    @property
    def degree(self) -> int:
        return self.cos_coefficients.size

    @property
    def is_constant(self) -> bool:
        return not (np.any(self.cos_coefficients) or np.any(self.sin_coefficients))

    def _harmonics(self, theta: np.ndarray):
        orders = np.arange(1, self.degree + 1)
        return orders, np.multiply.outer(theta, orders)

    def evaluate(self, theta: ArrayLike) -> ArrayLike:
        """A(theta), periodic in theta."""
        angle = np.asarray(normalize_angle(theta), dtype=float)
        result = np.full(angle.shape, self.alpha)
        if not self.is_constant:
            _, phase = self._harmonics(angle)
            result = result + np.cos(phase) @ self.cos_coefficients + np.sin(phase) @ self.sin_coefficients
        return float(result) if result.ndim == 0 else result

    def gauge_phase(self, theta: ArrayLike) -> ArrayLike:
        """The periodic part Phi(theta) - alpha*theta of the antiderivative."""
        angle = np.asarray(theta, dtype=float)
        result = np.zeros(angle.shape)
        if not self.is_constant:
            orders, phase = self._harmonics(angle)
            result = (np.sin(phase) @ (self.cos_coefficients / orders)
                      + (1.0 - np.cos(phase)) @ (self.sin_coefficients / orders))
        return float(result) if result.ndim == 0 else result

    def antiderivative(self, theta: ArrayLike) -> ArrayLike:
        """Phi(theta) = integral of A from 0 to theta (no wrapping applied)."""
        angle = np.asarray(theta, dtype=float)
        result = self.alpha * angle + self.gauge_phase(angle)
        return float(result) if np.ndim(result) == 0 else result

    def with_gauge(self,
                   cos_coefficients: Sequence[float] = (),
                   sin_coefficients: Sequence[float] = ()
                   ) -> "FluxProfile":
        """Return A + g' for g = sum_k c_k cos(k theta) + s_k sin(k theta)."""
        g_cos = np.asarray(cos_coefficients, dtype=float).ravel()
        g_sin = np.asarray(sin_coefficients, dtype=float).ravel()
        order = max(self.degree, g_cos.size, g_sin.size)
        new_cos = np.zeros(order)
        new_sin = np.zeros(order)
        new_cos[:self.degree] += self.cos_coefficients
        new_sin[:self.degree] += self.sin_coefficients
        ks = np.arange(1, order + 1)
        new_cos[:g_sin.size] += ks[:g_sin.size] * g_sin
        new_sin[:g_cos.size] -= ks[:g_cos.size] * g_cos
        count = max(self.samples.size, 4 * (order + 1))

        return FluxProfile.from_coefficients(self.alpha, new_cos, new_sin, count)

    def cache_key(self) -> tuple:
        return (self.alpha, self.cos_coefficients.tobytes(), self.sin_coefficients.tobytes())


@dataclass(frozen=True)
class PolarPoint:
    """A point of the plane in polar coordinates."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0:
            raise InvalidInputError(f"Radius must be nonnegative, got {self.r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    def to_cartesian(self):
        return (self.r * math.cos(self.theta), self.r * math.sin(self.theta))

    def scaled(self, factor: float) -> "PolarPoint":
        return PolarPoint(self.r * factor, self.theta)


def phase_integral(profile: FluxProfile, theta1: ArrayLike, theta2: ArrayLike) -> ArrayLike:
    """Signed integral of A from theta1 to theta2 on the chart [0, 2 pi)."""
    return (profile.antiderivative(normalize_angle(theta2))
            - profile.antiderivative(normalize_angle(theta1)))


def _check_radii(*radii, strict: bool = False):
    for radius in radii:
        values = np.asarray(radius, dtype=float)
        if np.any(~np.isfinite(values)):
            raise InvalidInputError("Radii must be finite")
        if strict and np.any(values <= 0):
            raise InvalidInputError("Radii must be positive")
        if np.any(values < 0):
            raise InvalidInputError("Radii must be nonnegative")


def dist_geo(r1: ArrayLike, r2: ArrayLike, dtheta: ArrayLike) -> ArrayLike:
    """Euclidean distance |x - y| between (r1, theta1) and (r2, theta2)."""
    _check_radii(r1, r2)
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    half = np.sin(0.5 * np.asarray(dtheta, dtype=float))
    # cancellation-free form of r1^2 + r2^2 - 2 r1 r2 cos(dtheta)
    result = np.sqrt((r1 - r2) ** 2 + 4.0 * r1 * r2 * half * half)
    return float(result) if result.ndim == 0 else result


class DiffractivePhaseState(NamedTuple):
    """|n_s| and its first two s-derivatives."""

    r1: ArrayLike
    r2: ArrayLike
    s: ArrayLike
    value: ArrayLike
    d1: ArrayLike
    d2: ArrayLike


def diffractive_distance(r1: ArrayLike, r2: ArrayLike, s: ArrayLike) -> np.ndarray:
    """|n_s| = sqrt(r1^2 + r2^2 + 2 r1 r2 cosh s), unvalidated and vectorized."""
    half = np.sinh(0.5 * np.asarray(s, dtype=float))
    return np.sqrt((r1 + r2) ** 2 + 4.0 * r1 * r2 * half * half)


def diffractive_slope(r1: ArrayLike, r2: ArrayLike, s: ArrayLike) -> np.ndarray:
    """d/ds |n_s|, unvalidated and vectorized."""
    s = np.asarray(s, dtype=float)
    return r1 * r2 * np.sinh(s) / diffractive_distance(r1, r2, s)


def dist_diff(r1: ArrayLike, r2: ArrayLike, s: ArrayLike) -> DiffractivePhaseState:
    """Diffractive distance |n_s| with its first and second s-derivatives."""
    _check_radii(r1, r2, strict=True)
    s_arr = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(s_arr)) or np.any(s_arr < 0):
        raise InvalidInputError("The diffractive parameter s must be nonnegative")
    product = np.asarray(r1, dtype=float) * np.asarray(r2, dtype=float)
    value = diffractive_distance(r1, r2, s_arr)
    sinh_s = np.sinh(s_arr)
    d1 = product * sinh_s / value
    d2 = product * np.cosh(s_arr) / value - (product * sinh_s) ** 2 / value ** 3
    if np.ndim(value) == 0:
        return DiffractivePhaseState(float(r1), float(r2), float(s_arr), float(value), float(d1), float(d2))

    return DiffractivePhaseState(r1, r2, s_arr, value, d1, d2)


def b_param(dtheta: ArrayLike) -> ArrayLike:
    """b = sqrt(2) sin((dtheta + pi)/2), the width of the cosh-denominator peak."""
    result = math.sqrt(2.0) * np.sin(0.5 * (np.asarray(dtheta, dtype=float) + math.pi))
    return float(result) if np.ndim(result) == 0 else result


def _sinhc(x: np.ndarray) -> np.ndarray:
    safe = np.where(x == 0, 1.0, x)
    return np.where(x == 0, 1.0, np.sinh(safe) / safe)


def morse_g(r1: float, r2: float, s: ArrayLike) -> ArrayLike:
    """g(s) = 2 phi_bar(s) / s^2 with phi_bar = (|n_s| - r1 - r2)/(r1 r2); g(0) = 1/(r1+r2)."""
    s = np.asarray(s, dtype=float)
    value = diffractive_distance(r1, r2, s)
    return 2.0 * _sinhc(0.5 * s) ** 2 / (value + r1 + r2)


def _s_tilde(r1: float, r2: float, s: ArrayLike) -> np.ndarray:
    # odd extension, g is even in s
    s = np.asarray(s, dtype=float)
    return np.sqrt(morse_g(r1, r2, np.abs(s))) * s


class MorseChange(NamedTuple):
    s_tilde: float
    jacobian: float


def morse_change(r1: float, r2: float, s: float) -> MorseChange:
    """Morse variable s_tilde = |g(s)|^(1/2) s and the jacobian ds/ds_tilde."""
    _check_radii(r1, r2, strict=True)
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"The Morse change is only applied on [0, 1], got s={s}")
    s_tilde = float(_s_tilde(r1, r2, s))
    if s == 0.0:
        return MorseChange(0.0, math.sqrt(r1 + r2))
    step = MORSE_STEP * max(1.0, s)
    derivative = float(_s_tilde(r1, r2, s + step) - _s_tilde(r1, r2, s - step)) / (2.0 * step)

    return MorseChange(s_tilde, 1.0 / derivative)
