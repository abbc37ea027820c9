"""Gamma and Bessel J evaluation with attached error estimates.

J_nu is summed from its power series below CROSSOVER and from the Hankel
asymptotic expansion above it.  The expansion is written as

    J_nu(r) = r^(-1/2) * (h_plus(r) e^{ir} + h_minus(r) e^{-ir}),
    h_plus(r) = sum_k a^k_plus r^-k,     a^k_minus = conj(a^k_plus),

and the coefficients a^k_plus are exported for the leading-order kernels.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple, Union

import numpy as np

from .eval_method import EvalMethod
from .exceptions import DomainError, GammaPoleError, InvalidInputError, PreconditionError

CROSSOVER = 18.0
EPS = float(np.finfo(float).eps)
ORDER_RANGE = (-1.0, 3.0)
MAX_SERIES_TERMS = 400
MAX_ASYMPTOTIC_TERMS = 28
MAX_EXPANSION_TERMS = 8

LANCZOS_G = 7
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def sin_pi(x):
    """sin(pi x), exactly zero at integers."""
    x = np.asarray(x, dtype=float)
    reduced = x - 2.0 * np.round(0.5 * x)  # in [-1, 1]
    folded = np.where(np.abs(reduced) > 0.5, np.sign(reduced) - reduced, reduced)
    result = np.sin(math.pi * folded)
    return float(result) if result.ndim == 0 else result


def cos_pi(x):
    """cos(pi x), exactly zero at half-integers."""
    return sin_pi(np.asarray(x, dtype=float) + 0.5)


def gamma_fn(x: float) -> float:
    """Gamma function (Lanczos g=7 with reflection below 1/2)."""
    x = float(x)
    if not math.isfinite(x):
        raise InvalidInputError(f"Gamma argument must be finite, got {x}")
    if x <= 0 and x == math.floor(x):
        raise GammaPoleError(x, int(x))
    if x < 0.5:
        return math.pi / (sin_pi(x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = LANCZOS_COEFFICIENTS[0]
    for i, coef in enumerate(LANCZOS_COEFFICIENTS[1:], start=1):
        acc += coef / (x + i)
    t = x + LANCZOS_G + 0.5

    return math.sqrt(2.0 * math.pi) * math.exp((x + 0.5) * math.log(t) - t) * acc


@dataclass(frozen=True)
class BesselEval:
    """A single J_nu(r) value with its error bracket."""

    order: float
    argument: float
    value: float
    abs_error_estimate: float
    method: EvalMethod


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """The coefficients a^k_plus, a^k_minus of the Hankel expansion of J_nu."""

    order: float
    coeffs_plus: Tuple[complex, ...]
    coeffs_minus: Tuple[complex, ...]


class HankelExpansion(NamedTuple):
    value: float
    coeffs: AsymptoticCoefficients
    abs_error_estimate: float


def _check_order(nu: float):
    if not ORDER_RANGE[0] <= nu <= ORDER_RANGE[1]:
        raise InvalidInputError(f"Bessel order {nu} outside {ORDER_RANGE}")


def _first_regular_index(nu: float) -> int:
    """First series index m with nu + m + 1 not a Gamma pole."""
    if nu < 0 and nu == math.floor(nu):
        return int(-nu)
    return 0


def _power_series(nu: float, x: np.ndarray, scaled: bool):
    """Sum J_nu (or x^-nu J_nu when scaled) from its power series."""
    first = _first_regular_index(nu)
    half = 0.5 * x
    ratio = -(half * half)
    if scaled:
        lead = 2.0 ** (-nu - 2 * first) * x ** (2 * first)
    else:
        lead = half ** (nu + 2 * first)
    term = (-1.0) ** first * lead / (math.factorial(first) * gamma_fn(nu + first + 1))
    total = term.copy()
    magnitude = np.abs(term)
    peak = float(np.max(half, initial=0.0))
    index = first
    for _ in range(MAX_SERIES_TERMS):
        index += 1
        term = term * ratio / (index * (nu + index))
        total = total + term
        magnitude = magnitude + np.abs(term)
        if index > peak + 2 and np.all(np.abs(term) <= EPS * np.abs(total)):
            break

    return total, 4.0 * EPS * magnitude + np.abs(term)


def _asymptotic_coefficients(nu: float, count: int = MAX_ASYMPTOTIC_TERMS) -> np.ndarray:
    """a_k(nu) = prod_{i<=k} (4 nu^2 - (2i-1)^2) / (k! 8^k)."""
    coeffs = np.empty(count)
    coeffs[0] = 1.0
    mu = 4.0 * nu * nu
    for k in range(1, count):
        coeffs[k] = coeffs[k - 1] * (mu - (2 * k - 1) ** 2) / (8.0 * k)
    return coeffs


def _hankel_pq(nu: float, z: np.ndarray):
    """P + iQ = sum_k i^k a_k z^-k, truncated at the smallest term."""
    coeffs = _asymptotic_coefficients(nu)
    orders = np.arange(coeffs.size)
    terms = coeffs[None, :] / np.power(z[:, None], orders[None, :])
    mags = np.abs(terms)
    shrinking = np.concatenate(
        [np.ones((z.size, 1), dtype=bool), mags[:, 1:] <= mags[:, :-1]], axis=1
    )
    keep = np.cumprod(shrinking, axis=1).astype(bool)
    used = keep.sum(axis=1)
    omitted = mags[np.arange(z.size), np.minimum(used, coeffs.size - 1)]
    kept = np.where(keep, terms, 0.0)
    quarter = orders % 4
    p_part = kept[:, quarter == 0].sum(axis=1) - kept[:, quarter == 2].sum(axis=1)
    q_part = kept[:, quarter == 1].sum(axis=1) - kept[:, quarter == 3].sum(axis=1)

    return p_part, q_part, omitted


def _asymptotic(nu: float, z: np.ndarray):
    p_part, q_part, omitted = _hankel_pq(nu, z)
    chi = z - (0.5 * nu + 0.25) * math.pi
    envelope = np.sqrt(2.0 / (math.pi * z))
    value = envelope * (p_part * np.cos(chi) - q_part * np.sin(chi))
    return value, envelope * omitted + 4.0 * EPS * np.abs(value)


def _validate_arguments(nu: float, r) -> np.ndarray:
    _check_order(nu)
    r = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r)):
        raise DomainError("Bessel argument must be finite")
    if np.any(r < 0):
        raise DomainError("Bessel argument must be nonnegative")
    if nu < 0 and nu != math.floor(nu) and np.any(r == 0):
        raise DomainError(f"J_{nu}(0) is unbounded for negative non-integer order")
    return r


def bessel_j_array(nu: float, r) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized J_nu(r): (values, error estimates, asymptotic mask)."""
    r = _validate_arguments(nu, r)
    flat = r.ravel()
    values = np.empty(flat.shape)
    errors = np.empty(flat.shape)
    far = flat >= CROSSOVER
    if np.any(~far):
        values[~far], errors[~far] = _power_series(nu, flat[~far], scaled=False)
    if np.any(far):
        values[far], errors[far] = _asymptotic(nu, flat[far])
    errors = np.maximum(errors, np.finfo(float).tiny)

    return values.reshape(r.shape), errors.reshape(r.shape), far.reshape(r.shape)


def bessel_j(nu: float, r: float) -> BesselEval:
    """J_nu(r) for real order nu and r >= 0."""
    values, errors, far = bessel_j_array(nu, float(r))
    method = EvalMethod.ASYMPTOTIC if bool(far) else EvalMethod.SERIES

    return BesselEval(float(nu), float(r), float(values), float(errors), method)


def scaled_bessel(nu: float, z) -> Tuple[np.ndarray, np.ndarray]:
    """F_nu(z) = z^-nu J_nu(z), finite at z = 0 where it equals 1/(2^nu Gamma(nu+1))."""
    _check_order(nu)
    z = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z < 0):
        raise DomainError("Scaled Bessel argument must be finite and nonnegative")
    flat = z.ravel()
    values = np.empty(flat.shape)
    errors = np.empty(flat.shape)
    far = flat >= CROSSOVER
    if np.any(~far):
        values[~far], errors[~far] = _power_series(nu, flat[~far], scaled=True)
    if np.any(far):
        damp = flat[far] ** -nu
        raw, raw_err = _asymptotic(nu, flat[far])
        values[far] = damp * raw
        errors[far] = damp * raw_err

    return values.reshape(z.shape), errors.reshape(z.shape)


def hankel_amplitude(nu: float, z, sign: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """h_sign(z) with J_nu(z) = z^-1/2 (h_+(z) e^{iz} + h_-(z) e^{-iz}), z >= CROSSOVER."""
    _check_order(nu)
    z = np.asarray(z, dtype=float)
    if np.any(z < CROSSOVER):
        raise PreconditionError(f"Hankel amplitudes need arguments >= {CROSSOVER}")
    p_part, q_part, omitted = _hankel_pq(nu, z.ravel())
    phase = np.exp(-1j * (0.5 * nu + 0.25) * math.pi) / math.sqrt(2.0 * math.pi)
    amplitude = phase * (p_part + 1j * q_part)
    if sign < 0:
        amplitude = np.conj(amplitude)

    return amplitude.reshape(z.shape), (omitted / math.sqrt(2.0 * math.pi)).reshape(z.shape)


def expansion_coefficients(nu: float, terms: int) -> AsymptoticCoefficients:
    """The first `terms` coefficients a^k_plus / a^k_minus."""
    _check_order(nu)
    a_k = _asymptotic_coefficients(nu, max(terms, 1))
    phase = np.exp(-1j * (0.5 * nu + 0.25) * math.pi) / math.sqrt(2.0 * math.pi)
    plus = tuple(complex(phase * (1j ** k) * a_k[k]) for k in range(terms))
    minus = tuple(c.conjugate() for c in plus)

    return AsymptoticCoefficients(float(nu), plus, minus)


def hankel_expansion(nu: float, r: float, terms: int) -> HankelExpansion:
    """Truncated two-exponential expansion of J_nu(r) with `terms` terms."""
    if not 1 <= int(terms) <= MAX_EXPANSION_TERMS:
        raise InvalidInputError(f"terms must be between 1 and {MAX_EXPANSION_TERMS}")
    if r < CROSSOVER:
        raise PreconditionError(f"Asymptotic regime starts at r = {CROSSOVER}, got {r}")
    coeffs = expansion_coefficients(nu, int(terms) + 1)
    carrier = complex(math.cos(r), math.sin(r))
    value = math.fsum(
        2.0 * (coeffs.coeffs_plus[k] * carrier).real * r ** (-k - 0.5) for k in range(int(terms))
    )
    omitted = 2.0 * abs(coeffs.coeffs_plus[int(terms)]) * r ** (-int(terms) - 0.5)
    kept = AsymptoticCoefficients(
        coeffs.order, coeffs.coeffs_plus[:int(terms)], coeffs.coeffs_minus[:int(terms)]
    )

    return HankelExpansion(value, kept, omitted)
