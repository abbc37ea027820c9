import math

import mpmath
import numpy as np
import pytest

from magnetic_riesz import (
    DomainError,
    EvalMethod,
    GammaPoleError,
    InvalidInputError,
    PreconditionError,
    bessel_j,
    bessel_j_array,
    gamma_fn,
    hankel_amplitude,
    hankel_expansion,
    scaled_bessel
)
from magnetic_riesz.specialfn import CROSSOVER

ORDERS = (-0.5, 0.0, 0.25, 1.0, 2.5)
ARGUMENTS = (0.1, 1.0, 5.0, 17.9, 18.0, 25.0, 100.0)


def test_gamma_values():
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-13)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert gamma_fn(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-13)
    assert gamma_fn(3.7) == pytest.approx(float(mpmath.gamma(3.7)), rel=1e-13)


def test_gamma_poles():
    for pole in (0.0, -1.0, -3.0):
        with pytest.raises(GammaPoleError):
            gamma_fn(pole)
    with pytest.raises(InvalidInputError):
        gamma_fn(float("inf"))


@pytest.mark.parametrize("nu", ORDERS)
def test_bessel_against_mpmath(nu):
    for r in ARGUMENTS:
        result = bessel_j(nu, r)
        reference = float(mpmath.besselj(nu, r))
        assert abs(result.value - reference) <= 10.0 * result.abs_error_estimate + 1e-14, (nu, r)
        assert abs(result.value - reference) < 1e-7, (nu, r)
        expected = EvalMethod.ASYMPTOTIC if r >= CROSSOVER else EvalMethod.SERIES
        assert result.method is expected


def test_bessel_at_origin():
    assert bessel_j(0.0, 0.0).value == pytest.approx(1.0, rel=1e-14)
    assert bessel_j(-1.0, 0.0).value == 0.0
    assert bessel_j(1.0, 0.0).value == 0.0
    with pytest.raises(DomainError):
        bessel_j(-0.5, 0.0)


def test_bessel_rejects_bad_input():
    with pytest.raises(DomainError):
        bessel_j(0.0, -1.0)
    with pytest.raises(InvalidInputError):
        bessel_j(3.5, 1.0)


def test_bessel_array_matches_scalar():
    r = np.array([[0.5, 10.0], [20.0, 60.0]])
    values, errors, far = bessel_j_array(1.5, r)
    assert values.shape == r.shape
    assert np.all(errors > 0)
    assert far.tolist() == [[False, False], [True, True]]
    assert values[1, 0] == pytest.approx(bessel_j(1.5, 20.0).value)


def test_scaled_bessel():
    values, _ = scaled_bessel(1.0, np.array([0.0, 2.0, 30.0]))
    assert values[0] == pytest.approx(0.5)
    assert values[1] == pytest.approx(float(mpmath.besselj(1, 2.0)) / 2.0, rel=1e-12)
    assert values[2] == pytest.approx(float(mpmath.besselj(1, 30.0)) / 30.0, abs=1e-12)


def test_hankel_amplitudes_rebuild_bessel():
    z = np.array([20.0, 45.0])
    plus, _ = hankel_amplitude(0.5, z, 1)
    minus, _ = hankel_amplitude(0.5, z, -1)
    rebuilt = (plus * np.exp(1j * z) + minus * np.exp(-1j * z)) / np.sqrt(z)
    expected = [float(mpmath.besselj(0.5, v)) for v in z]
    assert rebuilt.real == pytest.approx(expected, abs=1e-12)
    with pytest.raises(PreconditionError):
        hankel_amplitude(0.5, np.array([5.0]))


def test_hankel_expansion_error_estimate():
    reference = float(mpmath.besselj(0, 30.0))
    for terms in (1, 2, 4):
        expansion = hankel_expansion(0.0, 30.0, terms)
        assert abs(expansion.value - reference) <= 2.0 * expansion.abs_error_estimate
        assert len(expansion.coeffs.coeffs_plus) == terms
    with pytest.raises(PreconditionError):
        hankel_expansion(0.0, 5.0, 2)
    with pytest.raises(InvalidInputError):
        hankel_expansion(0.0, 30.0, 0)
