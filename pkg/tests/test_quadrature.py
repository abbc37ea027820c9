import math

import numpy as np
import pytest
from scipy import integrate

from magnetic_riesz import (
    InvalidInputError,
    OscillatorySpec,
    PreconditionError,
    integrate_adaptive,
    integrate_oscillatory_s
)
from magnetic_riesz.geometry import diffractive_distance


def test_adaptive_smooth_integral():
    result = integrate_adaptive(np.sin, 0.0, math.pi, tol=1e-12)
    assert result.value == pytest.approx(2.0, abs=1e-12)
    assert result.converged
    assert result.evaluations > 0


def test_adaptive_vector_integrand():
    result = integrate_adaptive(lambda x: np.stack([x, x * x], axis=-1), 0.0, 1.0, tol=1e-12)
    assert result.value == pytest.approx([0.5, 1.0 / 3.0], abs=1e-12)
    assert np.shape(result.abs_error_estimate) == (2,)


def test_adaptive_refines_at_a_peak():
    eps = 1e-2
    exact = 2.0 / eps * math.atan(1.0 / eps)
    result = integrate_adaptive(lambda x: 1.0 / (x * x + eps * eps), -1.0, 1.0, tol=1e-9, points=[0.0])
    assert result.value == pytest.approx(exact, abs=1e-8)


def test_adaptive_rejects_bad_limits():
    with pytest.raises(InvalidInputError):
        integrate_adaptive(np.sin, 1.0, 0.0)
    with pytest.raises(InvalidInputError):
        integrate_adaptive(np.sin, 0.0, math.inf)
    with pytest.raises(InvalidInputError):
        integrate_adaptive(np.sin, 0.0, 1.0, tol=0.0)


def test_oscillatory_without_frequency():
    spec = OscillatorySpec(0.0, 1.0, 1.0, lambda s: np.exp(-s), tail_rate=1.0)
    result = integrate_oscillatory_s(spec, tol=1e-10)
    assert result.value == pytest.approx(1.0, abs=1e-9)
    assert result.converged


def test_oscillatory_against_scipy():
    lam, r1, r2 = 3.0, 1.0, 0.5
    spec = OscillatorySpec(lam, r1, r2, lambda s: np.exp(-2.0 * s), tail_rate=2.0)
    result = integrate_oscillatory_s(spec, tol=1e-10)

    def part(fn):
        return integrate.quad(lambda s: fn(lam * diffractive_distance(r1, r2, s)) * math.exp(-2.0 * s),
                              0.0, 12.0, limit=5000, epsabs=1e-13)[0]

    reference = complex(part(np.cos), part(np.sin))
    assert abs(result.value - reference) < 1e-8
    assert result.abs_error_estimate < 1e-8


def test_oscillatory_phase_sign_conjugates():
    plus = integrate_oscillatory_s(OscillatorySpec(2.0, 1.0, 1.0, lambda s: np.exp(-s), 1.0, phase_sign=1))
    minus = integrate_oscillatory_s(OscillatorySpec(2.0, 1.0, 1.0, lambda s: np.exp(-s), 1.0, phase_sign=-1))
    assert minus.value == pytest.approx(np.conj(plus.value), abs=1e-9)


def test_oscillatory_spec_validation():
    with pytest.raises(PreconditionError):
        OscillatorySpec(1.0, 1.0, 1.0, np.exp, tail_rate=0.0)
    with pytest.raises(InvalidInputError):
        OscillatorySpec(1.0, 1.0, 1.0, np.exp, tail_rate=1.0, peak_width=3.0)
    with pytest.raises(InvalidInputError):
        OscillatorySpec(-1.0, 1.0, 1.0, np.exp, tail_rate=1.0)
    with pytest.raises(InvalidInputError):
        OscillatorySpec(1.0, 0.0, 1.0, np.exp, tail_rate=1.0)
