import math

import numpy as np
import pytest

from magnetic_riesz import InvalidInputError, indicator_fourier_partial, truncation_error_norm
from magnetic_riesz.fourier import fourier_coefficient, indicator, partial_sum_l1
from magnetic_riesz.suites import parseval_norm


def test_coefficients():
    assert fourier_coefficient(0) == 0.5
    assert fourier_coefficient(1) == pytest.approx(1.0 / math.pi)
    assert fourier_coefficient(-1) == pytest.approx(1.0 / math.pi)
    assert fourier_coefficient(2) == pytest.approx(0.0, abs=1e-15)
    assert fourier_coefficient(3) == pytest.approx(-1.0 / (3.0 * math.pi))


def test_partial_sum_converges_inside_and_at_the_jump():
    assert indicator_fourier_partial(4096, math.pi / 2).real == pytest.approx(1.0, abs=2e-3)
    assert indicator_fourier_partial(4096, 1.5 * math.pi).real == pytest.approx(0.0, abs=2e-3)
    assert indicator_fourier_partial(64, math.pi).real == pytest.approx(0.5, abs=1e-12)
    values = indicator_fourier_partial(16, np.linspace(-2 * math.pi, 2 * math.pi, 9))
    assert values.shape == (9,)
    assert np.all(np.abs(values.imag) == 0)


def test_partial_sum_validation():
    with pytest.raises(InvalidInputError):
        indicator_fourier_partial(0, 0.0)
    with pytest.raises(InvalidInputError):
        indicator_fourier_partial(2.5, 0.0)
    with pytest.raises(InvalidInputError):
        indicator_fourier_partial(8, 7.0)


def test_indicator():
    assert indicator([0.0, math.pi, -3.0, 4.0]).tolist() == [1.0, 1.0, 1.0, 0.0]


@pytest.mark.parametrize("M", [2, 3, 16, 65, 256])
def test_l2_error_matches_parseval(M):
    assert truncation_error_norm(M, 2) == pytest.approx(parseval_norm(M), rel=1e-6)


def test_smallest_order_by_hand():
    assert truncation_error_norm(2, 2) == pytest.approx(math.sqrt(math.pi - 8.0 / math.pi), rel=1e-6)


def test_error_decay_rates():
    ratio = truncation_error_norm(256, 2) / truncation_error_norm(64, 2)
    assert ratio == pytest.approx(0.5, rel=0.05)
    quartic = [truncation_error_norm(m, 4) for m in (16, 64, 256)]
    assert quartic[0] > quartic[1] > quartic[2]


def test_truncation_error_validation():
    with pytest.raises(InvalidInputError):
        truncation_error_norm(1, 2)
    with pytest.raises(InvalidInputError):
        truncation_error_norm(8, 1.5)
    with pytest.raises(InvalidInputError):
        truncation_error_norm(8, math.inf)


def test_partial_sum_l1_grows():
    sizes = [partial_sum_l1(m) for m in (1, 4, 16, 64)]
    assert sizes[0] == 0.5
    assert all(a < b for a, b in zip(sizes, sizes[1:]))
