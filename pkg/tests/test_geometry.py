import math

import numpy as np
from scipy.integrate import trapezoid
import pytest

from magnetic_riesz import (
    DomainError,
    FluxProfile,
    InvalidInputError,
    PolarPoint,
    b_param,
    dist_diff,
    dist_geo,
    flux_alpha,
    morse_change,
    normalize_angle,
    phase_integral
)


def test_flux_alpha_is_the_sample_mean():
    assert flux_alpha([0.3] * 5) == pytest.approx(0.3)
    assert flux_alpha([0.0, 1.0]) == pytest.approx(0.5)
    with pytest.raises(InvalidInputError):
        flux_alpha([])
    with pytest.raises(InvalidInputError):
        flux_alpha([0.1, float("nan")])


def test_profile_from_coefficients_round_trips_values():
    profile = FluxProfile.from_coefficients(0.25, [0.1], [0.2], 64)
    assert profile.alpha == pytest.approx(0.25)
    assert not profile.is_constant
    theta = 0.7
    assert profile.evaluate(theta) == pytest.approx(0.25 + 0.1 * math.cos(theta) + 0.2 * math.sin(theta))
    assert profile.antiderivative(2 * math.pi) == pytest.approx(2 * math.pi * 0.25)


def test_antiderivative_matches_numerical_integral():
    profile = FluxProfile.from_coefficients(-0.4, [0.3, 0.1], [0.0, -0.2], 32)
    theta = np.linspace(0.0, 2.0, 20001)
    numeric = trapezoid(profile.evaluate(theta), theta)
    assert profile.antiderivative(2.0) == pytest.approx(numeric, abs=1e-8)


def test_gauge_change_keeps_the_flux():
    profile = FluxProfile.constant(0.3)
    gauged = profile.with_gauge([0.5], [0.25, 0.1])
    assert gauged.alpha == pytest.approx(0.3)
    assert not gauged.is_constant
    assert gauged.antiderivative(2 * math.pi) == pytest.approx(profile.antiderivative(2 * math.pi))


def test_phase_integral_of_constant_profile():
    profile = FluxProfile.constant(0.5)
    assert phase_integral(profile, 0.5, 2.0) == pytest.approx(0.75)
    assert phase_integral(profile, 2.0, 0.5) == pytest.approx(-0.75)


def test_profile_from_csv(tmp_path):
    path = tmp_path / "flux.csv"
    rows = ["theta,value"] + [f"{2 * math.pi * k / 8},{0.2}" for k in range(8)]
    path.write_text("\n".join(rows), encoding="utf-8")
    profile = FluxProfile.from_csv(path, 16)
    assert profile.samples.size == 16
    assert profile.alpha == pytest.approx(0.2)
    assert profile.is_constant


def test_profile_from_csv_rejects_unsorted_angles(tmp_path):
    path = tmp_path / "flux.csv"
    path.write_text("1.0,0.2\n0.5,0.2\n", encoding="utf-8")
    with pytest.raises(InvalidInputError):
        FluxProfile.from_csv(path)


def test_polar_point():
    point = PolarPoint(2.0, -math.pi / 2)
    assert point.theta == pytest.approx(1.5 * math.pi)
    assert point.scaled(0.5).r == pytest.approx(1.0)
    assert point.to_cartesian() == pytest.approx((0.0, -2.0), abs=1e-15)
    with pytest.raises(InvalidInputError):
        PolarPoint(-1.0, 0.0)
    assert normalize_angle(-1e-18) < 2 * math.pi


def test_dist_geo():
    assert dist_geo(1.0, 1.0, math.pi) == pytest.approx(2.0)
    assert dist_geo(3.0, 4.0, math.pi / 2) == pytest.approx(5.0)
    assert dist_geo(2.0, 2.0, 0.0) == 0.0
    with pytest.raises(InvalidInputError):
        dist_geo(-1.0, 1.0, 0.0)


def test_dist_diff_at_zero_and_monotone():
    state = dist_diff(1.5, 0.5, 0.0)
    assert state.value == pytest.approx(2.0)
    assert state.d1 == 0.0
    s = np.linspace(0.0, 10.0, 200)
    values = dist_diff(1.5, 0.5, s)
    assert np.all(np.diff(values.value) > 0)
    assert np.all(values.d2 >= 0)


def test_dist_diff_dominates_dist_geo():
    rng = np.random.default_rng(3)
    r1, r2 = rng.uniform(0.1, 5.0, (2, 50))
    dtheta = rng.uniform(-math.pi, math.pi, 50)
    assert np.all(dist_diff(r1, r2, 0.0).value >= dist_geo(r1, r2, dtheta) - 1e-12)


def test_dist_diff_rejects_negative_s():
    with pytest.raises(InvalidInputError):
        dist_diff(1.0, 1.0, -0.1)
    with pytest.raises(InvalidInputError):
        dist_diff(0.0, 1.0, 0.1)


def test_b_param():
    assert b_param(0.0) == pytest.approx(math.sqrt(2.0))
    assert b_param(math.pi) == pytest.approx(0.0, abs=1e-15)


def test_morse_change_identity():
    r1, r2 = 0.7, 1.3
    for s in np.linspace(0.0, 1.0, 21):
        change = morse_change(r1, r2, float(s))
        phase = dist_diff(r1, r2, float(s)).value - (r1 + r2)
        assert r1 * r2 * change.s_tilde ** 2 == pytest.approx(2.0 * phase, abs=1e-12)
        assert change.jacobian > 0
    assert morse_change(r1, r2, 0.0).jacobian == pytest.approx(math.sqrt(r1 + r2))


def test_morse_change_outside_unit_interval():
    with pytest.raises(DomainError):
        morse_change(1.0, 1.0, 1.5)
