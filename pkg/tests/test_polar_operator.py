import math

import mpmath
import numpy as np
import pytest

from magnetic_riesz import (
    FluxProfile,
    GridFunction,
    GridMismatchError,
    InvalidInputError,
    KernelParams,
    KernelRowCache,
    PolarGrid,
    ShapeSpec,
    UnsupportedRegimeError,
    apply_br,
    apply_br_direct,
    free_kernel_oracle,
    free_multiplier_oracle,
    lp_norm,
    make_indicator,
    sharp_cutoff_projection
)


@pytest.fixture
def small_grid():
    return PolarGrid.uniform(4, 2.0, 8)


def gaussian(width):
    return lambda r, theta: np.exp(-(r / width) ** 2)


def test_grid_weights_cover_the_disk():
    grid = PolarGrid.uniform(10, 3.0, 16)
    assert grid.weights.sum() == pytest.approx(math.pi * 9.0)
    assert grid.shape == (10, 16)
    assert grid.r_max == 3.0
    geometric = PolarGrid.geometric(12, 3.0, 32)
    assert geometric.edges[0] == 0.0
    assert geometric.weights.sum() == pytest.approx(math.pi * 9.0)
    assert np.all(np.diff(geometric.radii) > 0)


def test_grid_validation():
    with pytest.raises(InvalidInputError):
        PolarGrid.uniform(4, 2.0, 6)
    with pytest.raises(InvalidInputError):
        PolarGrid.uniform(0, 2.0, 8)
    with pytest.raises(InvalidInputError):
        PolarGrid.geometric(4, 2.0, 8, r_min=3.0)
    with pytest.raises(InvalidInputError):
        PolarGrid(np.array([1.0, 0.5]), 8, np.array([0.0, 0.75, 1.0]))


def test_indicator_measure_and_norms():
    grid = PolarGrid.uniform(8, 2.0, 16)
    ball = make_indicator(grid, ShapeSpec.ball(1.0))
    assert ball.measure() == pytest.approx(math.pi)
    assert lp_norm(ball, 1) == pytest.approx(math.pi)
    assert lp_norm(ball, 2) == pytest.approx(math.sqrt(math.pi))
    assert lp_norm(ball, math.inf) == 1.0
    assert ball.warnings == ()
    with pytest.raises(InvalidInputError):
        lp_norm(ball, 0.5)


def test_shapes():
    grid = PolarGrid.uniform(8, 2.0, 16)
    annulus = make_indicator(grid, ShapeSpec.annulus(0.5, 1.5))
    assert annulus.measure() == pytest.approx(math.pi * (1.5 ** 2 - 0.5 ** 2))
    sector = make_indicator(grid, ShapeSpec.sector(0.0, 2.0, 0.0, math.pi / 2 - 1e-9))
    assert sector.measure() == pytest.approx(math.pi, rel=1e-12)
    tube = make_indicator(grid, ShapeSpec.tube(0.0, 3.0, 0.3))
    assert 0 < tube.measure() < grid.weights.sum()
    with pytest.raises(InvalidInputError):
        ShapeSpec.annulus(2.0, 1.0)


def test_empty_indicator_is_flagged():
    grid = PolarGrid.uniform(8, 2.0, 16)
    empty = make_indicator(grid, ShapeSpec.annulus(1.0, 1.0))
    assert empty.warnings == ("empty",)
    assert not np.any(empty.values)


def test_grid_mismatch(small_grid):
    with pytest.raises(GridMismatchError):
        GridFunction(small_grid, np.zeros((3, 3)))
    other = PolarGrid.uniform(4, 3.0, 8)
    with pytest.raises(GridMismatchError):
        GridFunction.zeros(small_grid) + GridFunction.zeros(other)
    same = PolarGrid.uniform(4, 2.0, 8)
    assert small_grid.same_as(same)


def test_grid_function_algebra(small_grid):
    f = GridFunction.from_function(small_grid, gaussian(1.0))
    g = make_indicator(small_grid, ShapeSpec.ball(1.0))
    combined = 2.0 * f - g
    assert combined.values == pytest.approx(2.0 * f.values - g.values)
    assert f.inner(f).real == pytest.approx(lp_norm(f, 2) ** 2)
    assert f.rotate(3).values[:, 3] == pytest.approx(f.values[:, 0])


def test_factorized_matches_direct(small_grid):
    params = KernelParams(-0.5, 1.0, 0.5)
    f = GridFunction.from_function(small_grid, lambda r, theta: np.exp(-r * r) * (1.0 + 0.5 * np.cos(theta)))
    fast = apply_br(params, f, tol=1e-9)
    direct = apply_br_direct(params, f, tol=1e-9)
    gap = np.abs(fast.values - direct.values).max()
    assert gap <= fast.max_error + direct.max_error + 1e-9


def test_factorized_matches_direct_with_variable_profile(small_grid):
    profile = FluxProfile.from_coefficients(0.3, [0.2], [-0.1], 32)
    params = KernelParams(-0.75, 1.5, profile)
    f = make_indicator(small_grid, ShapeSpec.sector(0.0, 1.5, 0.0, math.pi))
    fast = apply_br(params, f, tol=1e-9)
    direct = apply_br_direct(params, f, tol=1e-9)
    gap = np.abs(fast.values - direct.values).max()
    assert gap <= fast.max_error + direct.max_error + 1e-9


def test_operator_is_linear(small_grid):
    params = KernelParams(-0.5, 1.0, 0.5)
    cache = KernelRowCache()
    f = GridFunction.from_function(small_grid, gaussian(1.0))
    g = make_indicator(small_grid, ShapeSpec.sector(0.0, 1.0, 0.0, math.pi))
    combined = apply_br(params, 2.0 * f + g, cache=cache)
    separate = 2.0 * apply_br(params, f, cache=cache) + apply_br(params, g, cache=cache)
    assert combined.values == pytest.approx(separate.values, abs=1e-12)


def test_rotation_equivariance_for_constant_flux(small_grid):
    params = KernelParams(-0.5, 1.0, 0.3)
    cache = KernelRowCache()
    f = make_indicator(small_grid, ShapeSpec.sector(0.0, 1.5, 0.0, math.pi / 2))
    rotated_first = apply_br(params, f.rotate(2), cache=cache)
    rotated_after = apply_br(params, f, cache=cache).rotate(2)
    assert rotated_first.values == pytest.approx(rotated_after.values, abs=1e-12)


def test_cache_reuses_rows(small_grid):
    params = KernelParams(-0.5, 1.0, 0.5)
    cache = KernelRowCache()
    f = GridFunction.from_function(small_grid, gaussian(1.0))
    apply_br(params, f, cache=cache, max_threads=1)
    misses = cache.misses
    assert misses == len(cache) == small_grid.n_r * (small_grid.n_r + 1) // 2
    apply_br(params, f, cache=cache, max_threads=2)
    assert cache.misses == misses
    assert cache.hits >= small_grid.n_r ** 2


def test_zero_input_gives_zero(small_grid):
    params = KernelParams(-0.5, 1.0, 0.5)
    result = apply_br(params, GridFunction.zeros(small_grid))
    assert not np.any(result.values)
    assert result.max_error == 0.0


def test_oracle_regimes(small_grid):
    f = GridFunction.from_function(small_grid, gaussian(1.0))
    with pytest.raises(UnsupportedRegimeError):
        free_multiplier_oracle(-1.2, 1.0, f)
    with pytest.raises(InvalidInputError):
        free_multiplier_oracle(-0.5, 1.0, f, padding=1)
    with pytest.raises(UnsupportedRegimeError):
        free_kernel_oracle(-1.6, 1.0, [1.0])
    with pytest.raises(InvalidInputError):
        free_kernel_oracle(-0.5, 1.0, [-1.0])


def test_sharp_projection_keeps_low_frequencies():
    grid = PolarGrid.uniform(32, 4.0, 64)
    f = GridFunction.from_function(grid, gaussian(1.0))
    projected = sharp_cutoff_projection(10.0, f)
    inner = grid.radii < 2.0
    assert np.abs(projected.values[inner] - f.values[inner]).max() < 0.02


def gaussian_output(delta, lam, r):
    """Free mean of exp(-|x|^2) at radius r, as a Hankel integral of the multiplier."""
    delta = mpmath.mpf(delta)

    def integrand(rho):
        return (1 - (rho / lam) ** 2) ** delta * mpmath.exp(-rho ** 2 / 4) * mpmath.besselj(0, rho * r) * rho

    return float(mpmath.quad(integrand, [0, lam]) / (2 * mpmath.gamma(1 + delta)))


def test_multiplier_oracle_matches_hankel_integral():
    grid = PolarGrid.uniform(128, 16.0, 16)
    f = GridFunction.from_function(grid, gaussian(1.0))
    oracle = free_multiplier_oracle(-0.4, 1.0, f, spacing=0.5, padding=32)
    for i in (0, 7):
        expected = gaussian_output(-0.4, 1.0, float(grid.radii[i]))
        assert np.abs(oracle.values[i] - expected).max() <= 2e-2 * abs(expected)


def test_multiplier_oracle_tends_to_sharp_projection():
    grid = PolarGrid.uniform(32, 4.0, 64)
    f = GridFunction.from_function(grid, gaussian(1.0))
    projected = sharp_cutoff_projection(2.0, f)
    oracle = free_multiplier_oracle(-0.02, 2.0, f, padding=4)
    assert lp_norm(oracle - projected, 2) <= 0.05 * lp_norm(projected, 2)


@pytest.mark.slow
def test_free_operator_matches_multiplier_oracle():
    grid = PolarGrid.uniform(256, 16.0, 256)
    f = GridFunction.from_function(grid, gaussian(1.0))
    ours = apply_br(KernelParams(-0.4, 1.0, 0.0), f, tol=1e-8)
    oracle = free_multiplier_oracle(-0.4, 1.0, f, spacing=0.5, padding=32)
    assert lp_norm(ours - oracle, 2) <= 0.02 * lp_norm(oracle, 2)


@pytest.mark.slow
def test_free_output_of_radial_input_is_radial():
    grid = PolarGrid.uniform(16, 3.0, 32)
    f = GridFunction.from_function(grid, gaussian(0.75))
    result = apply_br(KernelParams(-0.3, 2.0, 0.0), f)
    spread = np.abs(result.values - result.values[:, :1]).max()
    assert spread <= 1e-10 + 2.0 * result.max_error
