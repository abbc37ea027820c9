import math

import numpy as np
import pytest

from magnetic_riesz import (
    Family,
    GridConfig,
    GridFunction,
    InvalidInputError,
    KernelParams,
    PolarGrid,
    PolarPoint,
    RegionPoint,
    ShapeKind,
    ShapeSpec,
    make_indicator,
    pair_scaling_regression,
    ratio_sweep,
    scaling_regression,
    stability_experiment
)
from magnetic_riesz.experiments import StabilityReport, family_shape, fit_slope, model_bump

POINT = RegionPoint(0.9, 0.1)


def test_fit_slope():
    assert fit_slope([1.0, 2.0, 4.0], [1.0, 4.0, 16.0]) == pytest.approx(2.0)
    assert fit_slope([1.0, 10.0], [3.0, 0.3]) == pytest.approx(-1.0)


def test_grid_config():
    grid = GridConfig(n_r=8, n_theta=16, r_max=2.0).build()
    assert grid.shape == (8, 16)
    geometric = GridConfig(n_r=8, n_theta=16, r_max=2.0, spacing="geometric", r_min=0.1).build()
    assert geometric.edges[1] == pytest.approx(0.1)
    with pytest.raises(InvalidInputError):
        GridConfig(spacing="chebyshev").build()


def test_family_shapes():
    assert family_shape(Family.BALLS, 4.0).radius == 4.0
    annulus = family_shape("annuli", 2.0)
    assert (annulus.r_in, annulus.r_out) == (2.0, 3.0)
    thin = family_shape(Family.SHRINKING_ANNULI, 4.0)
    assert thin.r_out - thin.r_in == pytest.approx(0.25)
    tube = family_shape(Family.TUBES, 8.0)
    assert tube.kind is ShapeKind.TUBE
    assert (tube.length, tube.width) == (8.0, 1.0)


def test_ratio_sweep_validation():
    cfg = GridConfig(n_r=8, n_theta=16, r_max=8.0)
    with pytest.raises(InvalidInputError):
        ratio_sweep(-0.5, POINT, Family.BALLS, [1.0, 3.0], cfg)
    with pytest.raises(InvalidInputError):
        ratio_sweep(0.5, POINT, Family.BALLS, [1.0, 2.0], cfg)
    with pytest.raises(InvalidInputError):
        ratio_sweep(-0.5, POINT, Family.BALLS, [1.0, 2.0], cfg, engine="fft")
    with pytest.raises(InvalidInputError):
        ratio_sweep(-0.5, POINT, Family.BALLS, [1.0, 2.0], cfg, alpha=0.5, engine="oracle")


def test_ratio_sweep_needs_two_usable_scales():
    cfg = GridConfig(n_r=8, n_theta=16, r_max=8.0)
    with pytest.raises(InvalidInputError):
        ratio_sweep(-0.5, POINT, Family.BALLS, [16.0, 32.0], cfg)


@pytest.mark.slow
def test_ratio_sweep_skips_what_does_not_fit():
    cfg = GridConfig(n_r=16, n_theta=16, r_max=8.0)
    sweep = ratio_sweep(-0.5, POINT, Family.BALLS, [1.0, 2.0, 4.0, 8.0], cfg)
    assert sweep.scales == [1.0, 2.0, 4.0]
    assert sweep.skipped == [8.0]
    assert sweep.measures == sorted(sweep.measures)
    assert all(r > 0 for r in sweep.ratios)
    assert math.isfinite(sweep.slope)


@pytest.mark.slow
def test_ratio_sweep_engines_agree_for_free_case():
    cfg = GridConfig(n_r=32, n_theta=32, r_max=16.0)
    kernel = ratio_sweep(-0.5, POINT, Family.BALLS, [1.0, 2.0, 4.0], cfg, engine="kernel")
    oracle = ratio_sweep(-0.5, POINT, Family.BALLS, [1.0, 2.0, 4.0], cfg, engine="oracle")
    assert kernel.scales == oracle.scales == [1.0, 2.0, 4.0]
    assert np.allclose(kernel.ratios, oracle.ratios, rtol=0.1, atol=0.0)


def test_lambda_validation():
    grid = PolarGrid.uniform(4, 1.0, 8)
    f = make_indicator(grid, ShapeSpec.ball(0.5))
    with pytest.raises(InvalidInputError):
        scaling_regression(-0.5, POINT, f, [1.0, 2.0])
    with pytest.raises(InvalidInputError):
        scaling_regression(-0.5, POINT, f, [1.0, 1.5, 2.0])
    with pytest.raises(InvalidInputError):
        pair_scaling_regression(KernelParams(-0.5, 1.0), [], POINT, [1.0, 2.0, 4.0])


def test_scaling_regression_recovers_the_exponent():
    grid = PolarGrid.uniform(6, 2.0, 8)
    f = make_indicator(grid, ShapeSpec.ball(1.0))
    fit = scaling_regression(-0.5, POINT, f, [1.0, 2.0, 4.0], alpha=0.0, max_threads=1)
    assert fit.target == pytest.approx(1.6)
    assert fit.deviation < 1e-4


def test_pair_scaling_regression_recovers_the_exponent():
    params = KernelParams(-0.5, 1.0, 0.5)
    pairs = [(PolarPoint(0.4, 0.3), PolarPoint(0.9, 2.1)), (PolarPoint(1.7, 0.3), PolarPoint(0.4, 2.1))]
    fit = pair_scaling_regression(params, pairs, POINT, [1.0, 2.0, 4.0, 8.0])
    assert fit.target == pytest.approx(1.6)
    assert fit.deviation < 1e-6
    assert fit.lambdas == [1.0, 2.0, 4.0, 8.0]


def test_model_bump_support():
    values = model_bump(np.array([0.25, 0.5, 1.0, 2.0, 3.0]))
    assert values[0] == values[1] == values[3] == values[4] == 0.0
    assert values[2] > 0.0


def test_stability_report_properties():
    report = StabilityReport(4.0, 4.5, 3.0, [2, 4, 8], [1.0, 0.5, 0.52], [0.5, 1.0, 1.5],
                             [False, False, False], "indicator")
    assert report.decreasing
    worse = StabilityReport(4.0, 4.5, 3.0, [2, 4, 8], [1.0, 0.5, 0.8], [0.5, 1.0, 1.5],
                            [False, False, True], "indicator")
    assert worse.decreasing
    assert not StabilityReport(4.0, 4.5, 3.0, [2, 4], [0.5, 0.8], [0.5, 1.0],
                               [False, False], "indicator").decreasing
    assert report.log_growth == pytest.approx(0.5 / math.log(2.0))


def test_stability_validation():
    cfg = GridConfig(n_r=4, n_theta=8, r_max=2.0)
    with pytest.raises(InvalidInputError):
        stability_experiment(4.0, [2], 4.5, 3.0, cfg, jump="step")
    with pytest.raises(InvalidInputError):
        stability_experiment(0.0, [2], 4.5, 3.0, cfg)
    with pytest.raises(InvalidInputError):
        stability_experiment(4.0, [2], 4.5, 1.0, cfg)
    with pytest.raises(InvalidInputError):
        stability_experiment(4.0, [0], 4.5, 3.0, cfg)


def test_stability_experiment_small():
    cfg = GridConfig(n_r=8, n_theta=16, r_max=2.0)
    report = stability_experiment(2.0, [32, 2, 8], 4.5, 3.0, cfg, max_threads=1)
    assert report.orders == [2, 8, 32]
    assert report.saturated == [False, False, True]
    assert all(math.isfinite(v) and v >= 0 for v in report.remainder_ratios)
    assert report.truncated_l1[0] < report.truncated_l1[1] < report.truncated_l1[2]


def test_constant_jump_has_no_remainder():
    cfg = GridConfig(n_r=8, n_theta=16, r_max=2.0)
    report = stability_experiment(2.0, [2, 4], 4.5, 3.0, cfg, jump="constant", max_threads=1)
    assert report.remainder_ratios == [0.0, 0.0]
    assert report.truncated_l1 == [1.0, 1.0]
    assert report.decreasing


def test_stability_with_custom_tests():
    grid = GridConfig(n_r=8, n_theta=16, r_max=2.0).build()
    f = GridFunction.from_function(grid, lambda r, theta: np.exp(-r * r))
    report = stability_experiment(2.0, [4], 4.5, 3.0, GridConfig(n_r=8, n_theta=16, r_max=2.0), tests=[f])
    assert len(report.remainder_ratios) == 1
