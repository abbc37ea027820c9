#!/usr/bin/env python3
# -*- coding: utf-8 -*-
r"""Bochner-Riesz means of the scaling-critical magnetic Schroedinger operator.

 ____   _
|  _ \ (_) ___  ___  ____
| |_) || |/ _ \/ __||_  /
|  _ < | |  __/\__ \ / /
|_| \_\|_|\___||___//___|   kernels, operator, bound suites and L^p -> L^q sweeps

Commands:
    kernel-eval    evaluate the kernel at point pairs
    apply          apply S^delta_lambda to a grid function
    verify         run bound verification suites (exit code 1 if any check fails)
    ratio-sweep    ||S chi_E||_q / ||chi_E||_p over dyadic scales of a family
    scaling-fit    fit the lambda exponent of the operator norm proxy
    stability      truncated angular jump remainder versus the truncation order
    region         classify an exponent pair against the boundedness region
    bessel-table   tabulate J_nu(r)

Every command writes CSV tables and a manifest.json to the output directory.
"""
from argparse import ArgumentParser, Namespace, RawTextHelpFormatter
from configparser import ConfigParser, ExtendedInterpolation
from pathlib import Path
from threading import main_thread
import logging
import math

import numpy as np
import pandas as pd

from magnetic_riesz import (
    FINISHED_BANNER,
    RIESZ_BANNER,
    VERIFY_BANNER,
    VERSION,
    FluxProfile,
    GridFunction,
    KernelParams,
    Membership,
    PolarPoint,
    RegionPoint,
    RieszError,
    RunManifest,
    ShapeSpec,
    apply_br,
    apply_br_direct,
    bessel_j,
    bound_report_rows,
    br_kernel,
    build_settings,
    display_banner,
    make_indicator,
    pair_scaling_regression,
    ratio_sweep,
    region_membership,
    resolve_suites,
    scaling_regression,
    stability_experiment,
    verify_bounds,
    vertices,
    write_csv
)
from magnetic_riesz import check_config
from magnetic_riesz.region import constraint_margins
from magnetic_riesz.settings import flux_profile, grid_config

SCALING_FIT_WINDOW = 0.1
SWEEP_RADII = (0.1, 0.3, 1.0, 3.0, 10.0)
SWEEP_ANGLES = 8


def _add_flux_arguments(parser: ArgumentParser):
    parser.add_argument("--alpha", type=float, dest="alpha", default=None,
                        help="Constant flux, overrides the [flux] section.")
    parser.add_argument("--flux-file", dest="flux_file", default=None,
                        help="Two column (theta, value) CSV flux profile.")


def _add_point_argument(parser: ArgumentParser):
    parser.add_argument("--point", nargs=2, type=float, metavar=("INV_P", "INV_Q"), required=True,
                        help="Exponent pair (1/p, 1/q).")


def parse_command_line(argv=None) -> Namespace:
    """Parse the running command line provided by the user."""
    parser = ArgumentParser(description=__doc__, formatter_class=RawTextHelpFormatter)

    parser.add_argument("-d", "--debug",
                        action="store_true",
                        dest="debug",
                        help="Activate debug logs.")

    parser.add_argument("-c", "--config",
                        dest="config_file",
                        help="Path to local configuration file.",
                        required=False, default="riesz_harness.ini")

    parser.add_argument("-nb", "--no_banner",
                        action="store_true",
                        dest="no_banner",
                        help="Enable or disable ASCII banners in logfile output, defaults to False (enable banners).",
                        required=False)

    parser.add_argument("-o", "--output_dir",
                        dest="output_dir",
                        help="Directory for CSV tables and the run manifest.",
                        required=False, default=None)

    parser.add_argument("-t", "--max_threads",
                        type=int,
                        dest="max_threads",
                        help="Worker thread count, defaults to the configuration value.",
                        required=False, default=None)

    commands = parser.add_subparsers(dest="command", required=True)

    kernel = commands.add_parser("kernel-eval", help="Evaluate the Bochner-Riesz kernel.")
    kernel.add_argument("--delta", type=float, required=True)
    kernel.add_argument("--lam", type=float, default=1.0)
    _add_flux_arguments(kernel)
    kernel.add_argument("--point", nargs=4, type=float, action="append", dest="points", default=[],
                        metavar=("R1", "THETA1", "R2", "THETA2"), help="Point pair, may be repeated.")
    kernel.add_argument("--sweep", action="store_true", help="Add a radial/angular sweep against y = (1, 0).")

    apply = commands.add_parser("apply", help="Apply S^delta_lambda to a grid function.")
    apply.add_argument("--input", required=True, help="Input values (.npy complex array or .csv with re, im).")
    apply.add_argument("--delta", type=float, required=True)
    apply.add_argument("--lam", type=float, default=1.0)
    _add_flux_arguments(apply)
    apply.add_argument("--direct", action="store_true", help="Use the direct double sum.")
    apply.add_argument("--npy", action="store_true", help="Write apply.npy instead of apply.csv.")

    verify = commands.add_parser("verify", help="Run bound verification suites.")
    verify.add_argument("--suite", action="append", dest="suites", default=[],
                        help="Suite name (or 'all'), may be repeated.")

    sweep = commands.add_parser("ratio-sweep", help="Ratio sweep over dyadic scales.")
    sweep.add_argument("--delta", type=float, required=True, help="Signed order in (-3/2, 0).")
    _add_point_argument(sweep)
    sweep.add_argument("--family", action="append", dest="families", default=[])
    sweep.add_argument("--engine", choices=["kernel", "oracle"], default="kernel")
    sweep.add_argument("--alpha", type=float, default=None)

    scaling = commands.add_parser("scaling-fit", help="Fit the lambda scaling exponent.")
    scaling.add_argument("--delta", type=float, required=True)
    _add_point_argument(scaling)
    scaling.add_argument("--lambdas", nargs="+", type=float, default=None)
    scaling.add_argument("--mode", choices=["grid", "pairs"], default="grid")
    _add_flux_arguments(scaling)

    stability = commands.add_parser("stability", help="Truncated angular jump experiment.")
    stability.add_argument("--lam", type=float, default=4.0)
    stability.add_argument("--q", type=float, required=True)
    stability.add_argument("--r", type=float, required=True)
    stability.add_argument("--orders", nargs="+", type=int, default=None)
    stability.add_argument("--jump", choices=["indicator", "constant"], default="indicator")

    region = commands.add_parser("region", help="Classify an exponent pair.")
    region.add_argument("--delta", type=float, required=True, help="Positive order in (0, 3/2).")
    _add_point_argument(region)

    bessel = commands.add_parser("bessel-table", help="Tabulate J_nu(r).")
    bessel.add_argument("--nu", nargs="+", type=float, required=True)
    bessel.add_argument("--r", nargs="+", type=float, required=True)

    return parser.parse_args(argv)


def init_logging(debug_flag: bool):
    """Initialize logging for riesz_tools and processor"""
    splash = logging.getLogger("riesz_tools")
    splash.setLevel(logging.INFO)
    main_log = logging.getLogger("processor")
    main_log.setLevel(logging.INFO)
    ch = logging.StreamHandler()
    ch.setLevel(logging.INFO)
    ch2 = logging.StreamHandler()
    ch2.setLevel(logging.INFO)
    if debug_flag:
        main_log.setLevel(logging.DEBUG)
        ch.setLevel(logging.DEBUG)
        ch2.setLevel(logging.DEBUG)

    ch.setFormatter(logging.Formatter("[%(asctime)s] %(levelname)-8s %(name)-13s %(message)s"))
    ch2.setFormatter(logging.Formatter("[%(asctime)s] %(levelname)-8s %(name)s/%(threadName)-10s %(message)s"))
    splash.handlers = [ch]
    main_log.handlers = [ch2]
    splash.propagate = False
    main_log.propagate = False
    return (splash, main_log)


def load_configuration_file(config_file: str) -> ConfigParser:
    """Parse the ini file using ConfigParser"""
    settings = ConfigParser(interpolation=ExtendedInterpolation())
    settings.optionxform = str  # Don't lowercase configuration keys
    settings.read(config_file)

    return settings


def create_run_settings(parser: ConfigParser, args: Namespace) -> dict:
    """Typed settings with the command line overrides applied"""
    return build_settings(parser, {"run": {"output_dir": args.output_dir, "max_threads": args.max_threads}})


def command_profile(args: Namespace, settings: dict) -> FluxProfile:
    """Flux from --alpha / --flux-file, falling back to the [flux] section"""
    if getattr(args, "alpha", None) is not None:
        return FluxProfile.constant(args.alpha)
    if getattr(args, "flux_file", None):
        return FluxProfile.from_csv(args.flux_file, settings["flux"]["flux_samples"])
    return flux_profile(settings)


def output_path(settings: dict, manifest: RunManifest, name: str) -> Path:
    return manifest.add_output(Path(settings["run"]["output_dir"]) / name)


def run_kernel_eval(args: Namespace, settings: dict, manifest: RunManifest, log: logging.Logger):
    """Evaluate the kernel at the requested point pairs"""
    params = KernelParams(args.delta, args.lam, command_profile(args, settings))
    pairs = [(PolarPoint(r1, t1), PolarPoint(r2, t2)) for r1, t1, r2, t2 in args.points]
    if args.sweep:
        angles = 2.0 * math.pi * (np.arange(SWEEP_ANGLES) + 0.5) / SWEEP_ANGLES
        pairs.extend((PolarPoint(r, t), PolarPoint(1.0, 0.0)) for r in SWEEP_RADII for t in angles)
    if not pairs:
        raise SystemExit("kernel-eval needs at least one --point or --sweep")
    rows = []
    for x, y in pairs:
        kernel = br_kernel(params, x, y, settings["tolerances"]["kernel_tol"])
        manifest.record_error("kernel", kernel.abs_error_estimate)
        if not kernel.converged:
            manifest.warnings.append(f"unconverged kernel at {x} {y}")
        rows.append({"r1": x.r, "theta1": x.theta, "r2": y.r, "theta2": y.theta,
                     "re": kernel.value.real, "im": kernel.value.imag, "err": kernel.abs_error_estimate,
                     "re_geo": kernel.geometric.real, "im_geo": kernel.geometric.imag,
                     "re_diff": kernel.diffractive.real, "im_diff": kernel.diffractive.imag})
    write_csv(output_path(settings, manifest, "kernel_eval.csv"), rows)
    log.info("Evaluated the kernel at %i point pairs", len(rows))

    return True


def load_grid_values(path: str, shape) -> np.ndarray:
    """Node values from a .npy array or a CSV with re (and optionally im) columns in grid order"""
    if path.endswith(".npy"):
        values = np.load(path)
    else:
        frame = pd.read_csv(path)
        values = frame["re"].to_numpy() + 1j * (frame["im"].to_numpy() if "im" in frame else 0.0)
    if values.size != shape[0] * shape[1]:
        raise SystemExit(f"{path} holds {values.size} values, the configured grid has {shape[0] * shape[1]}")

    return np.asarray(values, dtype=complex).reshape(shape)


def run_apply(args: Namespace, settings: dict, manifest: RunManifest, log: logging.Logger):
    """Apply the operator to a grid function read from disk"""
    grid = grid_config(settings).build()
    f = GridFunction(grid, load_grid_values(args.input, grid.shape))
    params = KernelParams(args.delta, args.lam, command_profile(args, settings))
    engine = apply_br_direct if args.direct else apply_br
    out = engine(params, f, settings["tolerances"]["operator_tol"], settings["run"]["max_threads"])
    manifest.record_error("operator", out.max_error)
    if args.npy:
        np.save(output_path(settings, manifest, "apply.npy"), out.values)
    else:
        r, theta = grid.mesh()
        write_csv(output_path(settings, manifest, "apply.csv"),
                  ({"r": a, "theta": b, "re": v.real, "im": v.imag, "err": e}
                   for a, b, v, e in zip(r.ravel(), theta.ravel(), out.values.ravel(), out.errors.ravel())))
    log.info("Applied S^%g at lambda=%g on a %i x %i grid (max error %.3e)",
             args.delta, args.lam, grid.n_r, grid.n_theta, out.max_error)

    return True


def run_verify(args: Namespace, settings: dict, manifest: RunManifest, log: logging.Logger):
    """Run the requested bound suites"""
    rows = []
    for suite in resolve_suites(args.suites or ["all"]):
        log.info("Running suite %s", suite.value)
        reports = verify_bounds(suite, settings)
        manifest.record_suite(suite.value, reports)
        manifest.lap(suite.value)
        rows.extend(dict(row, suite=suite.value) for row in bound_report_rows(reports))
    write_csv(output_path(settings, manifest, "verify.csv"), rows,
              ["suite", "name", "parameters", "measured_constant", "samples", "threshold", "passed"])

    return manifest.passed


def run_ratio_sweep(args: Namespace, settings: dict, manifest: RunManifest, log: logging.Logger):
    """Ratio sweeps for each family and a verdict against the region"""
    pt = RegionPoint(*args.point)
    membership = region_membership(-args.delta, pt)
    thresholds = settings["thresholds"]
    alpha = args.alpha if args.alpha is not None else 0.0
    rows, slopes = [], []
    for family in args.families or settings["sweeps"]["families"]:
        sweep = ratio_sweep(args.delta, pt, family, settings["sweeps"]["ratio_scales"], grid_config(settings),
                            alpha, args.engine, settings["tolerances"]["operator_tol"],
                            settings["run"]["max_threads"])
        slopes.append(sweep.slope)
        log.info("%s: slope %.4f over %i scales", sweep.family.value, sweep.slope, len(sweep.scales))
        rows.extend({"family": sweep.family.value, "scale": s, "measure": m, "ratio": v, "slope": sweep.slope}
                    for s, m, v in zip(sweep.scales, sweep.measures, sweep.ratios))
    write_csv(output_path(settings, manifest, "ratio_sweep.csv"), rows)
    if membership.is_member:
        passed = all(s <= thresholds["slope_inside"] for s in slopes)
    elif membership is Membership.OUTSIDE:
        passed = any(s >= thresholds["slope_outside_margin"] for s in slopes)
    else:
        log.info("Point on an excluded boundary segment, no verdict")
        return True
    manifest.suites["ratio_sweep"] = passed
    log.info("Point is %s, slopes %s the expected behaviour", membership.value,
             "match" if passed else "do not match")

    return passed


def _scaling_pairs():
    radii = (0.4, 0.9, 1.7)
    return [(PolarPoint(a, 0.3), PolarPoint(b, 2.1)) for a in radii for b in radii]


def run_scaling_fit(args: Namespace, settings: dict, manifest: RunManifest, log: logging.Logger):
    """Fit the lambda exponent on a co-scaled ball indicator or on point pairs"""
    pt = RegionPoint(*args.point)
    lambdas = args.lambdas or settings["sweeps"]["scaling_lambdas"]
    profile = command_profile(args, settings)
    if args.mode == "grid":
        grid = grid_config(settings).build()
        f = make_indicator(grid, ShapeSpec.ball(0.25 * grid.r_max))
        fit = scaling_regression(args.delta, pt, f, lambdas, profile.alpha,
                                 settings["tolerances"]["operator_tol"], settings["run"]["max_threads"])
    else:
        params = KernelParams(args.delta, 1.0, profile)
        fit = pair_scaling_regression(params, _scaling_pairs(), pt, lambdas,
                                      tol=settings["tolerances"]["kernel_tol"])
    write_csv(output_path(settings, manifest, "scaling_fit.csv"),
              ({"lambda": lam, "value": v, "exponent": fit.exponent, "target": fit.target}
               for lam, v in zip(fit.lambdas, fit.values)))
    passed = fit.deviation <= SCALING_FIT_WINDOW
    manifest.suites["scaling_fit"] = passed
    log.info("Fitted exponent %.4f, target %.4f", fit.exponent, fit.target)

    return passed


def run_stability(args: Namespace, settings: dict, manifest: RunManifest, log: logging.Logger):
    """Remainder of the truncated jump in the model operator"""
    orders = args.orders or settings["sweeps"]["stability_orders"]
    report = stability_experiment(args.lam, orders, args.q, args.r, grid_config(settings), args.jump,
                                  max_threads=settings["run"]["max_threads"])
    write_csv(output_path(settings, manifest, "stability.csv"),
              ({"order": m, "remainder_ratio": v, "truncated_l1": l1, "saturated": sat}
               for m, v, l1, sat in zip(report.orders, report.remainder_ratios, report.truncated_l1,
                                        report.saturated)))
    log.info("Remainder %s in M, truncated multiplier grows like %.3f log M",
             "decreasing" if report.decreasing else "not decreasing", report.log_growth)

    return True


def run_region(args: Namespace, settings: dict, manifest: RunManifest, log: logging.Logger):
    """Classify an exponent pair and list the region's vertices"""
    pt = RegionPoint(*args.point)
    membership = region_membership(args.delta, pt)
    gap, left, top = constraint_margins(args.delta, pt)
    rows = [{"label": "point", "inv_p": pt.inv_p, "inv_q": pt.inv_q, "membership": membership.value,
             "gap_margin": gap, "left_margin": left, "top_margin": top}]
    rows.extend({"label": name, "inv_p": v.inv_p, "inv_q": v.inv_q} for name, v in vertices(args.delta).items())
    write_csv(output_path(settings, manifest, "region.csv"), rows)
    log.info("(1/p, 1/q) = (%g, %g) is %s for delta=%g", pt.inv_p, pt.inv_q, membership.value, args.delta)

    return True


def run_bessel_table(args: Namespace, settings: dict, manifest: RunManifest, log: logging.Logger):
    """Tabulate J_nu(r) with error estimates"""
    rows = []
    for nu in args.nu:
        for r in args.r:
            value = bessel_j(nu, r)
            manifest.record_error("bessel", value.abs_error_estimate)
            rows.append({"nu": nu, "r": r, "value": value.value, "err": value.abs_error_estimate,
                         "method": value.method.value})
    write_csv(output_path(settings, manifest, "bessel_table.csv"), rows)
    log.info("Tabulated %i Bessel values", len(rows))

    return True


COMMANDS = {
    "kernel-eval": run_kernel_eval,
    "apply": run_apply,
    "verify": run_verify,
    "ratio-sweep": run_ratio_sweep,
    "scaling-fit": run_scaling_fit,
    "stability": run_stability,
    "region": run_region,
    "bessel-table": run_bessel_table,
}


def do_finished(logg: logging.Logger, args: Namespace):
    """Prints the FINISHED_BANNER"""
    display_banner(banner=FINISHED_BANNER,
                   logger=logg,
                   fallback="FINISHED",
                   hide_cool_banners=args.no_banner
                   )


def main(argv=None) -> int:
    """Implement Main routine."""
    args = parse_command_line(argv)
    splash, main_log = init_logging(args.debug)
    display_banner(banner=RIESZ_BANNER,
                   logger=splash,
                   fallback=f"Magnetic Bochner-Riesz harness v{VERSION}",
                   hide_cool_banners=args.no_banner)

    if not check_config.validate_config(args.config_file, args.debug, args.no_banner):
        do_finished(splash, args)
        raise SystemExit("Invalid configuration specified, unable to continue.")

    settings = create_run_settings(load_configuration_file(args.config_file), args)
    manifest = RunManifest(args.command, dict(vars(args)), settings)
    if args.command == "verify":
        display_banner(banner=VERIFY_BANNER, logger=splash, fallback="VERIFY", hide_cool_banners=args.no_banner)

    try:
        passed = COMMANDS[args.command](args, settings, manifest, main_log)
    except RieszError as err:
        main_log.error(err)
        raise SystemExit(f"{args.command} failed: {err}") from err
    finally:
        if settings["run"]["write_manifest"]:
            manifest.write(settings["run"]["output_dir"])

    do_finished(splash, args)
    if not passed:
        splash.error("One or more checks failed")
        return 1

    return 0


if __name__ == '__main__':

    thread = main_thread()
    thread.name = "main"
    raise SystemExit(main())
