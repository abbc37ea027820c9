"""Checks the configuration settings for a harness run."""
import math
import os
from configparser import ConfigParser, ExtendedInterpolation
from datetime import datetime
from logging import DEBUG, INFO, Logger, basicConfig, getLogger

from .family import Family
from .helper import CHECKS_FAILED, CHECKS_PASSED, CONFIG_BANNER, split_list

BOOL_KEYS = ["write_manifest"]

GRID_SPACINGS = ["uniform", "geometric"]

THRESHOLD_KEYS = [
    "ream1", "ream2", "ream34", "decay_uniformity", "lemma43_uniformity", "model_uniformity",
    "difference", "phase_tolerance", "d2_constant", "morse_tolerance", "truncation_slope_window",
    "parseval_tolerance", "scaling_tolerance", "integer_flux_tolerance", "slope_inside",
    "slope_outside_margin"
]

SAMPLE_KEYS = ["decay_samples", "pair_samples", "phase_samples", "ream_samples"]


class ConfigurationCheckResult:
    """Class to handle configuration check results."""

    def __init__(self, logger: Logger, extra: dict = None):
        """Constructor for the ConfigurationCheckResult class."""
        self.msg = None
        self.log_type = None
        self.log = logger
        self.extra = extra
        self.valid = True
        self.warns = 0
        self.errors = 0


    def put(self, msg: str):
        """Parse out the log type and display the log message appropriately."""
        msg = msg.split(":")
        self.log_type = msg[0].strip().lower()
        msg.pop(0)
        self.msg = ":".join(msg).strip()
        if self.log_type == "error":
            self.log.error(self.msg, extra=self.extra)
            self.valid = False
            self.errors += 1
        elif self.log_type == "warning":
            self.log.warning(self.msg, extra=self.extra)
            self.warns += 1
        elif self.log_type == "debug":
            self.log.debug(self.msg, extra=self.extra)
        elif self.log_type == "critical":
            self.log.critical(self.msg, extra=self.extra)
            self.valid = False
            self.errors += 1


    def total_warnings(self):
        """Return the total warning counts as a human readable string."""
        returned = ""
        if self.warns:
            returned = f"({self.warns} warning{'s' if self.warns != 1 else ''})"

        return returned


    def total_errors(self):
        """Return the total error counts as a human readable string."""
        returned = ""
        if self.errors:
            returned = f"{self.errors} configuration error{'s' if self.errors != 1 else ''} found"

        return returned


def config_logging(do_debug: bool = False):
    """Configure log formatting and return a Logger instance."""
    log_format = '[%(asctime)s] %(levelname)-8s %(name)s  %(key)-42s  %(message)s'
    basicConfig(format=log_format)
    logger = getLogger("config")
    if do_debug:
        logger.setLevel(DEBUG)
    else:
        logger.setLevel(INFO)

    return logger


def read_config_file(filename: str = "riesz_harness.ini"):
    """Consume the configuration file and return a ConfigParser instance."""
    conf_parser = ConfigParser(interpolation=ExtendedInterpolation())
    conf_parser.optionxform = str
    conf_parser.read(filename)

    return conf_parser


def not_found():
    """Display the invalid INI file message."""
    print(
        f"[{cur_time()}] CRITICAL config  Unable to read or parse configuration file"
        )
    return []


def is_valid_config(result: ConfigurationCheckResult):
    """Check for validity and display the result."""
    valid_config = False
    sev_detail = "INFO     config"
    if result.valid:
        print(
            f"[{cur_time()}] {sev_detail}  No configuration errors found {result.total_warnings()}"
            )
        for line in CHECKS_PASSED.split("\n"):
            print(f"[{cur_time()}] INFO     config  {line}")
        valid_config = True
    else:
        print(
            f"[{cur_time()}] {sev_detail}  {result.total_errors()} {result.total_warnings()}"
            )
        for line in CHECKS_FAILED.split("\n"):
            print(f"[{cur_time()}] ERROR    config  {line}")

    return valid_config


def bool_str(check_val: str):
    """Confirm the provided string value represents a boolean."""
    returned = False
    if check_val.lower() in ["true", "false"]:
        returned = True

    return returned


def power_of_two(value: float):
    """Confirm the value is a positive (possibly fractional) power of two."""
    if value <= 0:
        return False
    exponent = math.log2(value)
    return abs(exponent - round(exponent)) < 1e-12


def failure(rslt: ConfigurationCheckResult, msg_str: str):
    """Process a failure log."""
    rslt.put(msg_str)

    return False


def warning(rslt: ConfigurationCheckResult, msg_str: str):
    """Process a warning log."""
    rslt.put(msg_str)

    return True


def generate_primer():
    """Returns a key primer to use for missing key identification."""
    primer = {
        "n_r": "CRITICAL",
        "n_theta": "CRITICAL",
        "r_max": "CRITICAL",
        "spacing": "WARNING",
        "alpha": "WARNING",
        "output_dir": "WARNING",
        "max_threads": "WARNING",
        "kernel_tol": "WARNING",
        "operator_tol": "WARNING",
        "deltas": "WARNING",
        "alphas": "WARNING",
        "decay_alphas": "WARNING",
        "lemma_deltas": "WARNING",
        "j_max": "WARNING"
    }
    bool_keys = {
        key_item: "WARNING" for key_item in BOOL_KEYS
    }
    primer.update(bool_keys)

    return primer


def check_for_missing(rslt: ConfigurationCheckResult, keyz: dict, found: list):
    """Check for any missing keys and handle the error based upon key criticality."""
    for check, check_val in keyz.items():
        if check not in found:
            rslt.extra = {"key": check, "section": None}
            if check_val == "WARNING":
                warning(rslt, "WARNING: Missing configuration parameter, using default")
            if check_val == "CRITICAL":
                failure(rslt, "CRITICAL: Missing configuration parameter")


def cur_time():
    """Return the current time in human readable format."""
    return datetime.now().strftime("%Y-%m-%d %H:%M:%S,%f")[:-3]


def validate_grid(c_key: str, c_val: str, keyz: dict, logg: ConfigurationCheckResult):
    """Validate the polar grid parameters."""
    try:
        if c_key == "n_r":
            keyz[c_key] = invalid(logg, c_val) if int(c_val) < 1 else True
        if c_key == "n_theta":
            keyz[c_key] = failure(logg,
                "ERROR: Angular node count must be a power of two"
                ) if (int(c_val) < 2 or not power_of_two(int(c_val))) else True
        if c_key == "r_max":
            keyz[c_key] = invalid(logg, c_val) if not float(c_val) > 0 else True
        if c_key == "r_min" and c_val:
            keyz[c_key] = invalid(logg, c_val) if not float(c_val) > 0 else True
    except ValueError:
        keyz[c_key] = invalid(logg, c_val)
    if c_key == "spacing":
        keyz[c_key] = invalid(logg, c_val) if c_val not in GRID_SPACINGS else True


def validate_flux(c_key: str, c_val: str, keyz: dict, logg: ConfigurationCheckResult):
    """Validate the magnetic flux description."""
    try:
        if c_key == "alpha":
            keyz[c_key] = invalid(logg, c_val) if not math.isfinite(float(c_val)) else True
        if c_key in ["cos_coefficients", "sin_coefficients"]:
            keyz[c_key] = all(math.isfinite(float(item)) for item in split_list(c_val)) or invalid(logg, c_val)
        if c_key == "flux_samples" and c_val:
            keyz[c_key] = invalid(logg, c_val) if int(c_val) < 1 else True
    except ValueError:
        keyz[c_key] = invalid(logg, c_val)
    if c_key == "flux_file" and c_val:
        keyz[c_key] = failure(logg,
            "ERROR: Specified flux profile file not found"
            ) if not os.path.exists(c_val) else True


def validate_tolerances(c_key: str, c_val: str, keyz: dict, logg: ConfigurationCheckResult):
    """Validate quadrature tolerances and budgets."""
    try:
        if c_key in ["kernel_tol", "operator_tol"]:
            keyz[c_key] = invalid(logg, c_val) if not 0 < float(c_val) <= 1e-2 else True
            if keyz[c_key] and float(c_val) < 1e-14:
                keyz[c_key] = warning(logg, "WARNING: Tolerance below double precision, expect unconverged quadratures")
        if c_key == "quad_max_evaluations":
            keyz[c_key] = invalid(logg, c_val) if int(c_val) < 1000 else True
    except ValueError:
        keyz[c_key] = invalid(logg, c_val)


def validate_sweeps(c_key: str, c_val: str, keyz: dict, logg: ConfigurationCheckResult):
    """Validate the sweep grids."""
    try:
        items = split_list(c_val)
        if c_key in ["deltas", "lemma_deltas"]:
            keyz[c_key] = failure(logg,
                "ERROR: Sweep orders must lie in (-3/2, 0)"
                ) if not all(-1.5 < float(d) < 0 for d in items) else True
        if c_key in ["alphas", "decay_alphas", "lemma_angles"]:
            keyz[c_key] = all(math.isfinite(float(a)) for a in items) or invalid(logg, c_val)
        if c_key in ["lemma_radii", "lambdas"]:
            keyz[c_key] = invalid(logg, c_val) if not all(float(r) > 0 for r in items) else True
        if c_key == "j_max":
            keyz[c_key] = invalid(logg, c_val) if not 1 <= int(c_val) <= 20 else True
        if c_key in SAMPLE_KEYS:
            keyz[c_key] = invalid(logg, c_val) if int(c_val) < 2 else True
        if c_key == "truncation_orders":
            keyz[c_key] = invalid(logg, c_val) if not all(int(m) >= 2 for m in items) else True
        if c_key == "stability_orders":
            keyz[c_key] = invalid(logg, c_val) if not all(int(m) >= 1 for m in items) else True
        if c_key == "truncation_powers":
            keyz[c_key] = invalid(logg, c_val) if not all(float(p) >= 2 for p in items) else True
        if c_key == "ratio_scales":
            keyz[c_key] = failure(logg,
                "ERROR: Ratio sweep scales must be powers of two"
                ) if not all(power_of_two(float(s)) for s in items) else True
        if c_key == "scaling_lambdas":
            lams = sorted(float(lam) for lam in items)
            keyz[c_key] = failure(logg,
                "ERROR: Scaling fits need three positive lambdas spanning two octaves"
                ) if (len(lams) < 3 or lams[0] <= 0 or lams[-1] < 4 * lams[0]) else True
    except ValueError:
        keyz[c_key] = invalid(logg, c_val)
    if c_key == "families":
        known = [f.value for f in Family]
        keyz[c_key] = invalid(logg, c_val) if not all(f in known for f in split_list(c_val)) else True


def validate_thresholds(c_key: str, c_val: str, keyz: dict, logg: ConfigurationCheckResult):
    """Validate that every threshold is a nonnegative number."""
    if c_key in THRESHOLD_KEYS:
        try:
            keyz[c_key] = invalid(logg, c_val) if not float(c_val) >= 0 else True
        except ValueError:
            keyz[c_key] = invalid(logg, c_val)


def validate_run(c_key: str, c_val: str, keyz: dict, logg: ConfigurationCheckResult):
    """Validate the output directory and seed."""
    if c_key == "output_dir":
        keyz[c_key] = warning(logg,
            "WARNING: No output directory specified, using default"
            ) if not c_val else True
    if c_key == "seed" and c_val:
        try:
            keyz[c_key] = invalid(logg, c_val) if int(c_val) < 0 else True
        except ValueError:
            keyz[c_key] = invalid(logg, c_val)


def validate_booleans(c_key: str, c_val: str, keyz: dict, logg: ConfigurationCheckResult):
    """Validate all boolean parameters."""
    if c_key in BOOL_KEYS:
        keyz[c_key] = invalid(logg, c_val) if not bool_str(c_val) else True


def validate_max_threads(c_key: str, c_val: str, keyz: dict, logg: ConfigurationCheckResult):
    """Validate the max_threads parameter."""
    if c_key == "max_threads":
        try:
            hit = False
            if not c_val:
                c_val = 0
            if int(c_val) < 0:
                hit = invalid(logg, c_val)
            if int(c_val) > 64:
                hit = warning(logg, "WARNING: Potentially dangerous thread count specified")
            if hit:
                keyz[c_key] = hit
        except ValueError:
            keyz[c_key] = invalid(logg, c_val)


def show_debug_detail(c_key: str, c_val: str, _: dict, logg: ConfigurationCheckResult):
    """Show parameter value debug output."""
    logg.put(f"DEBUG: {c_val if c_val else 'value not specified'}")


def invalid(log_device: ConfigurationCheckResult, c_value: str):
    """Log an invalid parameter value error."""
    log_device.put(f"ERROR: Invalid value specified ({c_value})")

    return False


def validate_config(config_file: str = None, debugging: bool = False, no_banner: bool = False):
    """Review the configuration contents for errors and report the results."""
    out = ConfigurationCheckResult(config_logging(debugging))
    found_keys = []
    if not no_banner:
        for line in CONFIG_BANNER.split("\n"):
            print(f"[{cur_time()}] INFO     config  {line}")
    else:
        print(f"[{cur_time()}] INFO     config  CHECK CONFIG")
    config = read_config_file(config_file)
    keys = generate_primer()
    for sect in config.sections() if config.sections() else not_found():
        for key in config[sect]:
            out.extra = {"key": key}
            val = config[sect].get(key)
            vals = [key, val, keys, out]
            show_debug_detail(*vals)
            validate_run(*vals)
            validate_grid(*vals)
            validate_flux(*vals)
            validate_tolerances(*vals)
            validate_sweeps(*vals)
            validate_thresholds(*vals)
            validate_booleans(*vals)
            validate_max_threads(*vals)
            found_keys.append(key)
    if not config.sections():
        out.valid = False
    check_for_missing(out, keys, found_keys)

    return is_valid_config(out)
