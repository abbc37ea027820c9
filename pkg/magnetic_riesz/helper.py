"""Helper methods."""
from logging import Logger
from typing import List


def thousands(int_to_format: int):
    return f"{int_to_format:,}"


def format_seconds(val: float):
    parts = f"{float(val):.2f}".split(".")
    return ".".join([thousands(int(parts[0])), parts[1]])


def confirm_boolean_param(val: str or bool) -> bool:
    returned = False
    if "T" in str(val).upper():
        returned = True

    return returned


def split_list(val: str) -> List[str]:
    """Comma separated configuration value to a list of stripped, non-empty items."""
    return [item.strip() for item in str(val or "").split(",") if item.strip()]


def display_banner(banner: str = None,
                   logger: Logger = None,
                   fallback: str = None,
                   hide_cool_banners: bool = False
                   ):
    """Logging helper to handle banner disablement."""
    if banner and logger:
        if not hide_cool_banners:
            for line in banner.split("\n"):
                logger.info(line, extra={"key": ""})
        else:
            if fallback:
                logger.info(fallback, extra={"key": ""})


RIESZ_BANNER = r"""
 ____   _                       ____  _
|  _ \ (_) ___  ___  ____      |  _ \| |__   __ _ _ __ _ __   ___  ___ ___
| |_) || |/ _ \/ __||_  /_____ | |_) | '_ \ / _` | '__| '_ \ / _ \/ __/ __|
|  _ < | |  __/\__ \ / /|_____||  _ <| | | | (_| | |  | | | |  __/\__ \__ \
|_| \_\|_|\___||___//___|      |_| \_\_| |_|\__,_|_|  |_| |_|\___||___/___/
"""
CONFIG_BANNER = r"""
 ___  ___  _  _  ___  ___  ___
/ __|/ _ \| \| || __||_ _|/ __|
| (__| (_) | .` || _|  | || (_ |
\___|\___/|_|\_||_|  |___|\___|
"""
VERIFY_BANNER = r"""
__   __ ___  ___  ___  ___ __   __
\ \ / /| __|| _ \|_ _|| __|\ \ / /
 \ V / | _| |   / | | | _|  \ V /
  \_/  |___||_|_\|___||_|    |_|
"""
FINISHED_BANNER = r"""
 ___  ___  _  _  ___  ___  _  _  ___  ___
| __||_ _|| \| ||_ _|/ __|| || || __||   \
| _|  | | | .` | | | \__ \| __ || _| | |) |
|_|  |___||_|\_||___||___/|_||_||___||___/
"""
CHECKS_PASSED = r"""
  ___  _  _  ___  ___  _  __ ___     ___   _    ___  ___  ___  ___
 / __|| || || __|/ __|| |/ // __|   | _ \ /_\  / __|/ __|| __||   \
| (__ | __ || _|| (__ | ' < \__ \   |  _// _ \ \__ \\__ \| _| | |) |
 \___||_||_||___|\___||_|\_\|___/   |_| /_/ \_\|___/|___/|___||___/
"""
CHECKS_FAILED = r"""
  ___  _  _  ___  ___  _  __ ___     ___   _    ___  _     ___  ___
 / __|| || || __|/ __|| |/ // __|   | __| /_\  |_ _|| |   | __||   \
| (__ | __ || _|| (__ | ' < \__ \   | _| / _ \  | | | |__ | _| | |) |
 \___||_||_||___|\___||_|\_\|___/   |_| /_/ \_\|___||____||___||___/
"""
