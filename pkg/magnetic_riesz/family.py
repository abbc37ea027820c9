from enum import Enum

class Family(Enum):
    """Indicator families used by the ratio sweeps."""

    BALLS = "balls"
    ANNULI = "annuli"
    SHRINKING_ANNULI = "shrinking_annuli"
    TUBES = "tubes"
