from enum import Enum

class EvalMethod(Enum):
    """Bessel evaluation method enumerator."""

    SERIES = "series"
    ASYMPTOTIC = "asymptotic"
