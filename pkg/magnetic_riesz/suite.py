from enum import Enum

# Short names used by older configuration files and run scripts.
ALIASES = {
    "ream1": "distance",
    "ream2": "flux_tail",
    "ream3": "cosh_tails",
    "ream4": "cosh_tails",
    "lemma43": "dyadic",
}

class Suite(Enum):
    """Bound verification suite enumerator."""

    DISTANCE = "distance"
    FLUX_TAIL = "flux_tail"
    COSH_TAILS = "cosh_tails"
    DECAY = "decay"
    DYADIC = "dyadic"
    MODEL = "model"
    DIFFERENCE = "difference"
    PHASE = "phase"
    TRUNCATION = "truncation"
    SCALING = "scaling"
    INTEGER_FLUX = "integer_flux"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            name = value.strip().lower().replace("-", "_")
            name = ALIASES.get(name, name)
            for member in cls:
                if member.value == name:
                    return member
        return None
