"""Size caps shared by every exponential routine.

Defaults can be overridden through environment variables, which is how the
CLI picks them up.
"""
import os
from dataclasses import asdict, dataclass


class CapExceeded(ValueError):
    """Raised when an instance is too large for an exact routine."""


def _env_int(name, default):
    value = os.environ.get(name)
    if value is None:
        return default
    value = int(value)
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class Caps:
    oracle: int = 24
    subset_dp: int = 22
    exact_order: int = 14

    @classmethod
    def from_env(cls):
        return cls(
            oracle=_env_int("OBDDWIDTH_ORACLE_CAP", cls.oracle),
            subset_dp=_env_int("OBDDWIDTH_SUBSET_DP_CAP", cls.subset_dp),
            exact_order=_env_int("OBDDWIDTH_EXACT_ORDER_CAP", cls.exact_order),
        )

    def as_dict(self):
        return asdict(self)


DEFAULT_CAPS = Caps()


def check_cap(size, cap, what):
    if size > cap:
        raise CapExceeded(f"{what}: {size} exceeds cap {cap}")
