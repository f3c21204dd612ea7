"""Size caps shared by every module that materializes dense objects."""

from __future__ import annotations

import os

DEFAULT_MAX_DIM = 2**14
PERMUTATION_ENUMERATION_CAP = 9  # largest n for which all of S_n is listed
MATCHING_ENUMERATION_CAP = 6     # largest n for which matchings of [2n] are listed

_max_dim_override: int | None = None


class DimensionGuardError(ValueError):
    """Raised when a requested dense object exceeds the configured size cap."""


def max_dim() -> int:
    """Current cap on the side length of dense operators."""
    if _max_dim_override is not None:
        return _max_dim_override
    env = os.environ.get("SYMSUB_MAX_DIM")
    if env:
        return int(env)
    return DEFAULT_MAX_DIM


def set_max_dim(value: int | None) -> None:
    """Override the operator size cap; None restores the default/env value."""
    global _max_dim_override
    if value is not None and value < 1:
        raise ValueError("max dim must be positive")
    _max_dim_override = value


def guard_dimension(dim: int, what: str = "operator") -> None:
    if dim > max_dim():
        raise DimensionGuardError(
            f"refusing to materialize {what} of dimension {dim} "
            f"(cap {max_dim()}; raise via set_max_dim, --max-dim or SYMSUB_MAX_DIM)"
        )


def guard_permutations(n: int) -> None:
    if n > PERMUTATION_ENUMERATION_CAP:
        raise DimensionGuardError(
            f"refusing to enumerate S_{n} ({n}! elements; cap n <= {PERMUTATION_ENUMERATION_CAP})"
        )


def guard_matchings(n: int) -> None:
    if n > MATCHING_ENUMERATION_CAP:
        raise DimensionGuardError(
            f"refusing to enumerate perfect matchings of [2*{n}] "
            f"((2n-1)!! elements; cap n <= {MATCHING_ENUMERATION_CAP})"
        )
