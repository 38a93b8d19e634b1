"""Enumeration cap shared by the exhaustive checkers and constructors."""

from __future__ import annotations

import os

from .errors import ResourceError

DEFAULT_MAX_CARRIER = 64
ENV_VAR = "OPCMLINK_MAX_CARRIER"


def max_carrier() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return DEFAULT_MAX_CARRIER
    try:
        value = int(raw)
    except ValueError:
        raise ResourceError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ResourceError(f"{ENV_VAR} must be positive, got {value}")
    return value


def ensure_within_cap(size: int, what: str, cap: int | None = None) -> None:
    limit = max_carrier() if cap is None else cap
    if size > limit:
        raise ResourceError(
            f"{what} has {size} elements, above the enumeration cap of {limit} "
            f"(set {ENV_VAR} to raise it)"
        )
