"""Error taxonomy shared by the library, the service and the CLI."""

import os


class InputError(ValueError):
    """Malformed or inconsistent input (parse errors, arity mismatches,
    violated preconditions). Maps to HTTP 400 / exit code 2."""


class GuardExceeded(RuntimeError):
    """An exact-computation size guard was hit. Maps to HTTP 413 / exit code 3."""


def guards_overridden() -> bool:
    return os.environ.get("MINSUP_GUARD_OVERRIDE") == "1"


def check_guard(value: int, limit: int, what: str) -> None:
    """Raise GuardExceeded when value exceeds limit, unless overridden by
    the MINSUP_GUARD_OVERRIDE=1 environment variable."""
    if value > limit and not guards_overridden():
        raise GuardExceeded(
            f"{what}: size {value} exceeds guard {limit} "
            "(set MINSUP_GUARD_OVERRIDE=1 to force)"
        )
