"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
InputError for anything a caller could have gotten wrong (bad arguments,
malformed files) and InvariantError when internal state turns out to be
inconsistent.
"""


class InputError(ValueError):
    """Bad user-supplied data or configuration (CLI exit code 2)."""


class InvariantError(RuntimeError):
    """Internal algorithm state violated an invariant (CLI exit code 3)."""
