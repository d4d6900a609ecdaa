"""Shared exception types.

Two failure families are distinguished deliberately:

* ``ResourceCapError`` marks a refused computation (too large for the
  exact-arithmetic or state-materialization budget).  Callers are told
  which cheaper route to take; the CLI maps this to exit code 3.
* ``PrecisionFailure`` marks a broken internal guarantee (a rigorous
  bound violated at working precision, or an eigenvalue far below
  zero).  These are never repaired silently.
"""


class ResourceCapError(RuntimeError):
    """A computation was refused because it exceeds a configured cap."""


class PrecisionFailure(ArithmeticError):
    """A mathematically guaranteed property failed at working precision."""
