"""Exact-rational and high-precision harmonic-number arithmetic.

Harmonic numbers H_n = sum_{i=1}^{n} 1/i are the backbone of every
closed-form average-subsystem quantity in this package.  This module
provides them two ways:

* ``harmonic(n)``: the exact rational value, for n up to
  ``EXACT_HARMONIC_CAP``.  Computed by binary splitting so that only a
  single gcd reduction happens at the end.
* ``harmonic_approx(n, digits)``: an arbitrary-precision real with
  absolute error below 10**(-digits), via the Euler-Maclaurin expansion
  gamma + ln n + 1/(2n) - 1/(12 n^2) + 1/(120 n^4) - 1/(252 n^6),
  falling back to exact summation for n too small for the series to
  reach the requested accuracy.

On top of these sit the classical enclosures of H_n - gamma - ln n used
by the rigorous bound sweeps: the Havil interval, the Franel form, the
fourth-order form, and the weak ln-only bound.  Each enclosure function
verifies its own guarantee at working precision and raises
``PrecisionFailure`` instead of ever returning a value that violates it.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp

from .errors import PrecisionFailure, ResourceCapError

# Euler-Mascheroni constant, 50 decimal digits (OEIS A001620).  Treated
# as exact at every working precision used here, which caps the usable
# request at MAX_DIGITS below.
EULER_GAMMA_50 = "0.57721566490153286060651209008240243104215933593992"

# Exact big-rational summation beyond this is slow (the denominator of
# H_n carries ~0.43*n digits); larger arguments take the series route.
EXACT_HARMONIC_CAP = 100_000

DEFAULT_DIGITS = 30
MAX_DIGITS = 45  # bounded by the hard-coded 50-digit gamma


def _require_positive(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")


def _require_digits(digits: int) -> None:
    if not isinstance(digits, int) or digits < 1:
        raise ValueError(f"digits must be a positive integer, got {digits!r}")
    if digits > MAX_DIGITS:
        raise ValueError(
            f"digits={digits} exceeds the {MAX_DIGITS}-digit ceiling set by "
            "the stored Euler-Mascheroni constant"
        )


def _split_sum(lo: int, hi: int) -> tuple[int, int]:
    # Unreduced (numerator, denominator) of sum_{i=lo}^{hi} 1/i.
    if lo == hi:
        return 1, lo
    mid = (lo + hi) // 2
    p1, q1 = _split_sum(lo, mid)
    p2, q2 = _split_sum(mid + 1, hi)
    return p1 * q2 + p2 * q1, q1 * q2


def _harmonic_fraction(n: int) -> Fraction:
    # Internal, uncapped.  Single reduction at the end.
    return Fraction(*_split_sum(1, n))


@lru_cache(maxsize=4096)
def harmonic(n: int) -> Fraction:
    """Exact n-th harmonic number as a Fraction in lowest terms.

    Raises ``ResourceCapError`` above ``EXACT_HARMONIC_CAP``; callers
    needing larger arguments should use :func:`harmonic_approx`.
    """
    _require_positive(n)
    if n > EXACT_HARMONIC_CAP:
        raise ResourceCapError(
            f"exact harmonic numbers are capped at n = {EXACT_HARMONIC_CAP} "
            f"(got n = {n}); use harmonic_approx for larger arguments"
        )
    return _harmonic_fraction(n)


def euler_gamma(digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """The Euler-Mascheroni constant rounded to the working precision."""
    _require_digits(digits)
    with mp.workdps(digits + 10):
        return +mpmath.mpf(EULER_GAMMA_50)


def _series_threshold(digits: int) -> int:
    # The magnitude of the first omitted Euler-Maclaurin term,
    # 1/(240 n^8), bounds the truncation error of the n^-6 series.
    # Require it below 10**-(digits+2) before trusting the series.
    bound = 10 ** (digits + 2)
    n = max(2, round((bound / 240) ** 0.125))
    while 240 * n**8 < bound:
        n += 1
    while n > 2 and 240 * (n - 1) ** 8 >= bound:
        n -= 1
    return n


def _harmonic_series(n: int, dps: int) -> mpmath.mpf:
    with mp.workdps(dps):
        x = mpmath.mpf(n)
        tail = 1 / (2 * x) - 1 / (12 * x**2) + 1 / (120 * x**4) - 1 / (252 * x**6)
        return mpmath.mpf(EULER_GAMMA_50) + mpmath.ln(x) + tail


def harmonic_approx(n: int, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """H_n as an arbitrary-precision real, absolute error < 10**-digits.

    Uses the Euler-Maclaurin expansion through the n^-6 term once n is
    large enough for the truncation error to clear the target; below
    that, falls back to exact summation so the promise holds for every
    n >= 1.
    """
    _require_positive(n)
    _require_digits(digits)
    guard = 15
    if n < _series_threshold(digits):
        with mp.workdps(digits + guard):
            return +mpmath.mpmathify(_harmonic_fraction(n))
    return _harmonic_series(n, digits + guard)


def _harmonic_real(n: int, dps: int) -> mpmath.mpf:
    # High-precision H_n at an explicit working dps: exact below the
    # cap, series above it (where the series error is ~1/(240 n^8),
    # negligible against every enclosure margin tested).
    if n <= EXACT_HARMONIC_CAP:
        with mp.workdps(dps):
            return +mpmath.mpmathify(_harmonic_fraction(n))
    return _harmonic_series(n, dps)


def havil_epsilon(n: int, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """epsilon_n = H_n - gamma - ln n, guaranteed inside
    (1/(2(n+1)), 1/(2n)).

    The enclosure is checked at working precision; a violation means the
    internal arithmetic is broken and raises ``PrecisionFailure``.
    """
    _require_positive(n)
    _require_digits(digits)
    dps = digits + 20
    with mp.workdps(dps):
        h = _harmonic_real(n, dps)
        eps = h - mpmath.mpf(EULER_GAMMA_50) - mpmath.ln(n)
        lo = mpmath.mpf(1) / (2 * (n + 1))
        hi = mpmath.mpf(1) / (2 * n)
        if not (lo < eps < hi):
            raise PrecisionFailure(
                f"Havil enclosure failed at n={n}: eps={eps} not in ({lo}, {hi})"
            )
        return +eps


def franel_epsilon(n: int, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """The residual of the Franel form, solving
    H_n = gamma + ln n + 1/(2n) - eps/(8 n^2), guaranteed in (0, 1)."""
    _require_positive(n)
    _require_digits(digits)
    dps = digits + 20
    with mp.workdps(dps):
        h = _harmonic_real(n, dps)
        x = mpmath.mpf(n)
        eps = 8 * x**2 * (mpmath.mpf(EULER_GAMMA_50) + mpmath.ln(x) + 1 / (2 * x) - h)
        if not (0 < eps < 1):
            raise PrecisionFailure(f"Franel residual failed at n={n}: eps={eps}")
        return +eps


def fourth_order_epsilon(n: int, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """The residual of the fourth-order form, solving
    H_n = gamma + ln n + 1/(2n) - 1/(12 n^2) + eps/(120 n^4),
    guaranteed in (0, 1)."""
    _require_positive(n)
    _require_digits(digits)
    dps = digits + 20
    with mp.workdps(dps):
        h = _harmonic_real(n, dps)
        x = mpmath.mpf(n)
        base = mpmath.mpf(EULER_GAMMA_50) + mpmath.ln(x) + 1 / (2 * x) - 1 / (12 * x**2)
        eps = 120 * x**4 * (h - base)
        if not (0 < eps < 1):
            raise PrecisionFailure(f"fourth-order residual failed at n={n}: eps={eps}")
        return +eps


def weak_epsilon(n: int, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """epsilon~_n = H_n - ln n, guaranteed in (1/n, 1] with the value 1
    attained only at n = 1 (where both interval ends coincide)."""
    _require_positive(n)
    _require_digits(digits)
    dps = digits + 20
    with mp.workdps(dps):
        h = _harmonic_real(n, dps)
        eps = h - mpmath.ln(n)
        if n == 1:
            if eps != 1:
                raise PrecisionFailure(f"weak residual failed at n=1: eps={eps}")
        elif not (mpmath.mpf(1) / n < eps < 1):
            raise PrecisionFailure(
                f"weak enclosure failed at n={n}: eps={eps} not in (1/{n}, 1)"
            )
        return +eps


def to_real(value: Fraction | int, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """Round an exact rational to the working precision.

    Not subject to the gamma-constant digit ceiling; rational-only
    paths may run at any precision.
    """
    if not isinstance(digits, int) or digits < 1:
        raise ValueError(f"digits must be a positive integer, got {digits!r}")
    with mp.workdps(digits + 10):
        return +mpmath.mpmathify(value)
