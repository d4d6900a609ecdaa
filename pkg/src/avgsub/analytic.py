"""Closed-form average-subsystem quantities.

Everything here is an exact statement about the uniform (Haar) average
over pure states of a finite-dimensional tensor-product space.  The
bipartite mean entropy

    S(n_a, n_b) = H_{mM} - H_M - (m - 1) / (2M),
    m = min(n_a, n_b),  M = max(n_a, n_b),

is an exact rational number, and so is the tripartite mean mutual
information between two collections dominated by their environment.
Values are therefore carried as Fractions wherever possible and only
rounded to arbitrary-precision reals (mpmath) at the requested number
of digits; quantities mixing in logarithms keep their rational part
alongside the rounded total.

The "thermodynamic" limits (one factor grown without bound) and the
stated approximation formulas live here too.  Approximations are never
presented as exact: their results carry an ``approximate`` flag plus
the validity slack in nats, and the CLI surfaces both.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp

from . import exactmath
from .exactmath import DEFAULT_DIGITS, EXACT_HARMONIC_CAP, harmonic, harmonic_approx
from .partition import FactorList, Selector, disjoint, min_max_split

_GUARD = 15


@dataclass(frozen=True)
class EntropyValue:
    """A mean subsystem entropy in nats.

    ``exact`` holds the full rational value when the harmonic numbers
    involved are below the exact cap.  ``approximate`` marks results of
    the stated approximation formulas (never the exact averages), with
    ``slack_nats`` recording the guaranteed validity width.
    """

    nats: mpmath.mpf
    exact: Optional[Fraction] = None
    approximate: bool = False
    slack_nats: Optional[Fraction] = None

    def __float__(self) -> float:
        return float(self.nats)


@dataclass(frozen=True)
class InfoValue:
    """A mean subsystem-information or mutual-information value in nats."""

    nats: mpmath.mpf
    exact: Optional[Fraction] = None

    def __float__(self) -> float:
        return float(self.nats)


def _require_dim(n: int, name: str) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"{name} must be a positive integer dimension, got {n!r}")


def _ln(x, dps: int) -> mpmath.mpf:
    with mp.workdps(dps):
        return +mpmath.ln(mpmath.mpmathify(x))


def _h_real(n: int, dps: int) -> mpmath.mpf:
    if n <= EXACT_HARMONIC_CAP:
        with mp.workdps(dps):
            return +mpmath.mpmathify(harmonic(n))
    return exactmath._harmonic_real(n, dps)


# ---------------------------------------------------------------------------
# bipartite closed forms
# ---------------------------------------------------------------------------


def page_sen_entropy(n_a: int, n_b: int, digits: int = DEFAULT_DIGITS) -> EntropyValue:
    """Mean entanglement entropy of either side of a random bipartite
    pure state: H_{mM} - H_M - (m-1)/(2M) nats.

    Exact rational whenever m*M is below the exact harmonic cap.
    """
    _require_dim(n_a, "n_a")
    _require_dim(n_b, "n_b")
    m, big = min(n_a, n_b), max(n_a, n_b)
    if m == 1:
        return EntropyValue(exactmath.to_real(0, digits), Fraction(0))
    dps = digits + _GUARD
    if m * big <= EXACT_HARMONIC_CAP:
        exact = harmonic(m * big) - harmonic(big) - Fraction(m - 1, 2 * big)
        return EntropyValue(exactmath.to_real(exact, digits), exact)
    with mp.workdps(dps):
        nats = _h_real(m * big, dps) - _h_real(big, dps) - mpmath.mpf(m - 1) / (2 * big)
        return EntropyValue(+nats, None)


def entropy_deficit(n_a: int, n_b: int, digits: int = DEFAULT_DIGITS) -> InfoValue:
    """Distance below maximal mixing: Delta = S(n_a, n_b) - ln m.

    Exactly 0 for m = 1; for m >= 2 it lies strictly inside
    (-m/(2M), -(m-1)/(2M)), so the mean entropy is always within half a
    nat of ln m.
    """
    _require_dim(n_a, "n_a")
    _require_dim(n_b, "n_b")
    m = min(n_a, n_b)
    if m == 1:
        return InfoValue(exactmath.to_real(0, digits), Fraction(0))
    s = page_sen_entropy(n_a, n_b, digits + _GUARD)
    dps = digits + _GUARD
    with mp.workdps(dps):
        return InfoValue(+(s.nats - mpmath.ln(m)))


def symmetric_info(n_a: int, n_b: int, digits: int = DEFAULT_DIGITS) -> InfoValue:
    """Mean subsystem information ln m - S(n_a, n_b) = -Delta.

    Strictly inside ((m-1)/(2M), m/(2M)) for m >= 2, hence always below
    half a nat; exactly 0 for m = 1.
    """
    d = entropy_deficit(n_a, n_b, digits)
    with mp.workdps(digits + _GUARD):
        return InfoValue(+(-d.nats), d.exact)


def asymmetric_info(
    n_a: int, n_b: int, digits: int = DEFAULT_DIGITS
) -> tuple[InfoValue, InfoValue, InfoValue]:
    """The two one-sided informations and their mean.

    I~(a,b) = ln n_a - S and I~(b,a) = ln n_b - S, so the difference is
    exactly ln(n_a/n_b) and the mean works out to
    ln sqrt(M/m) + symmetric_info(n_a, n_b).
    """
    _require_dim(n_a, "n_a")
    _require_dim(n_b, "n_b")
    dps = digits + _GUARD
    s = page_sen_entropy(n_a, n_b, digits + _GUARD)
    with mp.workdps(dps):
        t_ab = +(mpmath.ln(n_a) - s.nats)
        t_ba = +(mpmath.ln(n_b) - s.nats)
        avg = +((t_ab + t_ba) / 2)
    return InfoValue(t_ab), InfoValue(t_ba), InfoValue(avg)


def avg_purity(n_a: int, n_b: int) -> Fraction:
    """Mean purity of a reduced state: (n_a + n_b) / (n_a n_b + 1)."""
    _require_dim(n_a, "n_a")
    _require_dim(n_b, "n_b")
    return Fraction(n_a + n_b, n_a * n_b + 1)


def avg_tangle(n_a: int, n_b: int) -> Fraction:
    """Mean tangle 2 (m-1)(M-1) / (mM + 1), i.e. 2 (1 - mean purity)."""
    _require_dim(n_a, "n_a")
    _require_dim(n_b, "n_b")
    m, big = min(n_a, n_b), max(n_a, n_b)
    return Fraction(2 * (m - 1) * (big - 1), m * big + 1)


def concurrence_bound(n_a: int, n_b: int, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """Upper bound on the mean concurrence: sqrt of the mean tangle
    (Jensen, since the tangle is the squared concurrence)."""
    t = avg_tangle(n_a, n_b)
    with mp.workdps(digits + _GUARD):
        return +mpmath.sqrt(mpmath.mpmathify(t))


def tangle_deficit(n_a: int, n_b: int) -> Fraction:
    """Distance of the mean tangle below its large-M limit:
    2 (m^2 - 1) / (m (mM + 1)), never more than 2/M."""
    _require_dim(n_a, "n_a")
    _require_dim(n_b, "n_b")
    m, big = min(n_a, n_b), max(n_a, n_b)
    return Fraction(2 * (m * m - 1), m * (m * big + 1))


# ---------------------------------------------------------------------------
# tripartite closed forms (dominant environment)
# ---------------------------------------------------------------------------


def _require_dominant_environment(n_a: int, n_b: int, n_c: int) -> None:
    if n_a * n_b > n_c:
        raise ValueError(
            "tripartite closed form requires a dominant environment "
            f"(n_a * n_b <= n_c); got n_a*n_b = {n_a * n_b} > n_c = {n_c}"
        )


def tripartite_avg_mutual_info(
    n_a: int, n_b: int, n_c: int, digits: int = DEFAULT_DIGITS
) -> InfoValue:
    """Mean mutual information between A and B inside a random pure
    state on A x B x C, for a dominant environment (n_a n_b <= n_c):

        H_n + H_{n_c} - H_{n_a n_c} - H_{n_b n_c}
          + (n_a-1)(n_b-1)(n_a n_b + n_a + n_b) / (2 n),   n = n_a n_b n_c.

    Always in [0, n_a n_b / (2 n_c)] and hence at most half a nat.
    Refuses outside the dominant-environment regime, where this closed
    form does not apply.
    """
    _require_dim(n_a, "n_a")
    _require_dim(n_b, "n_b")
    _require_dim(n_c, "n_c")
    _require_dominant_environment(n_a, n_b, n_c)
    n = n_a * n_b * n_c
    poly = Fraction((n_a - 1) * (n_b - 1) * (n_a * n_b + n_a + n_b), 2 * n)
    if n <= EXACT_HARMONIC_CAP:
        exact = harmonic(n) + harmonic(n_c) - harmonic(n_a * n_c) - harmonic(n_b * n_c) + poly
        return InfoValue(exactmath.to_real(exact, digits), exact)
    dps = digits + _GUARD
    with mp.workdps(dps):
        nats = (
            _h_real(n, dps)
            + _h_real(n_c, dps)
            - _h_real(n_a * n_c, dps)
            - _h_real(n_b * n_c, dps)
            + mpmath.mpmathify(poly)
        )
        return InfoValue(+nats, None)


def tripartite_mutual_info_bound(n_a: int, n_b: int, n_c: int) -> Fraction:
    """The dominant-environment ceiling n_a n_b / (2 n_c) on the mean
    A:B mutual information; itself at most 1/2."""
    _require_dim(n_a, "n_a")
    _require_dim(n_b, "n_b")
    _require_dim(n_c, "n_c")
    _require_dominant_environment(n_a, n_b, n_c)
    return Fraction(n_a * n_b, 2 * n_c)


def tripartite_entropy_sum_approx(
    n_a: int, n_b: int, n_c: int, digits: int = DEFAULT_DIGITS
) -> EntropyValue:
    """Approximation to the mean total subsystem entropy
    <S_A + S_B + S_C> for a random tripartite pure state:

        ln n + min{0, ln n - 2 max(ln n_a, ln n_b, ln n_c)},  n = n_a n_b n_c.

    Each of the three entropies is within half a nat of its maximum, so
    this is valid to within 3/2 nat; the result is flagged accordingly.
    """
    _require_dim(n_a, "n_a")
    _require_dim(n_b, "n_b")
    _require_dim(n_c, "n_c")
    n = n_a * n_b * n_c
    top = max(n_a, n_b, n_c)
    arg = Fraction(n) if n >= top * top else Fraction(n * n, top * top)
    nats = _ln(arg, digits + _GUARD)
    return EntropyValue(nats, None, approximate=True, slack_nats=Fraction(3, 2))


# ---------------------------------------------------------------------------
# multi-partite collections
# ---------------------------------------------------------------------------


def multipartite_collection_entropy(
    factors: FactorList, sel: Selector, digits: int = DEFAULT_DIGITS
) -> EntropyValue:
    """Mean entropy of an arbitrary collection of factors: the bipartite
    closed form applied to (collection dimension, complement dimension).

    Always within half a nat below ln min(kept, complement)."""
    if sel.factors != factors:
        raise ValueError("selector was built for a different factorization")
    split = min_max_split(sel.kept_dim, factors.total)
    return page_sen_entropy(split.m, split.M, digits)


def multipartite_mutual_info_bound(
    factors: FactorList, sel_a: Selector, sel_b: Selector
) -> Fraction:
    """Ceiling on the mean mutual information between two disjoint
    "small" collections A and B: n_A^2 n_B^2 / (2 n), equivalently
    n_A n_B / (2 n_C) with C everything else.

    Requires disjoint collections with n_A^2 n_B^2 <= n (so that C
    dominates); an empty collection gives exactly 0.
    """
    if not disjoint(sel_a, sel_b):
        overlap = sorted(set(sel_a.indices) & set(sel_b.indices))
        raise ValueError(f"collections overlap on factor indices {overlap}")
    dim_a, dim_b = sel_a.kept_dim, sel_b.kept_dim
    if dim_a == 1 or dim_b == 1:
        # The trivial collection is uncorrelated with everything.
        return Fraction(0)
    n = factors.total
    if dim_a * dim_a * dim_b * dim_b > n:
        raise ValueError(
            "smallness condition failed: n_A^2 n_B^2 = "
            f"{dim_a * dim_a * dim_b * dim_b} exceeds the total dimension {n}"
        )
    return Fraction(dim_a * dim_a * dim_b * dim_b, 2 * n)


# ---------------------------------------------------------------------------
# thermodynamic limits
# ---------------------------------------------------------------------------


def thermo_limit_entropy(m: int, digits: int = DEFAULT_DIGITS) -> EntropyValue:
    """Large-environment limit of the mean entropy: exactly ln m, with
    |S(m, M) - ln m| <= m/(2M) for every M >= m."""
    _require_dim(m, "m")
    if m == 1:
        return EntropyValue(exactmath.to_real(0, digits), Fraction(0))
    return EntropyValue(_ln(m, digits + _GUARD), None)


def thermo_limit_tangle(m: int) -> Fraction:
    """Large-environment limit of the mean tangle: 2 (1 - 1/m).  The
    limiting concurrence bound is its square root."""
    _require_dim(m, "m")
    return Fraction(2 * (m - 1), m)
