"""Multi-partite Hilbert-space factorizations and subsystem collections.

A ``FactorList`` records the ordered factor dimensions n_1..n_N of a
tensor-product space; a ``Selector`` names a collection of those factors
and carries its kept and complement dimensions.  All dimension products
use Python integers, so analytic formulas never overflow; only the
Monte Carlo path imposes machine-size caps (see ``sampler``).

Flat-index convention (a bit-exact contract relied on by the partial
trace and its tests): factor index 0 is the most significant digit of
the mixed-radix flat index, i.e. row-major / C order.

The textual forms used by the CLI are parsed here: dimensions as
"2x3x5" and selectors as comma-separated zero-based indices like "0,2"
(empty string for the empty collection).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence


@dataclass(frozen=True)
class FactorList:
    """Ordered factor dimensions of a tensor-product space."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.dims:
            raise ValueError("a factorization needs at least one factor")
        cleaned = []
        for i, d in enumerate(self.dims):
            if not isinstance(d, int) or isinstance(d, bool) or d < 1:
                raise ValueError(f"factor {i} has invalid dimension {d!r}")
            cleaned.append(int(d))
        object.__setattr__(self, "dims", tuple(cleaned))

    @classmethod
    def parse(cls, text: str) -> "FactorList":
        """Parse the CLI syntax "2x3x5"."""
        parts = text.lower().split("x")
        try:
            dims = tuple(int(p) for p in parts)
        except ValueError:
            raise ValueError(f"cannot parse dimension list {text!r}") from None
        return cls(dims)

    @property
    def count(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return prod(self.dims)

    def select(self, indices: "Iterable[int] | str") -> "Selector":
        if isinstance(indices, str):
            return Selector.parse(self, indices)
        return Selector(self, tuple(sorted(indices)))

    def __str__(self) -> str:
        return "x".join(str(d) for d in self.dims)


@dataclass(frozen=True)
class Selector:
    """A collection of factor indices within one FactorList."""

    factors: FactorList
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", tuple(self.indices))
        seen = set()
        for i in self.indices:
            if not isinstance(i, int) or isinstance(i, bool):
                raise ValueError(f"selector index {i!r} is not an integer")
            if i < 0 or i >= self.factors.count:
                raise ValueError(
                    f"selector index {i} out of range for {self.factors.count} factors"
                )
            if i in seen:
                raise ValueError(f"selector index {i} repeated")
            seen.add(i)
        if any(a >= b for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError(f"selector indices must be increasing, got {self.indices}")

    @classmethod
    def parse(cls, factors: FactorList, text: str) -> "Selector":
        """Parse the CLI syntax "0,2" (empty string keeps nothing)."""
        text = text.strip()
        if not text:
            return cls(factors, ())
        try:
            raw = [int(p) for p in text.split(",")]
        except ValueError:
            raise ValueError(f"cannot parse selector {text!r}") from None
        return cls(factors, tuple(sorted(raw)))

    @property
    def kept_dim(self) -> int:
        return prod(self.factors.dims[i] for i in self.indices)

    @property
    def complement_dim(self) -> int:
        return self.factors.total // self.kept_dim

    def complement(self) -> "Selector":
        rest = tuple(i for i in range(self.factors.count) if i not in set(self.indices))
        return Selector(self.factors, rest)

    def __str__(self) -> str:
        return ",".join(str(i) for i in self.indices)


@dataclass(frozen=True)
class MinMaxSplit:
    """A dimension pair ordered as m = min, M = max with m * M = total."""

    m: int
    M: int

    def __post_init__(self) -> None:
        if self.m > self.M:
            raise ValueError(f"split requires m <= M, got m={self.m}, M={self.M}")


def collection_dims(factors: FactorList, sel: Selector) -> tuple[int, int]:
    """(kept, complement) dimensions of a collection; their product is total."""
    if sel.factors != factors:
        raise ValueError("selector was built for a different factorization")
    return sel.kept_dim, sel.complement_dim


def min_max_split(kept_dim: int, total: int) -> MinMaxSplit:
    """Order (kept, total/kept) as (min, max).  kept must divide total."""
    if kept_dim < 1 or total < 1 or total % kept_dim != 0:
        raise ValueError(f"kept dimension {kept_dim} does not divide total {total}")
    other = total // kept_dim
    return MinMaxSplit(min(kept_dim, other), max(kept_dim, other))


def disjoint(sel_a: Selector, sel_b: Selector) -> bool:
    """True iff the two collections share no factor index."""
    if sel_a.factors != sel_b.factors:
        raise ValueError("selectors belong to different factorizations")
    return not (set(sel_a.indices) & set(sel_b.indices))


def union(sel_a: Selector, sel_b: Selector) -> Selector:
    if sel_a.factors != sel_b.factors:
        raise ValueError("selectors belong to different factorizations")
    return Selector(sel_a.factors, tuple(sorted(set(sel_a.indices) | set(sel_b.indices))))


def flat_index(factors: FactorList, multi: Sequence[int]) -> int:
    """Row-major flat index of a multi-index (factor 0 most significant)."""
    if len(multi) != factors.count:
        raise ValueError(f"multi-index length {len(multi)} != {factors.count} factors")
    flat = 0
    for d, i in zip(factors.dims, multi):
        if i < 0 or i >= d:
            raise ValueError(f"digit {i} out of range for factor of dimension {d}")
        flat = flat * d + i
    return flat


def multi_index(factors: FactorList, flat: int) -> tuple[int, ...]:
    """Inverse of :func:`flat_index`."""
    if flat < 0 or flat >= factors.total:
        raise ValueError(f"flat index {flat} out of range for total {factors.total}")
    digits = []
    for d in reversed(factors.dims):
        digits.append(flat % d)
        flat //= d
    return tuple(reversed(digits))
