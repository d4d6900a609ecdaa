"""Haar-uniform state sampling and reproducible Monte Carlo estimation.

Sampling: a state on an n-dimensional space is drawn by taking 2n
independent standard normals as the real and imaginary parts of the
amplitudes and normalizing; unitary invariance of the isotropic
Gaussian makes the result Haar-uniform on the unit sphere.

Reproducibility: every sample index gets its own generator, keyed by
hashing (seed, sample_index) into a counter-based bit generator
(Philox).  The estimate is therefore a pure function of the spec: work
may be farmed out to any number of processes, but sample values depend
only on their index, and the reduction always runs over the values in
index order with compensated summation.  Worker count can never change
a single output bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import quantum
from .errors import ResourceCapError
from .partition import FactorList, Selector, disjoint
from .quantum import PureState, materialization_cap

# Fixed chunking of the sample index range; part of the determinism
# contract only in that chunk boundaries must not depend on the worker
# count (they do not: values are per-index and merged in index order).
CHUNK_SAMPLES = 4096

QUANTITIES = (
    "entropy",
    "purity",
    "tangle",
    "concurrence",
    "negativity",
    "renyi",
    "tsallis",
    "mutual_info",
)

_PAIR_QUANTITIES = ("mutual_info",)
_ORDER_QUANTITIES = ("renyi", "tsallis")

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SampleSpec:
    """One Monte Carlo estimation task."""

    factors: FactorList
    quantity: str
    samples: int
    seed: int
    keep: Optional[Selector] = None
    sel_a: Optional[Selector] = None
    sel_b: Optional[Selector] = None
    q: Optional[float] = None

    def validate(self) -> None:
        if self.quantity not in QUANTITIES:
            raise ValueError(
                f"unknown quantity {self.quantity!r}; expected one of {QUANTITIES}"
            )
        if not isinstance(self.samples, int) or self.samples < 1:
            raise ValueError(f"samples must be a positive integer, got {self.samples!r}")
        if not isinstance(self.seed, int):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        cap = materialization_cap()
        n = self.factors.total
        if n < 2:
            raise ValueError("sampling needs a total dimension of at least 2")
        if n > cap:
            raise ResourceCapError(
                f"total dimension {n} exceeds the materialization cap {cap}"
            )
        if self.quantity in _PAIR_QUANTITIES:
            if self.sel_a is None or self.sel_b is None:
                raise ValueError(f"{self.quantity} needs both collection selectors")
            for sel in (self.sel_a, self.sel_b):
                if sel.factors != self.factors:
                    raise ValueError("selector was built for a different factorization")
            if not disjoint(self.sel_a, self.sel_b):
                raise ValueError("mutual information needs disjoint collections")
            self._check_spectral(self.sel_a)
            self._check_spectral(self.sel_b)
        else:
            if self.keep is None:
                raise ValueError(f"{self.quantity} needs a kept-collection selector")
            if self.keep.factors != self.factors:
                raise ValueError("selector was built for a different factorization")
            self._check_spectral(self.keep)
        if self.quantity in _ORDER_QUANTITIES:
            if self.q is None:
                raise ValueError(f"{self.quantity} needs an order parameter q")
            q = float(self.q)
            if not math.isfinite(q) or q <= 0.0 or q == 1.0:
                raise ValueError(f"entropy order must be positive and != 1, got {q!r}")
        elif self.q is not None:
            raise ValueError(f"{self.quantity} takes no order parameter")

    def _check_spectral(self, sel: Selector) -> None:
        small = min(sel.kept_dim, sel.complement_dim)
        if small > quantum.SPECTRAL_CAP:
            raise ResourceCapError(
                f"cut {sel} has min side {small}, beyond the eigensolver cap "
                f"{quantum.SPECTRAL_CAP}"
            )

    @property
    def descriptor(self) -> str:
        if self.quantity in _PAIR_QUANTITIES:
            detail = f"[{self.sel_a}:{self.sel_b}]"
        else:
            detail = f"[{self.keep}]"
        if self.quantity in _ORDER_QUANTITIES:
            detail += f"(q={float(self.q)!r})"
        return f"{self.quantity}{detail} on {self.factors}"


@dataclass(frozen=True)
class EstimateResult:
    """Monte Carlo output; identical bytes for any worker count."""

    mean: float
    stderr: float
    samples: int
    seed: int
    quantity: str

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
            "quantity": self.quantity,
        }


def stream_for(seed: int, sample_index: int) -> np.random.Generator:
    """The independent generator owned by one sample index.

    (seed, index) is hashed by the seed-sequence machinery into the key
    of a counter-based Philox generator, so streams never depend on how
    samples are scheduled across workers.
    """
    ss = np.random.SeedSequence(entropy=(seed & _SEED_MASK, sample_index))
    return np.random.Generator(np.random.Philox(ss))


def haar_amplitudes(n: int, rng: np.random.Generator) -> np.ndarray:
    """A Haar-uniform unit vector: 2n standard normals, normalized."""
    z = rng.standard_normal(2 * n)
    psi = z[:n] + 1j * z[n:]
    return psi / np.linalg.norm(psi)


def sample_haar_state(factors: FactorList, rng: np.random.Generator) -> PureState:
    """A Haar-uniform pure state over the given factorization."""
    n = factors.total
    if n < 2:
        raise ValueError("sampling needs a total dimension of at least 2")
    cap = materialization_cap()
    if n > cap:
        raise ResourceCapError(f"total dimension {n} exceeds the materialization cap {cap}")
    return PureState(haar_amplitudes(n, rng), factors)


def _evaluator(spec: SampleSpec) -> Callable[[PureState], float]:
    if spec.quantity == "mutual_info":
        sel_a, sel_b = spec.sel_a, spec.sel_b
        return lambda state: quantum.mutual_info(state, sel_a, sel_b)
    keep = spec.keep
    if spec.quantity == "entropy":
        return lambda state: quantum.von_neumann(quantum.spectrum_of(state, keep))
    if spec.quantity == "purity":
        return lambda state: quantum.purity(quantum.spectrum_of(state, keep))
    if spec.quantity == "tangle":
        return lambda state: quantum.tangle(quantum.spectrum_of(state, keep))
    if spec.quantity == "concurrence":
        return lambda state: quantum.concurrence(quantum.spectrum_of(state, keep))
    if spec.quantity == "negativity":
        return lambda state: quantum.pure_state_negativity(quantum.spectrum_of(state, keep))
    q = float(spec.q)
    if spec.quantity == "renyi":
        return lambda state: quantum.renyi(quantum.spectrum_of(state, keep), q)
    return lambda state: quantum.tsallis(quantum.spectrum_of(state, keep), q)


def _chunk_values(spec: SampleSpec, start: int, stop: int) -> np.ndarray:
    evaluate = _evaluator(spec)
    factors = spec.factors
    out = np.empty(stop - start, dtype=np.float64)
    for offset, index in enumerate(range(start, stop)):
        state = sample_haar_state(factors, stream_for(spec.seed, index))
        out[offset] = evaluate(state)
    return out


def _chunk_task(args: tuple[SampleSpec, int, int]) -> np.ndarray:
    return _chunk_values(*args)


def estimate(spec: SampleSpec, workers: int = 1) -> EstimateResult:
    """Mean and standard error of the per-state quantity over exactly
    ``spec.samples`` Haar draws.

    The result is a pure function of the spec: any ``workers`` value
    produces bit-identical output.
    """
    if not isinstance(workers, int) or workers < 1:
        raise ValueError(f"workers must be a positive integer, got {workers!r}")
    spec.validate()
    bounds = [
        (lo, min(lo + CHUNK_SAMPLES, spec.samples))
        for lo in range(0, spec.samples, CHUNK_SAMPLES)
    ]
    if workers == 1 or len(bounds) == 1:
        parts = [_chunk_values(spec, lo, hi) for lo, hi in bounds]
    else:
        tasks = [(spec, lo, hi) for lo, hi in bounds]
        with ProcessPoolExecutor(max_workers=min(workers, len(bounds))) as pool:
            parts = list(pool.map(_chunk_task, tasks))
    values = np.concatenate(parts)
    n = spec.samples
    mean = math.fsum(values) / n
    if n > 1:
        variance = math.fsum((values - mean) ** 2) / (n - 1)
        stderr = math.sqrt(variance / n)
    else:
        stderr = 0.0
    return EstimateResult(
        mean=mean, stderr=stderr, samples=n, seed=spec.seed, quantity=spec.descriptor
    )
