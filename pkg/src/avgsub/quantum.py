"""Finite-dimensional state machinery for the Monte Carlo engine.

Pure states over a ``FactorList``, reduced density matrices via partial
trace, and the per-state spectral quantities (entropy, purity, tangle,
concurrence, negativity, Tsallis/Renyi families, mutual information).

Spectra of reduced states of a *pure* state are computed on whichever
side of the cut is smaller: if the amplitudes are reshaped to a matrix
``a`` of shape (kept, complement), then ``a a^H`` and ``a^H a`` share
their nonzero spectrum, so diagonalizing the smaller Gram matrix gives
the same answer at cost cubic in the small side.  That makes the
interesting regime (tiny subsystem, huge environment) cheap.

Eigenvalue hygiene: tiny negatives from the eigensolver are clamped to
zero, but anything below -1e-8 signals a broken kernel and raises
``PrecisionFailure`` rather than being repaired.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import PrecisionFailure, ResourceCapError
from .partition import FactorList, Selector, disjoint, union

# State vectors larger than this are refused (2^22 complex amplitudes);
# overridable through the environment for CI-scale runs.
DEFAULT_MATERIALIZATION_CAP = 1 << 22
MATERIALIZATION_CAP_ENV = "AVGSUB_MAX_STATE_DIM"

# Largest matrix the spectral path will hand to the eigensolver.
SPECTRAL_CAP = 2048

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
SPECTRUM_SUM_TOL = 1e-10
EIG_CLAMP_TOL = 1e-10
EIG_HARD_LIMIT = 1e-8


def materialization_cap() -> int:
    raw = os.environ.get(MATERIALIZATION_CAP_ENV)
    if raw is None:
        return DEFAULT_MATERIALIZATION_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{MATERIALIZATION_CAP_ENV}={raw!r} is not an integer") from None
    if cap < 2:
        raise ValueError(f"{MATERIALIZATION_CAP_ENV} must be at least 2, got {cap}")
    return cap


@dataclass(frozen=True)
class PureState:
    """A unit-norm complex amplitude vector over a factorization."""

    amplitudes: np.ndarray
    factors: FactorList

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        if amps.ndim != 1 or amps.shape[0] != self.factors.total:
            raise ValueError(
                f"amplitude vector of length {amps.shape} does not match "
                f"total dimension {self.factors.total}"
            )
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm_sq!r}")


@dataclass(frozen=True)
class DensityMatrix:
    """A reduced density matrix: Hermitian, unit trace."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        rho = np.asarray(self.entries, dtype=np.complex128)
        object.__setattr__(self, "entries", rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        herm_defect = float(np.max(np.abs(rho - rho.conj().T)))
        if herm_defect > HERMITIAN_TOL:
            raise ValueError(f"matrix is not Hermitian (defect {herm_defect:.3e})")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace is {tr!r}, expected 1")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a reduced density matrix, descending."""

    eigenvalues: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.eigenvalues, dtype=np.float64)
        object.__setattr__(self, "eigenvalues", w)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("spectrum must be a non-empty 1-d array")
        if np.any(w[:-1] < w[1:]):
            raise ValueError("spectrum must be sorted in descending order")
        if float(w[-1]) < 0.0 or float(w[0]) > 1.0:
            raise ValueError(f"eigenvalues outside [0, 1]: {w}")
        total = float(np.sum(w))
        if abs(total - 1.0) > SPECTRUM_SUM_TOL:
            raise ValueError(f"eigenvalues sum to {total!r}, expected 1")

    def __len__(self) -> int:
        return int(self.eigenvalues.size)


def _clamp_eigenvalues(w: np.ndarray) -> np.ndarray:
    low = float(np.min(w))
    if low < -EIG_HARD_LIMIT:
        raise PrecisionFailure(
            f"eigenvalue {low!r} is far below zero; the spectral kernel is broken"
        )
    high = float(np.max(w))
    if high > 1.0 + EIG_CLAMP_TOL:
        raise PrecisionFailure(f"eigenvalue {high!r} is far above one")
    return np.clip(w, 0.0, 1.0)


def _kept_matrix(state: PureState, sel: Selector) -> np.ndarray:
    # Reshape amplitudes to the factor grid and pull the kept axes to the
    # front; C-order reshape matches the row-major flat-index contract.
    dims = state.factors.dims
    kept = sel.indices
    rest = tuple(i for i in range(len(dims)) if i not in set(kept))
    grid = state.amplitudes.reshape(dims)
    return grid.transpose(kept + rest).reshape(sel.kept_dim, sel.complement_dim)


def _check_selector(state: PureState, sel: Selector) -> None:
    if sel.factors != state.factors:
        raise ValueError("selector was built for a different factorization")


def partial_trace(state: PureState, keep: Selector) -> DensityMatrix:
    """Reduced density matrix of the kept collection,
    rho[a, b] = sum_c psi[(a, c)] conj(psi[(b, c)]) in the row-major
    index convention of ``partition``.

    Materializes a kept_dim x kept_dim matrix, so the kept dimension is
    capped; for larger collections take ``spectrum_of``, which works on
    the smaller side of the cut.
    """
    _check_selector(state, keep)
    if keep.kept_dim > SPECTRAL_CAP:
        raise ResourceCapError(
            f"kept dimension {keep.kept_dim} exceeds the materialization cap "
            f"{SPECTRAL_CAP}; use spectrum_of, which diagonalizes the smaller "
            "side of the cut"
        )
    a = _kept_matrix(state, keep)
    return DensityMatrix(a @ a.conj().T)


def spectrum_of(state: PureState, sel: Selector) -> Spectrum:
    """Spectrum of the reduced state of a collection, computed on the
    smaller side of the cut.

    Both sides of a cut through a pure state share their nonzero
    spectrum, so the returned spectrum has min(kept, complement)
    entries; padding zeros are dropped, which changes no quantity
    evaluated from it.
    """
    _check_selector(state, sel)
    small = min(sel.kept_dim, sel.complement_dim)
    if small > SPECTRAL_CAP:
        raise ResourceCapError(
            f"cut sides {sel.kept_dim} x {sel.complement_dim} both exceed the "
            f"eigensolver cap {SPECTRAL_CAP}"
        )
    if small == 1:
        return Spectrum(np.array([1.0]))
    a = _kept_matrix(state, sel)
    if sel.kept_dim <= sel.complement_dim:
        gram = a @ a.conj().T
    else:
        gram = a.conj().T @ a
    w = np.linalg.eigvalsh(gram)
    w = _clamp_eigenvalues(w)
    return Spectrum(w[::-1].copy())


# ---------------------------------------------------------------------------
# spectral quantities
# ---------------------------------------------------------------------------


def von_neumann(spec: Spectrum) -> float:
    """Entropy -sum(l ln l) in nats, with 0 ln 0 = 0."""
    w = spec.eigenvalues
    pos = w[w > 0.0]
    # + 0.0 canonicalizes the -0.0 of a pure spectrum
    return float(-(pos * np.log(pos)).sum()) + 0.0


def _check_order(q: float) -> float:
    q = float(q)
    if not math.isfinite(q) or q <= 0.0 or q == 1.0:
        raise ValueError(f"entropy order must be positive and != 1, got {q!r}")
    return q


def tsallis(spec: Spectrum, q: float) -> float:
    """Tsallis entropy (1 - sum l^q) / (q - 1); tends to the
    von Neumann entropy as q -> 1."""
    q = _check_order(q)
    w = spec.eigenvalues
    return float((1.0 - (w[w > 0.0] ** q).sum()) / (q - 1.0)) + 0.0


def renyi(spec: Spectrum, q: float) -> float:
    """Renyi entropy ln(sum l^q) / (1 - q); tends to the von Neumann
    entropy as q -> 1."""
    q = _check_order(q)
    w = spec.eigenvalues
    return float(math.log((w[w > 0.0] ** q).sum()) / (1.0 - q)) + 0.0


def purity(spec: Spectrum) -> float:
    """tr rho^2 = sum l^2."""
    w = spec.eigenvalues
    return float((w * w).sum())


def tangle(spec: Spectrum) -> float:
    """2 (1 - tr rho^2), the squared concurrence; equals twice the
    quadratic (q = 2) Tsallis entropy."""
    return 2.0 * (1.0 - purity(spec))


def concurrence(spec: Spectrum) -> float:
    """sqrt(2 (1 - tr rho^2))."""
    return math.sqrt(max(0.0, tangle(spec)))


def pure_state_negativity(spec: Spectrum) -> float:
    """Negativity of a pure-state reduction: ((sum sqrt(l))^2 - 1) / 2."""
    s = float(np.sqrt(spec.eigenvalues).sum())
    return max(0.0, (s * s - 1.0) / 2.0)


def mutual_info(state: PureState, sel_a: Selector, sel_b: Selector) -> float:
    """Mutual information S_A + S_B - S_AB between two disjoint
    collections, clamped to 0 when roundoff leaves it barely negative."""
    if not disjoint(sel_a, sel_b):
        overlap = sorted(set(sel_a.indices) & set(sel_b.indices))
        raise ValueError(f"collections overlap on factor indices {overlap}")
    value = (
        von_neumann(spectrum_of(state, sel_a))
        + von_neumann(spectrum_of(state, sel_b))
        - von_neumann(spectrum_of(state, union(sel_a, sel_b)))
    )
    if value < 0.0:
        if value < -1e-9:
            raise PrecisionFailure(f"mutual information {value!r} is far below zero")
        return 0.0
    return value
