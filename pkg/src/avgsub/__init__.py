"""Average-subsystem entropies of Haar-random pure states.

Exact closed forms (rational wherever possible, arbitrary-precision real
otherwise) for the mean entanglement entropy, subsystem information,
purity, tangle and mutual information of uniformly random pure states
over arbitrary multi-partite Hilbert-space factorizations, together with
a reproducible Monte Carlo engine that cross-checks every closed form by
direct Haar sampling.
"""

__version__ = "0.1.0"

from .errors import PrecisionFailure, ResourceCapError
from .partition import FactorList, MinMaxSplit, Selector

__all__ = [
    "FactorList",
    "MinMaxSplit",
    "PrecisionFailure",
    "ResourceCapError",
    "Selector",
    "__version__",
]
