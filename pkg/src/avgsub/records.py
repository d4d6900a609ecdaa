"""Result archive and claims ledger.

The archive is an append-only file of newline-delimited JSON records,
one per CLI run: resolved configuration, result payload, and the
closed-form oracle / z-score when one applies.  Records carry a schema
version and are never rewritten; appends from one process are
serialized by a lock.  Re-running the same seeded command appends a
record whose payload is bit-identical to the first.

The claims ledger is a generated table mapping every closed-form
quantity, bound and per-state identity implemented by this package to
the operation that computes it and the command that exercises it.
"""

from __future__ import annotations

import json
import sys
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

SCHEMA_VERSION = 1

_append_lock = threading.Lock()


def _allow_big_int_strings() -> None:
    # Exact rationals can carry ~40k-digit integers; lift the default
    # int-to-string conversion limit before serializing them.
    setter = getattr(sys, "set_int_max_str_digits", None)
    if setter is not None:
        setter(2_000_000)


@dataclass(frozen=True)
class RunRecord:
    """One archived run: configuration plus payload, never mutated."""

    config: dict
    payload: dict
    oracle: Optional[str] = None
    z_score: Optional[float] = None
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )
    schema_version: int = SCHEMA_VERSION

    def to_json_line(self) -> str:
        _allow_big_int_strings()
        body = {
            "schema_version": self.schema_version,
            "timestamp": self.timestamp,
            "config": self.config,
            "payload": self.payload,
            "oracle": self.oracle,
            "z_score": self.z_score,
        }
        return json.dumps(body, sort_keys=True)


def archive(record: RunRecord, path: "Path | str") -> None:
    """Append one record; creates the file on first use.

    Raises ``OSError`` for unwritable paths (the CLI maps that to exit
    code 3)."""
    line = record.to_json_line()
    with _append_lock:
        with open(path, "a", encoding="utf-8") as handle:
            handle.write(line + "\n")


def read_archive(path: "Path | str") -> list[dict]:
    """All archived records, in append order."""
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


@dataclass(frozen=True)
class ClaimRow:
    """One implemented claim: what it states, where it lives, how to run it."""

    claim: str
    operation: str
    command: str


CLAIMS: tuple[ClaimRow, ...] = (
    ClaimRow(
        "exact mean subsystem entropy H_mM - H_M - (m-1)/(2M)",
        "analytic.page_sen_entropy",
        "avgsub analytic --dims 2x2 --quantity entropy",
    ),
    ClaimRow(
        "entropy deficit below ln m lies strictly in (-m/(2M), -(m-1)/(2M))",
        "analytic.entropy_deficit",
        "avgsub verify --check delta-interval",
    ),
    ClaimRow(
        "mean subsystem information ln m - S stays below half a nat",
        "analytic.symmetric_info",
        "avgsub analytic --dims 2x2 --quantity info",
    ),
    ClaimRow(
        "one-sided informations differ by exactly ln(n_a/n_b)",
        "analytic.asymmetric_info",
        "avgsub analytic --dims 2x8 --quantity asym-info",
    ),
    ClaimRow(
        "mean purity (n_a + n_b)/(n_a n_b + 1)",
        "analytic.avg_purity",
        "avgsub analytic --dims 3x5 --quantity purity",
    ),
    ClaimRow(
        "mean tangle 2(m-1)(M-1)/(mM+1)",
        "analytic.avg_tangle",
        "avgsub analytic --dims 2x2 --quantity tangle",
    ),
    ClaimRow(
        "mean concurrence bounded by the root of the mean tangle",
        "analytic.concurrence_bound",
        "avgsub analytic --dims 2x2 --quantity concurrence-bound",
    ),
    ClaimRow(
        "tangle deficit 2(m^2-1)/(m(mM+1)) <= 2/M",
        "analytic.tangle_deficit",
        "avgsub analytic --dims 2x100 --quantity tangle-deficit",
    ),
    ClaimRow(
        "exact mean A:B mutual information under a dominant environment",
        "analytic.tripartite_avg_mutual_info",
        "avgsub analytic --dims 2x2x4 --quantity mutual-info",
    ),
    ClaimRow(
        "mean A:B mutual information never exceeds n_a n_b/(2 n_c) <= 1/2",
        "analytic.tripartite_mutual_info_bound",
        "avgsub verify --check tripartite-bound",
    ),
    ClaimRow(
        "dimension-only estimate of <S_A + S_B + S_C>, good to 3/2 nat",
        "analytic.tripartite_entropy_sum_approx",
        "avgsub verify --check slacks",
    ),
    ClaimRow(
        "any collection of factors is within half a nat of maximal mixing",
        "analytic.multipartite_collection_entropy",
        "avgsub analytic --dims 2x3x5 --quantity entropy --keep 0,2",
    ),
    ClaimRow(
        "mutual-information ceiling n_A^2 n_B^2/(2n) for small collections",
        "analytic.multipartite_mutual_info_bound",
        "avgsub analytic --dims 2x2x2x2x16 --quantity mutual-info-bound --a 0,1 --b 2",
    ),
    ClaimRow(
        "large-environment limit of the mean entropy is exactly ln m",
        "analytic.thermo_limit_entropy",
        "avgsub sweep --limit entropy --m 2 --k-max 10",
    ),
    ClaimRow(
        "large-environment limit of the mean tangle is 2(1 - 1/m)",
        "analytic.thermo_limit_tangle",
        "avgsub sweep --limit tangle --m 4 --k-max 10",
    ),
    ClaimRow(
        "reduced density matrix of a kept collection (row-major contract)",
        "quantum.partial_trace",
        "avgsub mc --dims 2x2 --keep 0 --quantity entropy --samples 1000 --seed 0",
    ),
    ClaimRow(
        "both sides of a pure-state cut share their nonzero spectrum",
        "quantum.spectrum_of",
        "avgsub mc --dims 2x2x4 --keep 0,1 --quantity entropy --samples 1000 --seed 0",
    ),
    ClaimRow(
        "per-state entanglement entropy -sum(l ln l) <= ln min(n_K, n/n_K)",
        "quantum.von_neumann",
        "avgsub mc --dims 2x2 --keep 0 --quantity entropy --samples 200000 --seed 42",
    ),
    ClaimRow(
        "Tsallis family (1 - sum l^q)/(q - 1), entropy as q -> 1",
        "quantum.tsallis",
        "avgsub mc --dims 2x2 --keep 0 --quantity tsallis --q 2 --samples 1000 --seed 0",
    ),
    ClaimRow(
        "Renyi family ln(sum l^q)/(1 - q), entropy as q -> 1",
        "quantum.renyi",
        "avgsub mc --dims 2x2 --keep 0 --quantity renyi --q 2 --samples 1000 --seed 0",
    ),
    ClaimRow(
        "per-state purity tr rho^2",
        "quantum.purity",
        "avgsub mc --dims 3x5 --keep 0 --quantity purity --samples 100000 --seed 35",
    ),
    ClaimRow(
        "per-state tangle 2(1 - tr rho^2), twice the quadratic Tsallis entropy",
        "quantum.tangle",
        "avgsub mc --dims 2x2 --keep 0 --quantity tangle --samples 100000 --seed 7",
    ),
    ClaimRow(
        "per-state concurrence sqrt(2(1 - tr rho^2))",
        "quantum.concurrence",
        "avgsub mc --dims 2x2 --keep 0 --quantity concurrence --samples 1000 --seed 0",
    ),
    ClaimRow(
        "pure-state negativity ((sum sqrt(l))^2 - 1)/2, Monte Carlo only",
        "quantum.pure_state_negativity",
        "avgsub mc --dims 2x2 --keep 0 --quantity negativity --samples 1000 --seed 0",
    ),
    ClaimRow(
        "mutual information S_A + S_B - S_AB; doubles the entropy against a complement",
        "quantum.mutual_info",
        "avgsub mc --dims 2x2x4 --a 0 --b 1 --quantity mutual-info --samples 100000 --seed 7",
    ),
)


def claims_ledger() -> tuple[ClaimRow, ...]:
    """The generated claims table (stable order)."""
    return CLAIMS
