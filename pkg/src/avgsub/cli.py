"""Command-line surface.

Subcommands
-----------
analytic   closed-form values for a factorization (exact + decimal)
mc         Monte Carlo estimate with oracle comparison where one exists
verify     rigorous bound sweeps and MC agreement checks
sweep      large-environment convergence tables (plot-ready)
ledger     the claims table mapping results to operations and commands

Every output embeds the tool version, the fully resolved configuration,
the seed and the precision, so a run can be reproduced byte for byte.
Exit codes: 0 success / all checks pass, 1 check failure, 2 usage
error, 3 resource-cap refusal (or unwritable archive path).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Optional

import mpmath

from . import __version__, analytic, exactmath, records, verify
from .errors import ResourceCapError
from .exactmath import DEFAULT_DIGITS
from .partition import FactorList, Selector
from .sampler import QUANTITIES, SampleSpec, estimate

_ANALYTIC_QUANTITIES = (
    "entropy",
    "deficit",
    "info",
    "asym-info",
    "purity",
    "tangle",
    "concurrence-bound",
    "tangle-deficit",
    "mutual-info",
    "mutual-info-bound",
    "entropy-sum-approx",
    "thermo-entropy",
    "thermo-tangle",
)

_MC_QUANTITIES = tuple(q.replace("_", "-") for q in QUANTITIES)


def _frac_str(value: Fraction) -> str:
    records._allow_big_int_strings()
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _real_str(value, digits: int) -> str:
    return mpmath.nstr(value, digits)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return str(value).lower()
    return str(value)


def _render_table(meta: dict, rows: list[dict]) -> str:
    lines = [
        f"# tool=avgsub version={meta['version']} command={meta['command']}",
        "# config " + json.dumps(meta["config"], sort_keys=True),
    ]
    if not rows:
        lines.append("(no rows)")
        return "\n".join(lines)
    columns = list(rows[0].keys())
    for row in rows[1:]:
        for key in row:
            if key not in columns:
                columns.append(key)
    table = [[_cell(row.get(c)) for c in columns] for row in rows]
    widths = [
        max(len(text) for text in [col] + [r[i] for r in table])
        for i, col in enumerate(columns)
    ]
    lines.append("  ".join(col.ljust(w) for col, w in zip(columns, widths)))
    for r in table:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    return "\n".join(lines)


def _render_csv(meta: dict, rows: list[dict]) -> str:
    out = io.StringIO()
    out.write(f"# tool=avgsub version={meta['version']} command={meta['command']}\n")
    out.write("# config " + json.dumps(meta["config"], sort_keys=True) + "\n")
    if rows:
        columns = list(rows[0].keys())
        for row in rows[1:]:
            for key in row:
                if key not in columns:
                    columns.append(key)
        writer = csv.DictWriter(out, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: _cell(row.get(c)) for c in columns})
    return out.getvalue().rstrip("\n")


def _render_json(meta: dict, rows: list[dict]) -> str:
    body = {
        "tool": "avgsub",
        "version": meta["version"],
        "command": meta["command"],
        "config": meta["config"],
        "rows": rows,
    }
    records._allow_big_int_strings()
    return json.dumps(body, sort_keys=True, indent=2)


_RENDERERS = {"table": _render_table, "csv": _render_csv, "json": _render_json}


def _emit(meta: dict, rows: list[dict], args) -> None:
    text = _RENDERERS[args.format](meta, rows)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _archive_run(args, meta: dict, rows: list[dict], oracle=None, z=None) -> None:
    path = getattr(args, "archive", None)
    if not path:
        return
    record = records.RunRecord(
        config={"command": meta["command"], **meta["config"]},
        payload={"rows": rows},
        oracle=oracle,
        z_score=z,
    )
    records.archive(record, path)


def _meta(command: str, config: dict) -> dict:
    return {"version": __version__, "command": command, "config": config}


def _selector(factors: FactorList, text: Optional[str]) -> Optional[Selector]:
    if text is None:
        return None
    return Selector.parse(factors, text)


# ---------------------------------------------------------------------------
# analytic
# ---------------------------------------------------------------------------


def _entropy_row(value: analytic.EntropyValue, digits: int, **extra) -> dict:
    row = dict(extra)
    row["exact"] = None if value.exact is None else _frac_str(value.exact)
    row["nats"] = _real_str(value.nats, digits)
    row["approximate"] = value.approximate
    if value.slack_nats is not None:
        row["slack_nats"] = _frac_str(value.slack_nats)
    return row


def _info_row(value: analytic.InfoValue, digits: int, **extra) -> dict:
    row = dict(extra)
    row["exact"] = None if value.exact is None else _frac_str(value.exact)
    row["nats"] = _real_str(value.nats, digits)
    row["approximate"] = False
    return row


def _frac_row(value: Fraction, digits: int, **extra) -> dict:
    row = dict(extra)
    row["exact"] = _frac_str(value)
    row["nats"] = _real_str(exactmath.to_real(value, digits), digits)
    row["approximate"] = False
    return row


def cmd_analytic(args) -> int:
    digits = args.precision
    quantity = args.quantity
    rows: list[dict] = []
    config = {
        "dims": args.dims,
        "quantity": quantity,
        "keep": args.keep,
        "a": args.a,
        "b": args.b,
        "m": args.m,
        "precision": digits,
        "format": args.format,
    }

    if quantity in ("thermo-entropy", "thermo-tangle"):
        if args.m is None:
            raise ValueError(f"{quantity} needs --m (the fixed small dimension)")
        if quantity == "thermo-entropy":
            rows.append(
                _entropy_row(
                    analytic.thermo_limit_entropy(args.m, digits), digits,
                    quantity=quantity, m=args.m,
                )
            )
        else:
            rows.append(
                _frac_row(analytic.thermo_limit_tangle(args.m), digits,
                          quantity=quantity, m=args.m)
            )
        _emit(_meta("analytic", config), rows, args)
        _archive_run(args, _meta("analytic", config), rows)
        return 0

    if args.dims is None:
        raise ValueError("this quantity needs --dims")
    factors = FactorList.parse(args.dims)
    keep = _selector(factors, args.keep)
    sel_a = _selector(factors, args.a)
    sel_b = _selector(factors, args.b)
    base = {"quantity": quantity, "dims": str(factors)}

    if quantity == "entropy":
        if keep is not None:
            value = analytic.multipartite_collection_entropy(factors, keep, digits)
            rows.append(_entropy_row(value, digits, **base, keep=str(keep)))
        elif factors.count == 2:
            value = analytic.page_sen_entropy(*factors.dims, digits)
            rows.append(_entropy_row(value, digits, **base))
        else:
            raise ValueError("entropy on more than two factors needs --keep")
    elif quantity in ("deficit", "info"):
        if factors.count != 2:
            raise ValueError(f"{quantity} expects exactly two factors")
        fn = analytic.entropy_deficit if quantity == "deficit" else analytic.symmetric_info
        rows.append(_info_row(fn(*factors.dims, digits), digits, **base))
    elif quantity == "asym-info":
        if factors.count != 2:
            raise ValueError("asym-info expects exactly two factors")
        t_ab, t_ba, avg = analytic.asymmetric_info(*factors.dims, digits)
        rows.append(_info_row(t_ab, digits, **base, side="a-vs-b"))
        rows.append(_info_row(t_ba, digits, **base, side="b-vs-a"))
        rows.append(_info_row(avg, digits, **base, side="mean"))
    elif quantity in ("purity", "tangle", "tangle-deficit"):
        if factors.count != 2:
            raise ValueError(f"{quantity} expects exactly two factors")
        fn = {
            "purity": analytic.avg_purity,
            "tangle": analytic.avg_tangle,
            "tangle-deficit": analytic.tangle_deficit,
        }[quantity]
        rows.append(_frac_row(fn(*factors.dims), digits, **base))
    elif quantity == "concurrence-bound":
        if factors.count != 2:
            raise ValueError("concurrence-bound expects exactly two factors")
        value = analytic.concurrence_bound(*factors.dims, digits)
        rows.append(
            {**base, "exact": None, "nats": _real_str(value, digits), "approximate": False}
        )
    elif quantity == "mutual-info":
        n_a, n_b, n_c = _tripartite_dims(factors, sel_a, sel_b)
        value = analytic.tripartite_avg_mutual_info(n_a, n_b, n_c, digits)
        rows.append(_info_row(value, digits, **base, reduced=f"{n_a}x{n_b}x{n_c}"))
    elif quantity == "mutual-info-bound":
        if sel_a is not None and sel_b is not None:
            bound = analytic.multipartite_mutual_info_bound(factors, sel_a, sel_b)
        else:
            n_a, n_b, n_c = _tripartite_dims(factors, sel_a, sel_b)
            bound = analytic.tripartite_mutual_info_bound(n_a, n_b, n_c)
        rows.append(_frac_row(bound, digits, **base))
    elif quantity == "entropy-sum-approx":
        if factors.count != 3:
            raise ValueError("entropy-sum-approx expects exactly three factors")
        value = analytic.tripartite_entropy_sum_approx(*factors.dims, digits)
        rows.append(_entropy_row(value, digits, **base))
    else:
        raise ValueError(f"unknown analytic quantity {quantity!r}")

    meta = _meta("analytic", config)
    _emit(meta, rows, args)
    _archive_run(args, meta, rows)
    return 0


def _tripartite_dims(factors, sel_a, sel_b) -> tuple[int, int, int]:
    if sel_a is not None and sel_b is not None:
        n_a, n_b = sel_a.kept_dim, sel_b.kept_dim
        return n_a, n_b, factors.total // (n_a * n_b)
    if factors.count != 3:
        raise ValueError("mutual information needs three factors, or --a and --b")
    return factors.dims


# ---------------------------------------------------------------------------
# mc
# ---------------------------------------------------------------------------


def cmd_mc(args) -> int:
    factors = FactorList.parse(args.dims)
    quantity = args.quantity.replace("-", "_")
    spec = SampleSpec(
        factors=factors,
        quantity=quantity,
        samples=args.samples,
        seed=args.seed,
        keep=_selector(factors, args.keep),
        sel_a=_selector(factors, args.a),
        sel_b=_selector(factors, args.b),
        q=args.q,
    )
    spec.validate()
    workers = args.workers if args.workers else os.cpu_count() or 1
    result = estimate(spec, workers=workers)

    oracle = verify.analytic_oracle(spec)
    oracle_str = None
    z = None
    if oracle is not None:
        oracle_str = _frac_str(oracle) if isinstance(oracle, Fraction) else _real_str(
            oracle, args.precision
        )
        if result.stderr > 0:
            z = abs(result.mean - float(oracle)) / result.stderr
        else:
            z = 0.0 if result.mean == float(oracle) else float("inf")

    config = {
        "dims": args.dims,
        "quantity": args.quantity,
        "keep": args.keep,
        "a": args.a,
        "b": args.b,
        "q": args.q,
        "samples": args.samples,
        "seed": args.seed,
        "workers": workers,
        "precision": args.precision,
        "format": args.format,
    }
    row = {
        "quantity": result.quantity,
        "mean": result.mean,
        "stderr": result.stderr,
        "samples": result.samples,
        "seed": result.seed,
        "oracle": oracle_str,
        "z": z,
    }
    meta = _meta("mc", config)
    _emit(meta, [row], args)
    _archive_run(args, meta, [row], oracle=oracle_str, z=z)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    if args.check == "all":
        names = list(verify.ALL_CHECKS)
    elif args.check in verify.ALL_CHECKS:
        names = [args.check]
    else:
        raise ValueError(
            f"unknown check {args.check!r}; expected one of "
            f"{tuple(verify.ALL_CHECKS)} or 'all'"
        )
    reports = []
    for name in names:
        if name == "delta-interval":
            reports.append(verify.check_delta_interval(m_max=args.m_max))
        elif name == "harmonic":
            reports.append(verify.check_harmonic_bounds(n_max=args.n_max))
        elif name == "tripartite-bound":
            reports.append(
                verify.check_tripartite_bound(
                    na_max=args.na_max, nb_max=args.nb_max, nc_max=args.nc_max
                )
            )
        elif name == "mc-agreement":
            workers = args.workers if args.workers else os.cpu_count() or 1
            reports.append(verify.check_mc_agreement(workers=workers))
        elif name == "slacks":
            reports.append(
                verify.check_approximation_slacks(
                    na_max=args.na_max, nb_max=args.nb_max, nc_max=args.nc_max
                )
            )
    config = {
        "check": args.check,
        "m_max": args.m_max,
        "n_max": args.n_max,
        "na_max": args.na_max,
        "nb_max": args.nb_max,
        "nc_max": args.nc_max,
        "format": args.format,
    }
    if args.format == "json":
        rows = [report.to_dict() for report in reports]
    else:
        rows = [
            {
                "check": report.name,
                "passed": report.passed,
                "points": report.points,
                "worst_margin": report.worst_margin,
                "worst_point": report.worst_point,
            }
            for report in reports
        ]
    _emit(_meta("verify", config), rows, args)
    failed = [report.name for report in reports if not report.passed]
    if failed:
        print(f"FAILED: {failed[0]}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def cmd_sweep(args) -> int:
    digits = args.precision
    rows: list[dict] = []
    if args.limit in ("entropy", "tangle"):
        if args.m is None:
            raise ValueError(f"sweep --limit {args.limit} needs --m")
        m = args.m
        for k in range(0, args.k_max + 1):
            big = m * 2**k
            if args.limit == "entropy":
                s = analytic.page_sen_entropy(m, big, digits)
                deficit = analytic.symmetric_info(m, big, digits)
                rows.append(
                    {
                        "m": m,
                        "k": k,
                        "M": big,
                        "entropy_nats": _real_str(s.nats, digits),
                        "deficit_nats": _real_str(deficit.nats, digits),
                        "deficit_bound": _frac_str(Fraction(m, 2 * big)),
                    }
                )
            else:
                tangle = analytic.avg_tangle(m, big)
                deficit = analytic.tangle_deficit(m, big)
                rows.append(
                    {
                        "m": m,
                        "k": k,
                        "M": big,
                        "tangle": _frac_str(tangle),
                        "limit": _frac_str(analytic.thermo_limit_tangle(m)),
                        "deficit": _frac_str(deficit),
                        "deficit_bound": _frac_str(Fraction(2, big)),
                    }
                )
    elif args.limit == "mutual-info":
        if args.na is None or args.nb is None:
            raise ValueError("sweep --limit mutual-info needs --na and --nb")
        start = args.na * args.nb
        if args.nc_max < start:
            raise ValueError(f"--nc-max must be at least n_a*n_b = {start}")
        for n_c in range(start, args.nc_max + 1):
            info = analytic.tripartite_avg_mutual_info(args.na, args.nb, n_c, digits)
            bound = analytic.tripartite_mutual_info_bound(args.na, args.nb, n_c)
            rows.append(
                {
                    "n_a": args.na,
                    "n_b": args.nb,
                    "n_c": n_c,
                    "info_exact": None if info.exact is None else _frac_str(info.exact),
                    "info_nats": _real_str(info.nats, digits),
                    "bound": _frac_str(bound),
                }
            )
    else:
        raise ValueError(f"unknown sweep limit {args.limit!r}")
    config = {
        "limit": args.limit,
        "m": args.m,
        "k_max": args.k_max,
        "na": args.na,
        "nb": args.nb,
        "nc_max": args.nc_max,
        "precision": digits,
        "format": args.format,
    }
    _emit(_meta("sweep", config), rows, args)
    return 0


# ---------------------------------------------------------------------------
# ledger
# ---------------------------------------------------------------------------


def cmd_ledger(args) -> int:
    rows = [
        {"claim": row.claim, "operation": row.operation, "command": row.command}
        for row in records.claims_ledger()
    ]
    _emit(_meta("ledger", {"format": args.format}), rows, args)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_output_flags(sub) -> None:
    sub.add_argument("--format", choices=("table", "csv", "json"), default="table")
    sub.add_argument("--out", help="write output to this path instead of stdout")
    sub.add_argument(
        "--precision", type=int, default=DEFAULT_DIGITS,
        help="decimal digits for rendered reals (default 30)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="avgsub",
        description="Average-subsystem entropies: closed forms, bounds, Monte Carlo.",
    )
    parser.add_argument("--version", action="version", version=f"avgsub {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("analytic", help="evaluate a closed-form quantity")
    p.add_argument("--dims", help='factor dimensions, e.g. "2x3x5"')
    p.add_argument("--quantity", required=True, choices=_ANALYTIC_QUANTITIES)
    p.add_argument("--keep", help='kept collection, e.g. "0,2"')
    p.add_argument("--a", help="first collection (mutual information)")
    p.add_argument("--b", help="second collection (mutual information)")
    p.add_argument("--m", type=int, help="fixed small dimension for thermo-* quantities")
    p.add_argument("--archive", help="append a run record to this path")
    _add_output_flags(p)
    p.set_defaults(func=cmd_analytic)

    p = commands.add_parser("mc", help="Monte Carlo estimate over Haar states")
    p.add_argument("--dims", required=True)
    p.add_argument("--quantity", required=True, choices=_MC_QUANTITIES)
    p.add_argument("--keep", help="kept collection for single-collection quantities")
    p.add_argument("--a", help="first collection (mutual information)")
    p.add_argument("--b", help="second collection (mutual information)")
    p.add_argument("--q", type=float, help="order for renyi/tsallis")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--workers", type=int, default=0,
        help="worker processes (default: machine parallelism; results identical)",
    )
    p.add_argument("--archive", help="append a run record to this path")
    _add_output_flags(p)
    p.set_defaults(func=cmd_mc)

    p = commands.add_parser("verify", help="run verification checks")
    p.add_argument("--check", required=True)
    p.add_argument("--m-max", type=int, default=64, dest="m_max")
    p.add_argument("--n-max", type=int, default=100_000, dest="n_max")
    p.add_argument("--na-max", type=int, default=4, dest="na_max")
    p.add_argument("--nb-max", type=int, default=4, dest="nb_max")
    p.add_argument("--nc-max", type=int, default=64, dest="nc_max")
    p.add_argument("--workers", type=int, default=0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_verify)

    p = commands.add_parser("sweep", help="convergence tables toward the limits")
    p.add_argument("--limit", required=True, choices=("entropy", "tangle", "mutual-info"))
    p.add_argument("--m", type=int)
    p.add_argument("--k-max", type=int, default=10, dest="k_max")
    p.add_argument("--na", type=int)
    p.add_argument("--nb", type=int)
    p.add_argument("--nc-max", type=int, default=64, dest="nc_max")
    _add_output_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = commands.add_parser("ledger", help="print the claims ledger")
    _add_output_flags(p)
    p.set_defaults(func=cmd_ledger)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ResourceCapError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
