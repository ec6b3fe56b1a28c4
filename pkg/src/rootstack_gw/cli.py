"""Command-line entry point.

One job per invocation: parse a JSON config, run one command, emit a human
table or machine-readable records, exit 0 only if every requested check
passed bit-exactly.  Exit codes: 1 for configuration problems, 2 when a
nontrivial mirror map blocks invariant extraction, 3 for an internal exact-
division failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from .algebra import DivisibilityError, GradedSeries, TermKey
from .config import ConfigError, JobConfig, parse_config
from .identities import (
    RefusedIdentityError,
    check_local_orbifold_extended,
    check_local_orbifold_nonextended,
    check_local_relative_smooth,
)
from .ifunctions import (
    ConfigurationError,
    ExtendedDataTooSmall,
    i_infinity_extended,
    i_infinity_extended_h0,
    i_infinity_nonextended,
    i_local,
    i_relative_extended_h0,
    i_relative_smooth,
    i_root_extended,
    i_root_nonextended,
)
from .invariants import (
    InvariantTable,
    UnsupportedMirrorMapError,
    extract_invariants,
    mirror_map,
    stabilization_check,
)
from .periods import (
    LaurentPolynomial,
    PeriodError,
    classical_period_orbifold,
    compare_periods,
    laurent_classical_period,
    quantum_period,
    regularize,
)
from .targets import RootData, enumerate_curve_classes

COMMANDS = (
    "ifunction",
    "invariants",
    "stabilize",
    "check-identity",
    "period",
    "compare-periods",
    "laurent-period",
)

SERIES_CHOICES = (
    "root",
    "root-extended",
    "infinity",
    "infinity-extended",
    "infinity-extended-h0",
    "relative",
    "relative-extended-h0",
    "local",
)


def fmt_rat(q: Fraction, records: bool) -> str:
    if records or q.denominator != 1:
        return f"{q.numerator}/{q.denominator}"
    return str(q.numerator)


def fmt_ints(values: tuple[int, ...]) -> str:
    return ",".join(str(v) for v in values) if values else "-"


def fmt_xexp(xexp: tuple[tuple[int, int, int], ...]) -> str:
    if not xexp:
        return "-"
    return ",".join(f"{i + 1}:{j}^{e}" for i, j, e in xexp)


def series_records(series: GradedSeries) -> list[str]:
    rows = []
    for key, c in series.ordered_terms():
        rows.append(
            "\t".join(
                (
                    "term",
                    fmt_ints(key.beta),
                    str(key.zpow),
                    fmt_xexp(key.xexp),
                    fmt_ints(key.sector),
                    fmt_ints(key.mono),
                    fmt_ints(key.lam),
                    fmt_rat(c, records=True),
                )
            )
        )
    return rows


def _term_human(key: TermKey, c: Fraction, ring) -> str:
    bits = [fmt_rat(c, records=False)]
    if any(key.beta):
        bits.append("Q^(" + fmt_ints(key.beta) + ")")
    if key.zpow:
        bits.append(f"z^{key.zpow}")
    for i, j, e in key.xexp:
        bits.append(f"x[{i + 1},{j}]" + (f"^{e}" if e > 1 else ""))
    for i, l in enumerate(key.lam):
        if l:
            bits.append(f"lam{i + 1}" + (f"^{l}" if l > 1 else ""))
    mono = ring.render_mono(key.mono)
    if mono != "1":
        bits.append(mono)
    if any(key.sector):
        bits.append("[" + fmt_ints(key.sector) + "]")
    return " ".join(bits)


def series_table(series: GradedSeries) -> list[str]:
    ring = series.ctx.ring
    return [_term_human(key, c, ring) for key, c in series.ordered_terms()]


def table_records(table: InvariantTable) -> list[str]:
    rows = []
    for entry, value in table.ordered():
        rows.append(
            "\t".join(
                (
                    "invariant",
                    fmt_ints(entry.beta),
                    fmt_xexp(entry.xexp),
                    fmt_ints(entry.insertion),
                    str(entry.psi),
                    fmt_ints(entry.sector),
                    fmt_rat(value, records=True),
                )
            )
        )
    for key in sorted(table.flagged):
        rows.append("flagged\t" + "\t".join(series_records_key(key)))
    return rows


def series_records_key(key: TermKey) -> tuple[str, ...]:
    return (
        fmt_ints(key.beta),
        str(key.zpow),
        fmt_xexp(key.xexp),
        fmt_ints(key.sector),
        fmt_ints(key.mono),
        fmt_ints(key.lam),
    )


def table_human(table: InvariantTable, ring) -> list[str]:
    rows = []
    for entry, value in table.ordered():
        parts = [f"beta=({fmt_ints(entry.beta)})"]
        if entry.xexp:
            parts.append("contacts " + fmt_xexp(entry.xexp))
        parts.append(f"insert {ring.render_mono(entry.insertion)}")
        parts.append(f"psi^{entry.psi}")
        if any(entry.sector):
            parts.append(f"sector ({fmt_ints(entry.sector)})")
        rows.append("  ".join(parts) + f"  = {fmt_rat(value, records=False)}")
    if table.flagged:
        rows.append(f"# {len(table.flagged)} term(s) flagged for manual review")
    return rows


# ---------------------------------------------------------------------------
# Command implementations; each returns (exit_status, lines)
# ---------------------------------------------------------------------------


def _build_series(job: JobConfig, name: str) -> GradedSeries:
    X, arr, cap = job.target, job.arrangement, job.cap
    betas = enumerate_curve_classes(X, cap)
    max_deg = max(
        (max(arr.degrees(b), default=0) for b in betas), default=1
    )
    m = job.contact_bound(max(1, max_deg))
    floor = -(cap + 2)
    if name == "root":
        return i_root_nonextended(X, arr, job.require_roots(), cap)
    if name == "root-extended":
        return i_root_extended(X, arr, job.require_roots(), m, cap, z_floor=floor)
    if name == "infinity":
        return i_infinity_nonextended(X, arr, cap)
    if name == "infinity-extended":
        return i_infinity_extended(X, arr, m, cap, z_floor=floor)
    if name == "infinity-extended-h0":
        return i_infinity_extended_h0(X, arr, m, cap)
    if name == "relative":
        return i_relative_smooth(X, arr, cap)
    if name == "relative-extended-h0":
        return i_relative_extended_h0(X, arr, m, cap)
    if name == "local":
        return i_local(X, arr, cap)
    raise ConfigError(f"unknown series {name!r}")


def cmd_ifunction(job: JobConfig, args) -> tuple[int, list[str]]:
    name = args.series or ("root" if job.roots is not None else "infinity")
    series = _build_series(job, name)
    if args.format == "records":
        return 0, series_records(series)
    header = [f"# series {name}: {len(series)} terms"]
    return 0, header + series_table(series)


def cmd_invariants(job: JobConfig, args) -> tuple[int, list[str]]:
    X, arr, cap = job.target, job.arrangement, job.cap
    betas = enumerate_curve_classes(X, cap)
    max_deg = max((max(arr.degrees(b), default=0) for b in betas), default=1)
    m = job.contact_bound(max(1, max_deg))
    certificate = mirror_map(i_infinity_extended(X, arr, m, cap, z_floor=-1))
    if not certificate.trivial:
        raise UnsupportedMirrorMapError(
            certificate.explain() + "; Birkhoff factorization unsupported"
        )
    table = extract_invariants(i_infinity_extended_h0(X, arr, m, cap), X, arr)
    tangency = extract_invariants(i_infinity_nonextended(X, arr, cap), X, arr)
    table.entries.update(tangency.entries)
    table.flagged.extend(tangency.flagged)
    if args.format == "records":
        return 0, table_records(table)
    return 0, ["# extracted one-point invariants"] + table_human(table, X.ring)


def _roots_from_args(job: JobConfig, args) -> list[RootData]:
    if args.roots:
        out = []
        for spec in args.roots:
            orders = tuple(int(tok) for tok in spec.split(","))
            out.append(RootData(orders))
        return out
    return [job.require_roots()]


def cmd_stabilize(job: JobConfig, args) -> tuple[int, list[str]]:
    roots_list = _roots_from_args(job, args)
    report = stabilization_check(job.target, job.arrangement, roots_list, job.cap)
    lines = []
    for case in report.cases:
        if args.format == "records":
            lines.append(
                "\t".join(
                    (
                        "stabilize",
                        fmt_ints(case.roots),
                        fmt_ints(case.beta),
                        "ok" if case.ok else "mismatch",
                    )
                )
            )
        else:
            state = "ok" if case.ok else f"MISMATCH at {case.first_mismatch()}"
            lines.append(
                f"roots ({fmt_ints(case.roots)})  beta ({fmt_ints(case.beta)}): {state}"
            )
    return (0 if report.ok else 1), lines


def cmd_check_identity(job: JobConfig, args) -> tuple[int, list[str]]:
    X, arr, cap = job.target, job.arrangement, job.cap
    reports = []
    skipped = []
    for beta in enumerate_curve_classes(X, cap):
        degs = arr.degrees(beta)
        if not all(d > 0 for d in degs):
            if any(beta):
                skipped.append((beta, "some divisor misses the class"))
            continue
        try:
            if arr.n == 1:
                reports.append(check_local_relative_smooth(X, arr, beta))
            else:
                reports.append(check_local_orbifold_nonextended(X, arr, beta))
            reports.append(check_local_orbifold_extended(X, arr, beta))
        except RefusedIdentityError as err:
            skipped.append((beta, str(err)))
    lines = []
    ok = True
    for report in reports:
        ok = ok and report.ok
        if args.format == "records":
            lines.append(
                "\t".join(
                    (
                        "identity",
                        report.name,
                        fmt_ints(report.beta),
                        f"{report.sign:+d}",
                        "ok" if report.ok else "mismatch",
                    )
                )
            )
        else:
            state = "ok" if report.ok else f"MISMATCH at {report.first_mismatch()}"
            lines.append(
                f"{report.name}  beta ({fmt_ints(report.beta)})  "
                f"sign {report.sign:+d}: {state}"
            )
    for beta, reason in skipped:
        if args.format == "records":
            lines.append("\t".join(("skipped", fmt_ints(beta), reason)))
        else:
            lines.append(f"skipped beta ({fmt_ints(beta)}): {reason}")
    return (0 if ok else 1), lines


def _period_lines(seq, args) -> list[str]:
    lines = []
    for m, c in enumerate(seq.coeffs):
        if args.format == "records":
            lines.append("\t".join(("period", seq.kind, str(m), fmt_rat(c, True))))
        else:
            lines.append(f"{seq.kind}[{m}] = {fmt_rat(c, False)}")
    return lines


def cmd_period(job: JobConfig, args) -> tuple[int, list[str]]:
    quantum = quantum_period(job.target, job.cap)
    lines = _period_lines(quantum, args)
    lines += _period_lines(regularize(quantum), args)
    classical = classical_period_orbifold(job.target, job.arrangement, job.cap)
    lines += _period_lines(classical.sequence, args)
    if args.format == "records":
        for beta, degs, count in classical.contributions:
            lines.append(
                "\t".join(
                    (
                        "count",
                        fmt_ints(beta),
                        fmt_ints(degs),
                        fmt_rat(count, records=True),
                    )
                )
            )
    return 0, lines


def cmd_compare_periods(job: JobConfig, args) -> tuple[int, list[str]]:
    outcome = compare_periods(job.target, job.arrangement, job.cap)
    lines = []
    for m in range(outcome.regularized.cap + 1):
        a = outcome.regularized[m]
        b = outcome.classical[m]
        state = "ok" if a == b else "MISMATCH"
        if args.format == "records":
            lines.append(
                "\t".join(
                    ("compare", str(m), fmt_rat(a, True), fmt_rat(b, True), state)
                )
            )
        else:
            lines.append(
                f"degree {m}: regularized {fmt_rat(a, False)}  "
                f"classical {fmt_rat(b, False)}  {state}"
            )
    return (0 if outcome.ok else 1), lines


def cmd_laurent_period(args) -> tuple[int, list[str]]:
    if not args.laurent:
        raise ConfigError("laurent-period needs --laurent EXPR")
    if args.cap is None:
        raise ConfigError("laurent-period needs --cap N")
    f = LaurentPolynomial.parse(args.laurent)
    seq = laurent_classical_period(f, args.cap)
    return 0, _period_lines(seq, args)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rootstack-gw",
        description="Exact genus-zero invariants of multi-root stacks: "
        "series construction, stabilization, identity checks, periods.",
    )
    parser.add_argument("--config", help="path to the JSON job description")
    parser.add_argument("--command", required=True, choices=COMMANDS)
    parser.add_argument("--cap", type=int, help="override the degree cap")
    parser.add_argument(
        "--roots",
        action="append",
        help='root orders "r1,r2,..."; repeat the flag to stabilize over several',
    )
    parser.add_argument("--format", choices=("table", "records"), default="table")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument(
        "--series",
        choices=SERIES_CHOICES,
        help="which family the ifunction command prints",
    )
    parser.add_argument("--laurent", help="inline Laurent polynomial, e.g. 'x+y+1/(x*y)'")
    return parser


def _load_job(args) -> JobConfig:
    if not args.config:
        raise ConfigError("missing --config PATH")
    job = parse_config(args.config)
    if args.cap is not None:
        if not 1 <= args.cap <= 64:
            raise ConfigError("cap: cap must lie in 1..64")
        job = JobConfig(job.target, job.arrangement, job.roots, args.cap, job.m)
    if args.roots and len(args.roots) == 1 and args.command != "stabilize":
        orders = tuple(int(tok) for tok in args.roots[0].split(","))
        job = JobConfig(job.target, job.arrangement, RootData(orders), job.cap, job.m)
    return job


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    threads = os.environ.get("ROOTSTACK_GW_THREADS")
    if threads is not None:
        try:
            if int(threads) < 1:
                raise ValueError
        except ValueError:
            print("ROOTSTACK_GW_THREADS must be a positive integer", file=sys.stderr)
            return 1
    try:
        if args.command == "laurent-period":
            status, lines = cmd_laurent_period(args)
        else:
            job = _load_job(args)
            handler = {
                "ifunction": cmd_ifunction,
                "invariants": cmd_invariants,
                "stabilize": cmd_stabilize,
                "check-identity": cmd_check_identity,
                "period": cmd_period,
                "compare-periods": cmd_compare_periods,
            }[args.command]
            status, lines = handler(job, args)
    except DivisibilityError as err:
        print(f"internal divisibility failure: {err}", file=sys.stderr)
        return 3
    except (UnsupportedMirrorMapError, PeriodError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ConfigError, ConfigurationError, ExtendedDataTooSmall, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
