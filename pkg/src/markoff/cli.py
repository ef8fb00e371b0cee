"""Command-line front end.

Exit codes: 0 pass, 1 usage or I/O error (or "not found"), 2 mathematical
counterexample, 3 precision could not decide.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from markoff import gaps, matrices, triples
from markoff.checkpoint import DEFAULT_INTERVAL, CheckpointError, run_enumeration, write_atomic
from markoff.words import Mat2, farey_letters, farey_word, iter_farey_by_c, parse_fraction

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COUNTEREXAMPLE = 2
EXIT_UNDECIDED = 3

DIGITS_ENV = "MARKOFF_DIGITS"
DEFAULT_WITNESS = "markoff-witness.json"

log = logging.getLogger("markoff")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a decimal integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text}")
    return value


def _default_digits() -> int:
    raw = os.environ.get(DIGITS_ENV)
    return int(raw) if raw else gaps.DEFAULT_DIGITS


def _dump(obj: Any) -> str:
    return json.dumps(obj) + "\n"


def cmd_enumerate(args: argparse.Namespace) -> int:
    count = run_enumeration(
        args.max_c,
        Path(args.out),
        None if args.checkpoint is None else Path(args.checkpoint),
        interval=args.checkpoint_every,
        workers=args.workers,
        halt_after=args.halt_after,
    )
    print(f"{count} triples with max <= {args.max_c} written to {args.out}")
    return EXIT_OK


def build_audit_report(args: argparse.Namespace) -> tuple[dict[str, Any], list[dict[str, Any]]]:
    uniq = triples.audit_uniqueness(args.max_c, args.workers)
    override = None
    if args.inject_fault is not None:
        # Test hook: corrupt one representative so its determinant is 2.
        reps = matrices.representatives(args.max_c)
        if args.inject_fault in reps:
            _, w = reps[args.inject_fault]
            override = {args.inject_fault: Mat2(w.a, w.b + 1, w.c, w.d)}
    theorem = matrices.audit_theorem(args.max_c, args.factor_bound, args.workers, override)
    failures = theorem.all_failures()
    for c, ts in uniq.duplicates.items():
        failures.append({"c": str(c), "check": "unique_triple", "triples": [[str(x) for x in t.as_tuple()] for t in ts]})
    report = theorem.to_json()
    report["uniqueness"] = {
        "triple_count": uniq.triple_count,
        "markoff_numbers": len(uniq.markoff_numbers),
        "duplicates": {str(c): [[str(x) for x in t.as_tuple()] for t in ts] for c, ts in uniq.duplicates.items()},
    }
    report["summary"]["ok"] = not failures
    return report, failures


def cmd_audit(args: argparse.Namespace) -> int:
    report, failures = build_audit_report(args)
    for cls in report["classes"]:
        print(f"c={cls['c']} {cls['classification']} shifts={len(cls['shifts'])} {cls['status']}")
    summary = report["summary"]
    print(
        f"{summary['classes']} classes audited, {summary['failed']} failed, "
        f"{report['uniqueness']['triple_count']} triples, duplicates={len(report['uniqueness']['duplicates'])}"
    )
    if args.report:
        write_atomic(Path(args.report), _dump(report))
    if failures:
        write_atomic(Path(args.witness), _dump({"c_bound": str(args.max_c), "failures": failures}))
        print(f"COUNTEREXAMPLE: witness written to {args.witness}", file=sys.stderr)
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


def cmd_farey(args: argparse.Namespace) -> int:
    f = parse_fraction(args.fraction)
    w = farey_word(f)
    out = {
        "fraction": f"{f.numerator}/{f.denominator}",
        "letters": farey_letters(f),
        "matrix": w.to_json(),
        "trace": str(w.trace),
        "c": str(w.c),
    }
    sys.stdout.write(_dump(out))
    return EXIT_OK


def _gap_rows(gs: list[gaps.Gap], digits: int) -> list[dict[str, str]]:
    rows = []
    for g in gs:
        lo, hi = g.width.to_decimal(digits)
        rows.append({"c": str(g.c), "center": f"{g.center.numerator}/{g.center.denominator}", "width_lo": lo, "width_hi": hi})
    return rows


def cmd_gaps(args: argparse.Namespace) -> int:
    summary = gaps.summarize(args.max_c, args.digits)
    rows = _gap_rows(summary.gaps, args.digits)
    info = summary.to_json()
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["c", "center", "width_lo", "width_hi"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        sys.stdout.write(buf.getvalue())
        if args.summary:
            write_atomic(Path(args.summary), _dump(info))
        else:
            sys.stderr.write(_dump(info))
    else:
        sys.stdout.write(_dump({"gaps": rows, "summary": info}))
    verdict = summary.disjoint.verdict
    if verdict is gaps.Verdict.OVERLAP:
        return EXIT_COUNTEREXAMPLE
    if verdict is gaps.Verdict.UNDECIDED:
        return EXIT_UNDECIDED
    return EXIT_OK


def certify(c: int) -> dict[str, Any] | None:
    """All Farey classes with lower-left entry ``c`` and pairwise certificates."""
    found = [(f, w) for f, w in iter_farey_by_c(c) if w.c == c]
    if not found:
        return None
    mats = [(f, matrices.MarkoffMatrix(w, f)) for f, w in found]
    out: dict[str, Any] = {
        "c": str(c),
        "classes": [
            {"fraction": f"{f.numerator}/{f.denominator}", "matrix": m.m.to_json(), "key": [str(x) for x in _key(m)]}
            for f, m in mats
        ],
        "certificates": [],
        "distinct": [],
    }
    for i, (f, m) in enumerate(mats):
        for g, n in mats[i + 1 :]:
            cert = matrices.uniqueness_certificate(m, n)
            pair = {"from": _frac(f), "to": _frac(g)}
            if cert is None:
                out["distinct"].append(pair)
            else:
                out["certificates"].append({**pair, "certificate": cert.to_json()})
    return out


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _key(m: matrices.MarkoffMatrix) -> tuple[int, int]:
    k = matrices.canonical_key(m)
    return (k.c_abs, k.residue)


def cmd_certify(args: argparse.Namespace) -> int:
    result = certify(args.c)
    if result is None:
        print(f"not found: {args.c} is not a Markoff number", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(_dump(result))
    return EXIT_COUNTEREXAMPLE if result["distinct"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="markoff", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="write Markoff triples as JSON lines")
    p.add_argument("--max-c", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--checkpoint")
    p.add_argument("--checkpoint-every", type=_positive_int, default=DEFAULT_INTERVAL)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--halt-after", type=_positive_int, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("audit", help="audit uniqueness and the prime-power theorem")
    p.add_argument("--max-c", type=_positive_int, required=True)
    p.add_argument("--factor-bound", type=_positive_int, default=matrices.DEFAULT_FACTOR_BOUND)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--report")
    p.add_argument("--witness", default=DEFAULT_WITNESS)
    p.add_argument("--inject-fault", type=_positive_int, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("farey", help="show the word for a Farey fraction")
    p.add_argument("--fraction", required=True)
    p.set_defaults(func=cmd_farey)

    p = sub.add_parser("gaps", help="McShane gaps, disjointness, partial sum")
    p.add_argument("--max-c", type=_positive_int, required=True)
    p.add_argument("--digits", type=_positive_int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--summary")
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("certify", help="equivalence certificates for one Markoff number")
    p.add_argument("--c", type=_positive_int, required=True)
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "digits", 0) is None:
        args.digits = _default_digits()
    try:
        return args.func(args)
    except CheckpointError as err:
        print(f"checkpoint error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
