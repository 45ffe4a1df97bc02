"""
Command-line interface for wichtel.

Usage:
    wichtel count --n 7 --what PN          # derangements with >= 1 mutual pair
    wichtel count --n 6 --what PNk --k 3   # ... with exactly 3 pairs
    wichtel dist --n 20                    # exact law of the pair count (JSON)
    wichtel tail --n 20 --k 3              # P(at least 3 pairs)
    wichtel table --n-min 2 --n-max 60     # convergence table (CSV)
    wichtel simulate --n 20 --trials 1000000 --seed 1
    wichtel verify --cap 9                 # all cross-checks against brute force

Exact counts are written as decimal strings and exact probabilities as
"num/den"; floats use Python's shortest round-trip repr.

Exit codes: 0 ok, 2 usage, 3 invariant failure, 4 oracle cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections.abc import Sequence
from fractions import Fraction

from . import counting as C
from .distribution import (
    asymptotic_at_least,
    convergence_table,
    pair_distribution,
    poisson_half_pmf,
    prob_at_least,
)
from .permutations import OracleCapExceeded
from .sampler import monte_carlo_histogram
from .verify import run_verification

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_CAP = 4

MAX_N = 5000
# beyond these sizes a method is skipped in the cross-check (cost, not correctness)
METHOD_LIMITS = {"typesum": 60, "explicit": 200, "rec1": 500, "types": 60}


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


def ratio_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _agree(label: str, values: dict[str, int]) -> int:
    distinct = set(values.values())
    if len(distinct) != 1:
        raise InvariantError(f"{label}: methods disagree: {values}")
    return distinct.pop()


def _fn_methods(n: int) -> dict[str, int]:
    methods = {
        "inclusion_exclusion": C.derangement_count_sum(n),
        "recurrence": C.derangement_count_recurrence(n),
    }
    if n >= 2:
        methods["nearest_integer"] = C.derangement_count_rounding(n)
    return methods


def _pn_methods(n: int) -> dict[str, int]:
    methods = {
        "recurrence": C.pair_count_recurrence(n),
        "subtraction": C.pair_count_subtraction(n),
    }
    if n <= METHOD_LIMITS["typesum"]:
        methods["typesum"] = C.pair_count_typesum(n)
    if n <= METHOD_LIMITS["explicit"]:
        methods["explicit"] = C.pair_count_explicit(n)
    if n <= METHOD_LIMITS["rec1"]:
        methods["rec1"] = C.pair_count_rec1(n)
    return methods


def _g3_methods(n: int) -> dict[str, int]:
    methods = {"contracted": C.g_ge3(n)}
    if n <= METHOD_LIMITS["explicit"]:
        methods["uncontracted"] = C.g_ge3_uncontracted(n)
    return methods


# --- output helpers -------------------------------------------------------


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(obj: object) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --- commands -------------------------------------------------------------


def cmd_count(args: argparse.Namespace, fmt: str) -> str:
    n, what = args.n, args.what
    if what == "FN":
        methods = _fn_methods(n)
        value = _agree(f"F({n})", methods)
    elif what == "PN":
        methods = _pn_methods(n)
        value = _agree(f"P({n})", methods)
    elif what == "g3":
        methods = _g3_methods(n)
        value = _agree(f"g3({n})", methods)
    elif what == "PNk":
        if args.k is None:
            raise UsageError("--what PNk requires --k")
        if not 0 <= args.k <= n // 2:
            raise UsageError(f"--k must be in 0..{n // 2} for n={n}")
        value = C.exact_pair_k_count(n, args.k)
        methods = {"formula": value}
    elif what == "types":
        return _count_types(n, fmt)
    elif what == "type_count":
        return _count_type_count(n, fmt)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown quantity {what}")

    k = args.k if what == "PNk" else None
    if fmt == "json":
        return _json_text({
            "n": n,
            "what": what,
            "k": k,
            "value": str(value),
            "methods": {name: str(v) for name, v in methods.items()},
        })
    return _csv_text(["n", "what", "k", "value"], [[n, what, "" if k is None else k, value]])


def _count_types(n: int, fmt: str) -> str:
    if n > METHOD_LIMITS["types"]:
        raise UsageError(f"listing types is limited to n <= {METHOD_LIMITS['types']}")
    types = C.enumerate_pair_types(n)
    rows = [("+".join(map(str, t.parts())), str(t), C.count_of_type(t)) for t in types]
    if fmt == "json":
        return _json_text({
            "n": n,
            "types": [{"partition": p, "counts": list(t.counts), "permutations": str(c)}
                      for (p, _, c), t in zip(rows, types)],
        })
    return _csv_text(["n", "partition", "counts", "permutations"], [[n, p, s, c] for p, s, c in rows])


def _count_type_count(n: int, fmt: str) -> str:
    if n < 2:
        raise UsageError("type_count needs n >= 2")
    if n > METHOD_LIMITS["types"]:
        raise UsageError(f"type_count is limited to n <= {METHOD_LIMITS['types']}")
    enumerated = C.pair_type_count(n, "enumerated")
    printed = C.pair_type_count(n, "printed")
    if fmt == "json":
        return _json_text({"n": n, "what": "type_count", "enumerated": enumerated, "printed_formula": printed})
    return _csv_text(
        ["n", "what", "k", "value"],
        [[n, "type_count:enumerated", "", enumerated], [n, "type_count:printed_formula", "", printed]],
    )


def cmd_dist(args: argparse.Namespace, fmt: str) -> str:
    dist = pair_distribution(args.n)
    items = []
    for k, p in enumerate(dist.pmf):
        tail = dist.at_least(k)
        items.append({
            "k": k,
            "exact": ratio_str(p),
            "float": float(p),
            "poisson_limit": poisson_half_pmf(k),
            "tail_exact": ratio_str(tail),
            "tail_float": float(tail),
        })
    if fmt == "json":
        return _json_text({
            "n": dist.n,
            "pmf": items,
            "mean_exact": ratio_str(dist.mean),
            "mean_float": float(dist.mean),
            "second_moment_exact": ratio_str(dist.second_moment),
        })
    header = ["k", "exact", "float", "poisson_limit", "tail_exact", "tail_float"]
    return _csv_text(header, [[it[h] if not isinstance(it[h], float) else repr(it[h]) for h in header] for it in items])


def cmd_tail(args: argparse.Namespace, fmt: str) -> str:
    if args.k < 0:
        raise UsageError("--k must be non-negative")
    p = prob_at_least(args.n, args.k)
    record = {
        "n": args.n,
        "k": args.k,
        "exact": ratio_str(p),
        "float": float(p),
        "asymptotic": asymptotic_at_least(args.k),
    }
    if fmt == "json":
        return _json_text(record)
    return _csv_text(list(record), [[repr(v) if isinstance(v, float) else v for v in record.values()]])


TABLE_COLUMNS = ["n", "prob_ge_1", "prob_ge_3", "tv_poisson", "mean"]


def cmd_table(args: argparse.Namespace, fmt: str) -> str:
    if args.n_min < 2 or args.n_max < args.n_min:
        raise UsageError("need 2 <= --n-min <= --n-max")
    rows = [(r.n, r.prob_at_least_1, r.prob_at_least_3, r.tv_to_poisson, r.mean)
            for r in convergence_table(args.n_min, args.n_max)]
    if fmt == "json":
        return _json_text([dict(zip(TABLE_COLUMNS, row)) for row in rows])
    return _csv_text(TABLE_COLUMNS, [[row[0], *map(repr, row[1:])] for row in rows])


def cmd_simulate(args: argparse.Namespace, fmt: str) -> str:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    report = monte_carlo_histogram(args.n, args.trials, args.seed)
    if fmt == "json":
        return _json_text({
            "n": report.n,
            "trials": report.trials,
            "seed": report.seed,
            "histogram": {str(k): c for k, c in report.histogram.items()},
            "accept_rate": report.accept_rate,
            "rejected": report.rejected,
        })
    return _csv_text(["k", "count", "fraction"],
                     [[k, c, repr(c / report.trials)] for k, c in report.histogram.items()])


def cmd_verify(args: argparse.Namespace, fmt: str) -> tuple[str, bool]:
    results = run_verification(args.cap)
    ok = all(r.passed for r in results)
    if fmt == "json":
        text = _json_text({
            "passed": ok,
            "checks": len(results),
            "failures": [r.__dict__ for r in results if not r.passed],
            "results": [r.__dict__ for r in results],
        })
    else:
        text = _csv_text(["check", "n", "status", "detail"],
                         [[r.name, r.n, "PASS" if r.passed else "FAIL", r.detail] for r in results])
    return text, ok


DEFAULT_FORMATS = {"count": "csv", "dist": "json", "tail": "csv", "table": "csv", "simulate": "json", "verify": "csv"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default=argparse.SUPPRESS,
                        help="output format (default depends on the command)")
    common.add_argument("--output", "-o", default=argparse.SUPPRESS, help="write to this path instead of stdout")

    parser = argparse.ArgumentParser(
        prog="wichtel",
        description="Exact counts and probabilities for mutual pairs in Secret Santa draws.",
    )
    parser.add_argument("--format", choices=["csv", "json"], default=None)
    parser.add_argument("--output", "-o", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def n_arg(p: argparse.ArgumentParser, lo: int) -> None:
        def parse(text: str) -> int:
            value = int(text)
            if not lo <= value <= MAX_N:
                raise argparse.ArgumentTypeError(f"n must be in {lo}..{MAX_N}")
            return value
        p.add_argument("--n", type=parse, required=True)

    p = sub.add_parser("count", parents=[common], help="exact counts")
    n_arg(p, 0)
    p.add_argument("--what", required=True, choices=["FN", "PN", "g3", "PNk", "types", "type_count"])
    p.add_argument("--k", type=int)

    p = sub.add_parser("dist", parents=[common], help="exact law of the pair count")
    n_arg(p, 2)

    p = sub.add_parser("tail", parents=[common], help="P(at least k pairs)")
    n_arg(p, 2)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("table", parents=[common], help="convergence table")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=60)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo histogram")
    n_arg(p, 2)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify", parents=[common], help="run all cross-checks")
    p.add_argument("--cap", type=int, default=None, help="largest n for exhaustive checks (default 9, max 10)")
    return parser


COMMANDS = {
    "count": cmd_count,
    "dist": cmd_dist,
    "tail": cmd_tail,
    "table": cmd_table,
    "simulate": cmd_simulate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format or DEFAULT_FORMATS[args.command]
    try:
        if args.command == "verify":
            text, ok = cmd_verify(args, fmt)
            _emit(text, args.output)
            if not ok:
                print("verification failed", file=sys.stderr)
                return EXIT_INVARIANT
            return EXIT_OK
        text = COMMANDS[args.command](args, fmt)
    except OracleCapExceeded as exc:
        print(f"wichtel: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"wichtel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"wichtel: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    _emit(text, args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
