"""Cross-checks behind ``wichtel verify``.

Each check compares two independent routes to the same number and records
a :class:`CheckResult`; nothing here raises on a mismatch, the caller
decides what a failure means.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction

from . import counting as C
from .distribution import pair_distribution
from .permutations import MAX_ORACLE_CAP, OracleCapExceeded, oracle_cap, oracle_census

__all__ = ["CheckResult", "run_verification"]

# ranges for the formula-only checks (no enumeration of S_n involved)
FORMULA_MAX_N = 60
ROUNDING_MAX_N = 500


@dataclass(frozen=True)
class CheckResult:
    name: str
    n: int
    passed: bool
    detail: str = ""


def _check(name: str, n: int, got, want) -> CheckResult:
    ok = got == want
    return CheckResult(name, n, ok, "" if ok else f"got {got}, expected {want}")


def _oracle_checks(n: int, cap: int) -> Iterator[CheckResult]:
    census = oracle_census(n, cap=cap)
    yield _check("oracle:F", n, C.derangement_count_sum(n), census.derangements)
    yield _check("oracle:g3", n, C.g_ge3(n), census.no_short_cycles)
    yield _check("oracle:P", n, C.pair_count_subtraction(n), census.derangements - census.no_short_cycles)
    for k in range(n // 2 + 1):
        yield _check(f"oracle:P_k={k}", n, C.exact_pair_k_count(n, k), census.pair_histogram.get(k, 0))
    mismatched = [t for t, c in census.type_counts.items() if C.count_of_type(t) != c]
    yield CheckResult("oracle:type_counts", n, not mismatched, f"mismatch at {mismatched[:3]}" if mismatched else "")
    types = C.enumerate_types(n)
    yield _check("oracle:type_set", n, sorted(t.counts for t in types), sorted(t.counts for t in census.type_counts))
    yield _check("types:sum_to_n!", n, sum(C.count_of_type(t) for t in types), C.factorial(n))
    dist = pair_distribution(n)
    oracle_pmf = tuple(Fraction(census.pair_histogram.get(k, 0), census.derangements) for k in range(n // 2 + 1))
    yield _check("oracle:pmf", n, dist.pmf, oracle_pmf)


def run_verification(cap: int | None = None) -> list[CheckResult]:
    """Run every cross-check; oracle comparisons cover 2..cap."""
    cap = oracle_cap() if cap is None else cap
    if cap > MAX_ORACLE_CAP:
        raise OracleCapExceeded(f"cap {cap} exceeds the hard limit {MAX_ORACLE_CAP}")
    results: list[CheckResult] = []
    for n in range(2, cap + 1):
        results.extend(_oracle_checks(n, cap))
    for n in range(FORMULA_MAX_N + 1):
        typesum = C.pair_count_typesum(n)
        results.append(_check("P:typesum=recurrence", n, typesum, C.pair_count_recurrence(n)))
        results.append(_check("P:typesum=subtraction", n, typesum, C.pair_count_subtraction(n)))
        results.append(_check("P:typesum=explicit", n, typesum, C.pair_count_explicit(n)))
        results.append(_check("F:sum=recurrence", n, C.derangement_count_sum(n), C.derangement_count_recurrence(n)))
        if n >= 2:
            expected = sum(C.partitions_at_most(k - 1, n - 2 * k) for k in range(2, n // 2 + 1)) + (n == 2)
            results.append(_check("types:partition_bijection", n, C.pair_type_count(n), expected))
            dist = pair_distribution(n)
            results.append(_check("pmf:normalised", n, sum(dist.pmf), Fraction(1)))
            results.append(_check("pmf:P_over_F", n, dist.at_least(1),
                                  Fraction(C.pair_count_subtraction(n), C.derangement_count_sum(n))))
    for n in range(2, ROUNDING_MAX_N + 1):
        try:
            got = C.derangement_count_rounding(n)
        except ArithmeticError as exc:
            results.append(CheckResult("F:nearest_integer", n, False, str(exc)))
            continue
        results.append(_check("F:nearest_integer", n, got, C.derangement_count_sum(n)))
    return results
