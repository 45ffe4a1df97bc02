"""Exact counts of derangements and their 2-cycle structure.

All counts are Python ``int`` (arbitrary precision); rational intermediate
steps use :class:`fractions.Fraction` or an explicit common denominator,
and every exported count is checked to be a non-negative integer.

Naming follows the combinatorics:

* ``F(n)``   derangements of n elements
* ``P(n)``   derangements with at least one 2-cycle
* ``P(n, k)`` derangements with exactly k 2-cycles
* ``g3(n)``  permutations whose cycles all have length >= 3

Thread safety: the memo tables below are only read or grown under one
module lock, so the functions may be called from several threads at once.
``g_ge3`` computes outside the lock; two threads may evaluate the same n,
and the first stored value wins (both are identical).
"""

from __future__ import annotations

import math
import threading
from collections import Counter
from collections.abc import Iterator
from fractions import Fraction
from typing import Literal

from .permutations import CycleType

__all__ = [
    "count_of_type",
    "derangement_count_recurrence",
    "derangement_count_rounding",
    "derangement_count_sum",
    "enumerate_pair_types",
    "enumerate_types",
    "exact_pair_k_count",
    "factorial",
    "g_ge3",
    "g_ge3_uncontracted",
    "inv_e_bracket",
    "pair_count_explicit",
    "pair_count_rec1",
    "pair_count_recurrence",
    "pair_count_subtraction",
    "pair_count_typesum",
    "pair_type_count",
    "partitions_at_most",
]

_lock = threading.RLock()
_factorials: list[int] = [1]
_derangements: list[int] = [1, 0]
_g3: dict[int, int] = {}
_partition_rows: dict[int, list[int]] = {}
_inv_e_numerators: list[int] = [1]  # M! * sum_{k<=M} (-1)^k / k!


def _check_n(n: int) -> None:
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")


def factorial(n: int) -> int:
    if 0 <= n < len(_factorials):
        return _factorials[n]
    _check_n(n)
    with _lock:
        while len(_factorials) <= n:
            _factorials.append(_factorials[-1] * len(_factorials))
        return _factorials[n]


def derangement_count_sum(n: int) -> int:
    """Inclusion-exclusion: sum over k of (-1)^k n!/k!."""
    _check_n(n)
    total = 0
    falling = 1  # n!/k!, starting at k = n
    for k in range(n, -1, -1):
        total += -falling if k % 2 else falling
        falling *= k if k else 1
    assert total >= 0
    return total


def derangement_count_recurrence(n: int) -> int:
    """D(n) = (n-1)(D(n-1) + D(n-2)), D(0)=1, D(1)=0."""
    _check_n(n)
    with _lock:
        while len(_derangements) <= n:
            m = len(_derangements)
            _derangements.append((m - 1) * (_derangements[-1] + _derangements[-2]))
        return _derangements[n]


def inv_e_bracket(m: int) -> tuple[Fraction, Fraction]:
    """Rationals ``(lo, hi)`` with ``lo < 1/e < hi`` and ``hi - lo = 1/(m+1)!``.

    The endpoints are consecutive partial sums of the alternating series for
    1/e, which straddle the limit.
    """
    _check_n(m)
    with _lock:
        while len(_inv_e_numerators) <= m + 1:
            j = len(_inv_e_numerators)
            sign = -1 if j % 2 else 1
            _inv_e_numerators.append(_inv_e_numerators[-1] * j + sign)
        a = Fraction(_inv_e_numerators[m], factorial(m))
        b = Fraction(_inv_e_numerators[m + 1], factorial(m + 1))
    return (a, b) if a < b else (b, a)


def derangement_count_rounding(n: int) -> int:
    """Nearest integer to n!/e, with 1/e bracketed by exact rationals.

    Raises ``ArithmeticError`` if the bracket does not pin down a single
    integer (it always does for n >= 2).
    """
    if n < 2:
        raise ValueError(f"nearest-integer formula holds for n >= 2, got {n}")
    nf = factorial(n)
    # need 1/(m+1)! < 1/(2 n! + 2)
    m = n
    while factorial(m + 1) <= 2 * nf + 2:
        m += 1
    lo, hi = inv_e_bracket(m)
    half = Fraction(1, 2)
    floor_lo = math.floor(nf * lo + half)
    floor_hi = math.floor(nf * hi + half)
    if floor_lo != floor_hi:
        raise ArithmeticError(f"bracket for {n}!/e does not resolve: {floor_lo} vs {floor_hi}")
    return floor_lo


def _ascending_partitions(n: int, min_part: int = 1) -> Iterator[list[int]]:
    """Partitions of n into parts >= min_part, each as a non-decreasing list.

    Kelleher's ``accel_asc`` with the smallest admissible part raised.
    """
    if n == 0:
        yield []
        return
    if n < min_part:
        return
    a = [0] * (n + 1)
    a[0] = min_part - 1
    k = 1
    y = n - min_part
    while k != 0:
        x = a[k - 1] + 1
        k -= 1
        while 2 * x <= y:
            a[k] = x
            y -= x
            k += 1
        last = k + 1
        while x <= y:
            a[k] = x
            a[last] = y
            yield a[: k + 2]
            x += 1
            y -= 1
        a[k] = x + y
        y = x + y - 1
        yield a[: k + 1]


def _pair_partitions(n: int) -> Iterator[list[int]]:
    # a type with a_1 = 0, a_2 >= 1 is a 2 plus a partition of n-2 into parts >= 2
    if n < 2:
        return
    for rest in _ascending_partitions(n - 2, min_part=2):
        yield [2, *rest]


def _to_type(n: int, parts: list[int]) -> CycleType:
    counts = [0] * n
    for p in parts:
        counts[p - 1] += 1
    return CycleType(tuple(counts), n)


def enumerate_types(n: int) -> list[CycleType]:
    """Every cycle type of S_n, in descending lexicographic order of counts."""
    _check_n(n)
    types = [_to_type(n, parts) for parts in _ascending_partitions(n)]
    return sorted(types, key=lambda t: t.counts, reverse=True)


def enumerate_pair_types(n: int) -> list[CycleType]:
    """Cycle types with no fixed points and at least one 2-cycle.

    Ordered by descending lexicographic order of ``counts``, so for n=7 the
    type ``(0,2,1,0,0,0,0)`` comes before ``(0,1,0,0,1,0,0)``.
    """
    _check_n(n)
    types = [_to_type(n, parts) for parts in _pair_partitions(n)]
    return sorted(types, key=lambda t: t.counts, reverse=True)


def _count_from_parts(n: int, parts: list[int]) -> int:
    denom = 1
    for length, mult in Counter(parts).items():
        denom *= length**mult * factorial(mult)
    value, rem = divmod(factorial(n), denom)
    assert rem == 0, f"non-integral count for parts {parts}"
    return value


def count_of_type(a: CycleType) -> int:
    """n! / (prod i^{a_i} * prod a_i!)."""
    n = a.n
    if sum(i * c for i, c in enumerate(a.counts, start=1)) != n:
        raise ValueError(f"{a} is not a cycle type of {n}")
    denom = 1
    for i, c in enumerate(a.counts, start=1):
        if c:
            denom *= i**c * factorial(c)
    value = Fraction(factorial(n), denom)
    assert value.denominator == 1, f"non-integral count for type {a}"
    return value.numerator


def pair_count_typesum(n: int) -> int:
    """Sum of :func:`count_of_type` over :func:`enumerate_pair_types`.

    Streams the partitions instead of materialising sorted ``CycleType``
    objects; the result is the same sum.
    """
    _check_n(n)
    return sum(_count_from_parts(n, parts) for parts in _pair_partitions(n))


def partitions_at_most(k: int, n: int) -> int:
    """Number of partitions of n into at most k parts.

    Rows ``p_k(0..m)`` are built from ``p_{k-1}`` with
    ``p_k(m) = p_{k-1}(m) + p_k(m-k)`` and extended when a larger m is asked for.
    """
    if k < 0 or n < 0:
        raise ValueError(f"k and n must be non-negative, got k={k}, n={n}")
    with _lock:
        return _partition_row(k, n)[n]


def _partition_row(k: int, n: int) -> list[int]:
    row = _partition_rows.get(k)
    if row is not None and len(row) > n:
        return row
    if k == 0:
        row = [1] + [0] * n
    else:
        prev = _partition_row(k - 1, n)
        row = [0] * (n + 1)
        for m in range(n + 1):
            row[m] = prev[m] + (row[m - k] if m >= k else 0)
    _partition_rows[k] = row
    return row


def pair_type_count(n: int, variant: Literal["printed", "enumerated"] = "enumerated") -> int:
    """How many cycle types contribute to the type-sum for P(n).

    ``"printed"`` evaluates ``sum_{k=2}^{n//2} p_{k-1}(n-2k) + 1`` as printed;
    it overshoots the true number by one for n >= 4. ``"enumerated"`` counts
    :func:`enumerate_pair_types` directly.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if variant == "printed":
        return sum(partitions_at_most(k - 1, n - 2 * k) for k in range(2, n // 2 + 1)) + 1
    if variant == "enumerated":
        # same stream enumerate_pair_types sorts, counted without building objects
        return sum(1 for _ in _pair_partitions(n))
    raise ValueError(f"unknown variant {variant!r}")


def pair_count_rec1(n: int) -> int:
    """First recursion: condition on the cycle containing the last element.

    P(n) = sum_{k=2}^{n-3} P(k) (n-1)!/k! + F(n-2) (n-1), with P(0)=P(1)=0.
    """
    _check_n(n)
    table = [0, 0]
    for m in range(2, n + 1):
        value = derangement_count_sum(m - 2) * (m - 1)
        for k in range(2, m - 2):
            value += table[k] * (factorial(m - 1) // factorial(k))
        table.append(value)
    return table[n]


def pair_count_recurrence(n: int) -> int:
    """P(n) = (n-1) (P(n-1) + (n-2) P(n-3) + (-1)^n) for n >= 4.

    P(2) and P(3) are seeded from :func:`pair_count_rec1`.
    """
    _check_n(n)
    table = [0, 0, pair_count_rec1(2), pair_count_rec1(3)]
    for m in range(4, n + 1):
        sign = -1 if m % 2 else 1
        table.append((m - 1) * (table[m - 1] + table[m - 3] * (m - 2) + sign))
    return table[n]


def g_ge3(n: int) -> int:
    """Permutations of n elements with every cycle of length >= 3.

    n! * sum_{k=0}^{n} (-1)^k sum_{j=0}^{k//2} (-1)^j / ((k-2j)! j! 2^j),
    summed over the common denominator 2^(n//2) and divided out exactly.
    """
    _check_n(n)
    with _lock:
        cached = _g3.get(n)
    if cached is not None:
        return cached
    nf = factorial(n)
    half = n // 2
    scaled = 0
    for k in range(n + 1):
        # term_j = n! 2^(half-j) / ((k-2j)! j!), an integer since (k-2j)! j! | k!;
        # consecutive terms differ by the factor (k-2j)(k-2j-1) / (2(j+1))
        term = (nf // factorial(k)) << half
        inner = 0
        for j in range(k // 2 + 1):
            inner += -term if j % 2 else term
            term = term * ((k - 2 * j) * (k - 2 * j - 1)) // (2 * (j + 1))
        scaled += -inner if k % 2 else inner
    value, rem = divmod(scaled, 1 << half)
    assert rem == 0 and value >= 0, f"g3({n}) is not a non-negative integer"
    with _lock:
        value = _g3.setdefault(n, value)
    return value


def g_ge3_uncontracted(n: int) -> int:
    """Same count as :func:`g_ge3`, with the inner sum over even j <= k.

    Evaluated term by term in ``Fraction`` arithmetic.
    """
    _check_n(n)
    total = Fraction(0)
    for k in range(n + 1):
        for j in range(0, k + 1, 2):
            sign = (-1) ** (k - j) * (-1) ** (j // 2)
            total += Fraction(sign, factorial(k - j) * factorial(j // 2) * 2 ** (j // 2))
    value = total * factorial(n)
    assert value.denominator == 1
    return value.numerator


def pair_count_subtraction(n: int) -> int:
    """P(n) = F(n) - g3(n)."""
    return derangement_count_sum(n) - g_ge3(n)


def pair_count_explicit(n: int) -> int:
    """Closed form for P(n) from the generating function, inner j-sum included."""
    return derangement_count_sum(n) - g_ge3_uncontracted(n)


def exact_pair_k_count(n: int, k: int) -> int:
    """Derangements of n elements with exactly k 2-cycles.

    n! / ((n-2k)! 2^k k!) * g3(n-2k).
    """
    _check_n(n)
    if k < 0 or k > n // 2:
        raise ValueError(f"k must be in 0..{n // 2} for n={n}, got {k}")
    ways = Fraction(factorial(n), factorial(n - 2 * k) * 2**k * factorial(k))
    assert ways.denominator == 1
    return ways.numerator * g_ge3(n - 2 * k)
