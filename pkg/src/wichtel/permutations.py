"""Explicit permutations and the exhaustive oracle over S_n.

Everything here is brute force on purpose: the closed-form counts in
:mod:`wichtel.counting` are certified by comparing against a full
classification of every permutation of a small set.

Labels are 0-based; ``mapping[i]`` is the image of ``i``.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DEFAULT_ORACLE_CAP",
    "MAX_ORACLE_CAP",
    "CycleType",
    "OracleCapExceeded",
    "OracleCensus",
    "Permutation",
    "count_two_cycles",
    "cycle_type",
    "enumerate_permutations",
    "is_derangement",
    "oracle_cap",
    "oracle_census",
]

DEFAULT_ORACLE_CAP = 9
MAX_ORACLE_CAP = 10
CAP_ENV_VAR = "WICHTEL_ORACLE_CAP"


class OracleCapExceeded(ValueError):
    """Raised when an exhaustive run is requested above the oracle cap."""


@dataclass(frozen=True)
class Permutation:
    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        mapping = tuple(int(x) for x in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ValueError(f"not a permutation of 0..{len(mapping) - 1}: {mapping}")
        object.__setattr__(self, "mapping", mapping)

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    def __getitem__(self, i: int) -> int:
        return self.mapping[i]

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> Permutation:
        """Build from disjoint cycles, e.g. ``from_cycles(5, [(0, 1, 2), (3, 4)])``."""
        mapping = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, (*cyc[1:], cyc[0])):
                mapping[a] = b
        return cls(tuple(mapping))

    def one_based(self) -> tuple[int, ...]:
        """Mapping with labels shifted to 1..n, for display."""
        return tuple(x + 1 for x in self.mapping)


@dataclass(frozen=True)
class CycleType:
    """Cycle counts ``(a_1, ..., a_n)``: ``a_i`` cycles of length ``i``."""

    counts: tuple[int, ...]
    n: int = field(default=-1)

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        n = len(counts) if self.n < 0 else self.n
        if len(counts) != n:
            raise ValueError(f"counts has length {len(counts)}, expected {n}")
        if any(c < 0 for c in counts):
            raise ValueError(f"negative cycle count in {counts}")
        total = sum(i * c for i, c in enumerate(counts, start=1))
        if total != n:
            raise ValueError(f"sum of i*a_i is {total}, not {n}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "n", n)

    def __getitem__(self, length: int) -> int:
        """Number of cycles of the given length (1-based, as in ``a_i``)."""
        if length < 1:
            raise IndexError("cycle lengths start at 1")
        return self.counts[length - 1] if length <= self.n else 0

    @property
    def fixed_points(self) -> int:
        return self[1]

    @property
    def two_cycles(self) -> int:
        return self[2]

    def parts(self) -> tuple[int, ...]:
        """The cycle lengths as a non-decreasing partition of n."""
        return tuple(i for i, c in enumerate(self.counts, start=1) for _ in range(c))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.counts)) + ")"


def cycle_type(perm: Permutation | Sequence[int]) -> CycleType:
    mapping = perm.mapping if isinstance(perm, Permutation) else tuple(perm)
    n = len(mapping)
    counts = [0] * n
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = mapping[i]
            length += 1
        counts[length - 1] += 1
    return CycleType(tuple(counts), n)


def count_two_cycles(perm: Permutation | Sequence[int]) -> int:
    mapping = perm.mapping if isinstance(perm, Permutation) else perm
    return sum(1 for i, j in enumerate(mapping) if i < j and mapping[j] == i)


def is_derangement(perm: Permutation | Sequence[int]) -> bool:
    mapping = perm.mapping if isinstance(perm, Permutation) else perm
    return all(j != i for i, j in enumerate(mapping))


def oracle_cap() -> int:
    """Exhaustive-enumeration cap, from ``WICHTEL_ORACLE_CAP`` if set."""
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_ORACLE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{CAP_ENV_VAR} must be an integer, got {raw!r}") from None
    if cap > MAX_ORACLE_CAP:
        raise OracleCapExceeded(f"{CAP_ENV_VAR}={cap} exceeds the hard limit {MAX_ORACLE_CAP}")
    return cap


def _check_cap(n: int, cap: int | None) -> None:
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    limit = oracle_cap() if cap is None else cap
    if limit > MAX_ORACLE_CAP:
        raise OracleCapExceeded(f"cap {limit} exceeds the hard limit {MAX_ORACLE_CAP}")
    if n > limit:
        raise OracleCapExceeded(f"n={n} is above the oracle cap {limit}")


def enumerate_permutations(n: int, cap: int | None = None) -> Iterator[Permutation]:
    """Yield all ``n!`` permutations in lexicographic order of the mapping."""
    _check_cap(n, cap)
    for mapping in itertools.permutations(range(n)):
        yield Permutation(mapping)


@dataclass(frozen=True)
class OracleCensus:
    n: int
    total: int
    derangements: int
    no_short_cycles: int
    pair_histogram: dict[int, int]
    type_counts: dict[CycleType, int]

    def __post_init__(self) -> None:
        assert sum(self.pair_histogram.values()) == self.derangements
        assert sum(self.type_counts.values()) == self.total
        assert self.pair_histogram.get(0, 0) == self.no_short_cycles


def _all_permutations_array(n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.permutations(range(n))),
        dtype=np.int8,
        count=math.factorial(n) * n,
    )
    return flat.reshape(-1, n)


def _orbit_lengths(perms: np.ndarray) -> np.ndarray:
    """Length of the cycle through each element, row by row."""
    rows, n = perms.shape
    offsets = (np.arange(rows, dtype=np.int32) * n)[:, None]
    step_map = (perms.astype(np.int32) + offsets).ravel()
    start = np.arange(rows * n, dtype=np.int32)
    lengths = np.zeros(rows * n, dtype=np.int8)
    current = step_map.copy()
    for step in range(1, n + 1):
        lengths[(current == start) & (lengths == 0)] = step
        current = step_map[current]
    return lengths.reshape(rows, n)


def oracle_census(n: int, cap: int | None = None) -> OracleCensus:
    """Classify every permutation of ``n`` elements by cycle type.

    Orbit lengths are computed for all ``n!`` rows at once, which is an
    independent route from the cycle walk in :func:`cycle_type`.
    """
    _check_cap(n, cap)
    if n == 0:
        empty = CycleType((), 0)
        return OracleCensus(0, 1, 1, 1, {0: 1}, {empty: 1})
    perms = _all_permutations_array(n)
    lengths = _orbit_lengths(perms)
    # Row key packs "number of elements on i-cycles" as digit i-1 in base n+1;
    # those counts are <= n so the packing is injective.
    base = n + 1
    weights = np.array([0] + [base ** (i - 1) for i in range(1, n + 1)], dtype=np.int64)
    keys = weights[lengths].sum(axis=1)
    uniq, freq = np.unique(keys, return_counts=True)

    type_counts: dict[CycleType, int] = {}
    for key, f in zip(uniq.tolist(), freq.tolist()):
        counts = []
        for i in range(1, n + 1):
            key, on_i_cycles = divmod(key, base)
            counts.append(on_i_cycles // i)
        type_counts[CycleType(tuple(counts), n)] = f

    histogram: Counter[int] = Counter()
    for ct, count in type_counts.items():
        if ct.fixed_points == 0:
            histogram[ct.two_cycles] += count
    derangements = sum(histogram.values())
    no_short = sum(c for ct, c in type_counts.items() if ct.fixed_points == 0 and ct.two_cycles == 0)
    return OracleCensus(
        n=n,
        total=len(perms),
        derangements=derangements,
        no_short_cycles=no_short,
        pair_histogram=dict(sorted(histogram.items())),
        type_counts=type_counts,
    )
