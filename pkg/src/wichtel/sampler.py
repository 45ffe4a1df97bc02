"""Monte Carlo check of the pair-count law by rejection sampling.

A uniform permutation is drawn with numpy's Fisher-Yates shuffle and
thrown away if it has a fixed point; what survives is uniform over the
derangements. Randomness comes from ``numpy.random.Generator`` over the
PCG64 bit generator seeded with the user's 64-bit seed, so a given
``(n, trials, seed)`` reproduces the same histogram on any platform.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .distribution import PairCountDistribution
from .permutations import Permutation

__all__ = [
    "SampleReport",
    "compare_empirical",
    "make_rng",
    "monte_carlo_histogram",
    "sample_derangement",
]

# rows per vectorised batch; part of the stream definition, changing it changes goldens
BATCH_ROWS = 1 << 16


def make_rng(seed: int) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"derangements need n >= 2, got {n}")


def sample_derangement(n: int, rng: np.random.Generator) -> Permutation:
    _check_n(n)
    identity = np.arange(n)
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == identity):
            return Permutation(tuple(perm.tolist()))


@dataclass
class SampleReport:
    n: int
    trials: int
    seed: int
    histogram: dict[int, int]
    rejected: int
    elapsed: float = field(default=0.0, compare=False)

    def __post_init__(self) -> None:
        assert sum(self.histogram.values()) == self.trials
        assert all(k <= self.n // 2 for k in self.histogram)

    @property
    def proposals(self) -> int:
        return self.trials + self.rejected

    @property
    def accept_rate(self) -> float:
        return self.trials / self.proposals

    def fractions(self) -> dict[int, float]:
        return {k: c / self.trials for k, c in sorted(self.histogram.items())}


def monte_carlo_histogram(n: int, trials: int, seed: int) -> SampleReport:
    """Tally mutual pairs over ``trials`` sampled derangements.

    Proposals are generated in batches of :data:`BATCH_ROWS` shuffles and
    consumed in order; ``rejected`` counts the proposals with a fixed point
    that came before the last accepted one.
    """
    _check_n(n)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = make_rng(seed)
    start = time.perf_counter()
    rows = np.arange(n)
    base = np.broadcast_to(rows, (BATCH_ROWS, n))
    histogram: Counter[int] = Counter()
    accepted = 0
    rejected = 0
    while accepted < trials:
        perms = rng.permuted(base, axis=1)
        ok = ~np.any(perms == rows, axis=1)
        accepted_idx = np.flatnonzero(ok)
        need = trials - accepted
        if len(accepted_idx) >= need:
            last = accepted_idx[need - 1]
            rejected += int(last + 1 - need)
            accepted_idx = accepted_idx[:need]
        else:
            rejected += BATCH_ROWS - len(accepted_idx)
        chosen = perms[accepted_idx]
        # i is on a 2-cycle iff sigma(sigma(i)) == i; no fixed points remain
        on_pair = np.take_along_axis(chosen, chosen, axis=1) == rows
        pairs = on_pair.sum(axis=1) // 2
        ks, counts = np.unique(pairs, return_counts=True)
        histogram.update(dict(zip(ks.tolist(), counts.tolist())))
        accepted += len(accepted_idx)
    return SampleReport(
        n=n,
        trials=trials,
        seed=seed,
        histogram=dict(sorted(histogram.items())),
        rejected=rejected,
        elapsed=time.perf_counter() - start,
    )


def compare_empirical(report: SampleReport, dist: PairCountDistribution) -> float:
    """Largest absolute gap between sampled frequencies and the exact pmf."""
    if report.n != dist.n:
        raise ValueError(f"report is for n={report.n}, distribution for n={dist.n}")
    keys = set(range(len(dist.pmf))) | set(report.histogram)
    return max(abs(report.histogram.get(k, 0) / report.trials - float(dist[k])) for k in keys)
