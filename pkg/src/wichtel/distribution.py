"""Law of the number of mutual pairs in a uniformly random derangement.

Finite-n probabilities are exact :class:`~fractions.Fraction` values.
Floats only show up for the Poisson(1/2) limit and at the reporting
boundary, where ``float(Fraction)`` gives the correctly rounded double.
"""

from __future__ import annotations

import decimal
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from .counting import derangement_count_sum, exact_pair_k_count

__all__ = [
    "POISSON_RATE",
    "ConvergenceRow",
    "PairCountDistribution",
    "asymptotic_at_least",
    "convergence_table",
    "mean_pair_count",
    "pair_distribution",
    "poisson_half_moment",
    "poisson_half_pmf",
    "prob_at_least",
    "total_variation_to_poisson",
]

POISSON_RATE = Fraction(1, 2)
TAIL_CUTOFF = 1e-12

# 50 significant digits before the final rounding to a double
_CTX = decimal.Context(prec=50)


@dataclass(frozen=True)
class PairCountDistribution:
    n: int
    pmf: tuple[Fraction, ...]
    mean: Fraction
    second_moment: Fraction

    def __post_init__(self) -> None:
        assert sum(self.pmf) == 1, "pmf does not sum to one"
        assert all(p >= 0 for p in self.pmf)
        assert self.mean == self.moment(1)
        assert self.second_moment == self.moment(2)

    @property
    def max_pairs(self) -> int:
        return len(self.pmf) - 1

    def moment(self, r: int) -> Fraction:
        """E[X^r], exactly."""
        return sum((k**r * p for k, p in enumerate(self.pmf)), Fraction(0))

    def at_least(self, k: int) -> Fraction:
        if k <= 0:
            return Fraction(1)
        return 1 - sum(self.pmf[:k], Fraction(0))

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.pmf):
            return self.pmf[k]
        return Fraction(0)


_cache: dict[int, PairCountDistribution] = {}
_cache_lock = threading.Lock()


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"pair-count law is defined here for n >= 2, got {n}")


def pair_distribution(n: int) -> PairCountDistribution:
    _check_n(n)
    with _cache_lock:
        cached = _cache.get(n)
    if cached is not None:
        return cached
    total = derangement_count_sum(n)
    pmf = tuple(Fraction(exact_pair_k_count(n, k), total) for k in range(n // 2 + 1))
    mean = sum((k * p for k, p in enumerate(pmf)), Fraction(0))
    second = sum((k * k * p for k, p in enumerate(pmf)), Fraction(0))
    dist = PairCountDistribution(n, pmf, mean, second)
    with _cache_lock:
        _cache.setdefault(n, dist)
    return dist


def prob_at_least(n: int, k: int) -> Fraction:
    """P(X_n >= k) for the number of mutual pairs X_n."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return pair_distribution(n).at_least(k)


def mean_pair_count(n: int) -> Fraction:
    return pair_distribution(n).mean


def _poisson_pmf_decimal(k: int) -> decimal.Decimal:
    e_half = _CTX.exp(decimal.Decimal("-0.5"))
    return _CTX.divide(e_half, decimal.Decimal(2**k) * math.factorial(k))


def poisson_half_pmf(k: int) -> float:
    """(1/2)^k e^{-1/2} / k!, rounded once to a double."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return float(_poisson_pmf_decimal(k))


def asymptotic_at_least(k: int) -> float:
    """Limit of P(X_n >= k): 1 - sum_{j<k} Poisson(1/2) pmf."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    head = sum((_poisson_pmf_decimal(j) for j in range(k)), decimal.Decimal(0))
    return float(_CTX.subtract(decimal.Decimal(1), head))


def poisson_half_moment(r: int) -> Fraction:
    """E[X^r] for X ~ Poisson(1/2), via m_{r+1} = lam * sum_i C(r, i) m_i."""
    moments = [Fraction(1)]
    for s in range(r):
        moments.append(POISSON_RATE * sum(math.comb(s, i) * moments[i] for i in range(s + 1)))
    return moments[r]


def total_variation_to_poisson(n: int) -> float:
    """Half the L1 distance between the law of X_n and Poisson(1/2)."""
    dist = pair_distribution(n)
    l1 = 0.0
    covered = 0.0
    k = 0
    while k <= dist.max_pairs or 1.0 - covered >= TAIL_CUTOFF:
        q = poisson_half_pmf(k)
        l1 += abs(float(dist[k]) - q)
        covered += q
        k += 1
    # the Poisson mass left beyond the cutoff sits where X_n has none
    l1 += max(0.0, 1.0 - covered)
    return 0.5 * l1


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    prob_at_least_1: float
    prob_at_least_3: float
    tv_to_poisson: float
    mean: float


def convergence_table(n_min: int = 2, n_max: int = 60) -> list[ConvergenceRow]:
    if n_min < 2 or n_max < n_min:
        raise ValueError(f"need 2 <= n_min <= n_max, got {n_min}..{n_max}")
    rows = []
    for n in range(n_min, n_max + 1):
        dist = pair_distribution(n)
        rows.append(
            ConvergenceRow(
                n=n,
                prob_at_least_1=float(dist.at_least(1)),
                prob_at_least_3=float(dist.at_least(3)),
                tv_to_poisson=total_variation_to_poisson(n),
                mean=float(dist.mean),
            )
        )
    return rows
