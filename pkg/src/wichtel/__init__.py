"""Exact counting of Secret Santa draws with mutual gift pairs.

A draw is a derangement of the participants; a mutual pair is a 2-cycle.
The package counts derangements by their number of 2-cycles, gives the
exact law of that number, and checks everything against brute force and
Monte Carlo sampling.
"""

from .counting import (
    count_of_type,
    derangement_count_recurrence,
    derangement_count_rounding,
    derangement_count_sum,
    enumerate_pair_types,
    exact_pair_k_count,
    factorial,
    g_ge3,
    pair_count_recurrence,
    pair_count_subtraction,
    pair_count_typesum,
    pair_type_count,
    partitions_at_most,
)
from .distribution import (
    ConvergenceRow,
    PairCountDistribution,
    asymptotic_at_least,
    convergence_table,
    mean_pair_count,
    pair_distribution,
    poisson_half_pmf,
    prob_at_least,
    total_variation_to_poisson,
)
from .permutations import (
    CycleType,
    OracleCapExceeded,
    OracleCensus,
    Permutation,
    count_two_cycles,
    cycle_type,
    enumerate_permutations,
    is_derangement,
    oracle_census,
)
from .sampler import SampleReport, compare_empirical, monte_carlo_histogram, sample_derangement

__version__ = "0.1.0"
