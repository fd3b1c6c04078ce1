"""Exhaustive statistics over every equal-weighted k-subset of a fixed universe.

Small instances double as a brute-force oracle for the Monte Carlo engine:
the mean over all C(N, k) subset returns equals the index mean return
exactly, because each stock appears in exactly C(N-1, k-1) subsets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

DEFAULT_ENUMERATION_CAP = 10_000_000


class EnumerationCapError(RuntimeError):
    """Raised when the requested subset count exceeds the enumeration cap."""


@dataclass(frozen=True)
class DeterministicIndex:
    """A fixed list of gross terminal values, one per stock."""

    gross_values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.gross_values)
        object.__setattr__(self, "gross_values", values)
        if not values:
            raise ValueError("gross_values must be non-empty")
        if any(not math.isfinite(v) or v <= 0 for v in values):
            raise ValueError("gross values must be positive and finite")

    def __len__(self) -> int:
        return len(self.gross_values)

    def mean_return(self) -> float:
        return math.fsum(self.gross_values) / len(self.gross_values) - 1.0


@dataclass(frozen=True)
class SubsetStats:
    """Exact statistics of the enumerated equal-weighted portfolios.

    returns_histogram maps each distinct net return to its multiplicity;
    benchmark_comparisons maps each benchmark net return to counts of
    portfolios strictly below / exactly equal / strictly above it.
    """

    portfolio_count: int
    mean_return: float
    median_return: float
    returns_histogram: tuple[tuple[float, int], ...]
    benchmark_comparisons: Mapping[float, tuple[int, int, int]]


def _validate_sizes(n: int, k_set: Iterable[int]) -> tuple[int, ...]:
    sizes = tuple(sorted(set(int(k) for k in k_set)))
    if not sizes:
        raise ValueError("k_set must contain at least one subset size")
    if sizes[0] < 1 or sizes[-1] > n:
        raise ValueError(f"subset sizes must lie in [1, {n}], got {sizes}")
    return sizes


def enumerate_portfolios(
    index: DeterministicIndex,
    k_set: Iterable[int],
    benchmarks: Iterable[float] = (),
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> SubsetStats:
    """Enumerate every subset of every size in k_set, exactly once each.

    Subsets are visited in lexicographic position order per size.  Each
    subset's return is accumulated with math.fsum, so all reported
    statistics are invariant under permutations of the input values.
    """
    n = len(index)
    sizes = _validate_sizes(n, k_set)
    total = sum(math.comb(n, k) for k in sizes)
    if total > cap:
        raise EnumerationCapError(
            f"enumeration would visit {total} subsets, above the cap of {cap}"
        )

    returns = np.empty(total, dtype=float)
    pos = 0
    for k in sizes:
        for combo in itertools.combinations(index.gross_values, k):
            returns[pos] = math.fsum(combo) / k - 1.0
            pos += 1

    mean = math.fsum(returns) / total
    ordered = np.sort(returns, kind="stable")
    mid = total // 2
    if total % 2:
        median = float(ordered[mid])
    else:
        median = float((ordered[mid - 1] + ordered[mid]) / 2.0)

    values, counts = np.unique(returns, return_counts=True)
    histogram = tuple((float(v), int(c)) for v, c in zip(values, counts))

    comparisons = {}
    for benchmark in benchmarks:
        b = float(benchmark)
        below = int(np.count_nonzero(returns < b))
        equal = int(np.count_nonzero(returns == b))
        comparisons[b] = (below, equal, total - below - equal)

    return SubsetStats(
        portfolio_count=total,
        mean_return=mean,
        median_return=median,
        returns_histogram=histogram,
        benchmark_comparisons=comparisons,
    )


def underperformance_fraction(
    index: DeterministicIndex,
    k_set: Iterable[int],
    benchmark: float,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Fraction of enumerated portfolios returning strictly less than benchmark."""
    stats = enumerate_portfolios(index, k_set, benchmarks=(benchmark,), cap=cap)
    below, _, _ = stats.benchmark_comparisons[float(benchmark)]
    return below / stats.portfolio_count
