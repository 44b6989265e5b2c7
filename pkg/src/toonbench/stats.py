"""Mean/std aggregation and the Wilcoxon signed-rank test for paired samples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

from ._accel import signed_rank_counts

EXACT_MAX_N = 25


class EmptyInput(ValueError):
    pass


class AllZeroDifferences(ValueError):
    """Every paired difference is zero; the test has nothing to rank."""


class WilcoxonMethod(str, Enum):
    EXACT = "exact"
    NORMAL_APPROX = "normal_approx"


@dataclass(frozen=True)
class PairedSample:
    instance_id: str
    value_a: float
    value_b: float

    def __post_init__(self):
        if not (math.isfinite(self.value_a) and math.isfinite(self.value_b)):
            raise ValueError(f"non-finite value in pair {self.instance_id!r}")


@dataclass(frozen=True)
class WilcoxonResult:
    n_effective: int
    w_statistic: float
    w_plus: float
    w_minus: float
    p_value: float
    method: WilcoxonMethod
    n_zero: int
    alpha_level: float = 0.05

    @property
    def significant(self) -> bool:
        return self.p_value < self.alpha_level


def mean_std(xs: Sequence[float]) -> Tuple[float, float]:
    """Arithmetic mean and sample standard deviation (n-1); std is 0 for one value."""
    n = len(xs)
    if n == 0:
        raise EmptyInput("mean_std of an empty sample")
    mean = math.fsum(xs) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, math.sqrt(var)


def average_ranks(values: Sequence[float]) -> List[float]:
    """1-based ranks with ties given their mean rank."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def _exact_p(doubled: List[int], w_plus_doubled: int) -> float:
    counts = signed_rank_counts(doubled)
    total = sum(doubled)
    # Null distribution is symmetric about total/2: fold to the lower tail.
    low = min(w_plus_doubled, total - w_plus_doubled)
    tail = sum(counts[: low + 1])
    return min(1.0, 2.0 * tail / 2 ** len(doubled))


def _normal_p(ranks: List[float], w: float) -> float:
    n = len(ranks)
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    tie_sizes = {}
    for r in ranks:
        tie_sizes[r] = tie_sizes.get(r, 0) + 1
    var -= sum(t**3 - t for t in tie_sizes.values()) / 48.0
    if var <= 0:
        return 1.0
    z = (w - mean + 0.5) / math.sqrt(var)
    z = min(z, 0.0)
    return min(1.0, math.erfc(-z / math.sqrt(2.0)))


def wilcoxon_signed_rank(
    pairs: Sequence[PairedSample], alpha_level: float = 0.05, method: str = "auto"
) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on ``value_a - value_b``.

    Zero differences are dropped. With ``method="auto"`` the exact null
    distribution is used up to 25 non-zero pairs (ties included, via doubled
    mid-ranks), the tie- and continuity-corrected normal approximation above.
    """
    if not pairs:
        raise EmptyInput("no pairs")
    diffs = [p.value_a - p.value_b for p in pairs]
    nonzero = [d for d in diffs if d != 0]
    n_zero = len(diffs) - len(nonzero)
    if not nonzero:
        raise AllZeroDifferences(f"all {len(diffs)} differences are zero")
    abs_d = [abs(d) for d in nonzero]
    ranks = average_ranks(abs_d)
    w_plus = float(sum(r for r, d in zip(ranks, nonzero) if d > 0))
    w_minus = float(sum(r for r, d in zip(ranks, nonzero) if d < 0))
    w = min(w_plus, w_minus)
    n = len(nonzero)

    if method == "auto":
        chosen = WilcoxonMethod.EXACT if n <= EXACT_MAX_N else WilcoxonMethod.NORMAL_APPROX
    else:
        chosen = WilcoxonMethod(method)
    if chosen is WilcoxonMethod.EXACT:
        doubled = [int(round(2 * r)) for r in ranks]
        w_plus_doubled = sum(dr for dr, d in zip(doubled, nonzero) if d > 0)
        p = _exact_p(doubled, w_plus_doubled)
    else:
        p = _normal_p(ranks, w)
    return WilcoxonResult(
        n_effective=n,
        w_statistic=w,
        w_plus=w_plus,
        w_minus=w_minus,
        p_value=p,
        method=chosen,
        n_zero=n_zero,
        alpha_level=alpha_level,
    )
