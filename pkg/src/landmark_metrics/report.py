"""
Cohort aggregation, NA accounting and variant ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .core import InputError

DETECTION_METRICS = ("tpr", "ppv", "tpr_ant", "tpr_inf", "ppv_ant", "ppv_inf")
LOCALISATION_METRICS = ("d_ant", "d_inf", "delta_alpha")
METRICS = DETECTION_METRICS + LOCALISATION_METRICS

HIGHER_BETTER = "higher_better"
LOWER_BETTER = "lower_better"


def metric_direction(metric: str) -> str:
    if metric in DETECTION_METRICS:
        return HIGHER_BETTER
    if metric in LOCALISATION_METRICS:
        return LOWER_BETTER
    raise InputError(f"unknown metric {metric!r}")


@dataclass(frozen=True)
class MetricRecord:
    case_id: str
    variant: str
    strategy: str
    method: str  # "" for detection metrics
    metric: str
    value: Optional[float]

    def __post_init__(self):
        if self.metric not in METRICS:
            raise InputError(f"unknown metric {self.metric!r}")

    @property
    def key(self) -> tuple:
        return (self.variant, self.strategy, self.method, self.metric)


@dataclass(frozen=True)
class Aggregate:
    mean: Optional[float]
    std: Optional[float]
    na_count: int
    n: int

    def format(self, digits: int = 2) -> str:
        """``mean±std`` as in a results table; empty when all values are NA."""
        if self.mean is None:
            return ""
        return f"{self.mean:.{digits}f}±{self.std:.{digits}f}"


def summarize(values) -> Aggregate:
    """Mean and sample standard deviation over the non-NA values."""
    present = [v for v in values if v is not None]
    n = len(values)
    if not present:
        return Aggregate(None, None, n, n)
    # sort first so the result does not depend on record order
    present.sort()
    m = math.fsum(present) / len(present)
    if len(present) == 1:
        sd = 0.0
    else:
        sd = math.sqrt(math.fsum((v - m) ** 2 for v in present) / (len(present) - 1))
    return Aggregate(m, sd, n - len(present), n)


@dataclass
class CohortReport:
    records: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)

    @property
    def variants(self) -> list:
        return sorted({k[0] for k in self.aggregates})

    def keys(self) -> list:
        """Distinct (strategy, method, metric) combinations, in sorted order."""
        return sorted({k[1:] for k in self.aggregates})

    def get(self, variant, strategy, method, metric) -> Aggregate:
        try:
            return self.aggregates[(variant, strategy, method, metric)]
        except KeyError:
            raise InputError(
                f"no aggregate for variant={variant!r} strategy={strategy!r} "
                f"method={method!r} metric={metric!r}"
            ) from None


def aggregate(records) -> CohortReport:
    groups: dict = {}
    for r in records:
        groups.setdefault(r.key, []).append(r.value)
    aggs = {k: summarize(v) for k, v in sorted(groups.items())}
    return CohortReport(list(records), aggs)


def rank_variants(
    report: CohortReport,
    metric: str,
    strategy: str,
    method: str = "",
    direction: Optional[str] = None,
) -> list:
    """Variants ordered best first for one (strategy, method, metric) cell.

    Variants without a mean go last. Ties on the mean are broken by fewer
    NA cases, then by name.
    """
    if metric not in METRICS:
        raise InputError(f"unknown metric {metric!r}")
    direction = direction or metric_direction(metric)
    if direction not in (HIGHER_BETTER, LOWER_BETTER):
        raise InputError(f"unknown direction {direction!r}")
    sign = -1.0 if direction == HIGHER_BETTER else 1.0

    def sort_key(v):
        a = report.get(v, strategy, method, metric)
        if a.mean is None:
            return (1, 0.0, a.na_count, v)
        return (0, sign * a.mean, a.na_count, v)

    return sorted(report.variants, key=sort_key)


class Divergence(NamedTuple):
    diverges: bool
    winner_a: str
    winner_b: str


def ranking_divergence(ranking_a, ranking_b) -> Divergence:
    """Whether two rankings of the same variants disagree on the winner."""
    if set(ranking_a) != set(ranking_b) or len(ranking_a) != len(ranking_b):
        raise InputError(f"rankings cover different variants: {ranking_a} vs {ranking_b}")
    if not ranking_a:
        raise InputError("empty rankings")
    return Divergence(ranking_a[0] != ranking_b[0], ranking_a[0], ranking_b[0])
