from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import stats


@dataclass(frozen=True)
class AnovaResult:
    f_statistic: float
    p_value: float
    df_between: int
    df_within: int
    degenerate: bool = False

    def __iter__(self):
        return iter((self.f_statistic, self.p_value))


def anova_significance(*groups) -> AnovaResult:
    """Standard one-way ANOVA across two or more groups of scores.

    Returns the raw F statistic and p-value. Zero within-group variance
    makes F undefined or infinite; that case is flagged ``degenerate``
    instead of being reported as an ordinary test result.
    """
    groups = [[float(x) for x in g] for g in groups]
    if len(groups) < 2 or any(len(g) < 2 for g in groups):
        raise ValueError("need at least two groups of at least two values")
    n = sum(len(g) for g in groups)
    k = len(groups)
    grand = math.fsum(x for g in groups for x in g) / n
    means = [math.fsum(g) / len(g) for g in groups]
    ssb = math.fsum(len(g) * (m - grand) ** 2 for g, m in zip(groups, means))
    ssw = math.fsum((x - m) ** 2 for g, m in zip(groups, means) for x in g)
    dfb, dfw = k - 1, n - k
    scale = max(1.0, max(abs(x) for g in groups for x in g)) ** 2
    if ssw <= 1e-24 * scale * n:
        if ssb <= 1e-24 * scale * n:
            return AnovaResult(math.nan, math.nan, dfb, dfw, True)
        return AnovaResult(math.inf, 0.0, dfb, dfw, True)
    f = (ssb / dfb) / (ssw / dfw)
    return AnovaResult(f, float(stats.f.sf(f, dfb, dfw)), dfb, dfw, False)
