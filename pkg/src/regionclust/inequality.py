"""Income concentration measures.

``gini_microdata`` uses the mean-absolute-difference definition
``sum_ij |x_i - x_j| / (2 n^2 mean)``, evaluated through the sorted-rank
identity.  ``funds_ratio`` is the top-decile to bottom-decile mean income
ratio, a different statistic that is often quoted alongside the Gini.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import DataError, InsufficientDataError, ParameterError

SHARE_TOL = 1e-9


@dataclass(frozen=True)
class IncomeSample:
    incomes: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.incomes)
        if not vals:
            raise DataError("income sample is empty")
        for v in vals:
            if not math.isfinite(v) or v <= 0:
                raise DataError(f"incomes must be positive and finite, got {v!r}")
        object.__setattr__(self, "incomes", vals)

    def __len__(self):
        return len(self.incomes)


@dataclass(frozen=True)
class GroupedShares:
    """Population and income shares per group, groups ordered poorest first."""

    population_shares: tuple[float, ...]
    income_shares: tuple[float, ...]

    def __post_init__(self):
        pop = tuple(float(v) for v in self.population_shares)
        inc = tuple(float(v) for v in self.income_shares)
        object.__setattr__(self, "population_shares", pop)
        object.__setattr__(self, "income_shares", inc)
        if not pop or len(pop) != len(inc):
            raise DataError("share vectors must be non-empty and of equal length")
        for name, vec in (("population", pop), ("income", inc)):
            if any(not math.isfinite(v) or v < 0 for v in vec):
                raise DataError(f"{name} shares must be finite and nonnegative")
            if abs(math.fsum(vec) - 1.0) > SHARE_TOL:
                raise DataError(f"{name} shares sum to {math.fsum(vec)!r}, not 1")
        cum_p = cum_l = 0.0
        for i, (p, s) in enumerate(zip(pop, inc)):
            cum_p += p
            cum_l += s
            if cum_l > cum_p + SHARE_TOL:
                raise DataError(f"Lorenz curve above the diagonal at group {i + 1}; groups must be ordered by mean income")


def _as_sample(s) -> IncomeSample:
    return s if isinstance(s, IncomeSample) else IncomeSample(tuple(s))


def gini_microdata(s: IncomeSample | Iterable[float]) -> float:
    s = _as_sample(s)
    x = sorted(s.incomes)
    n = len(x)
    total = math.fsum(x)
    # sum_ij |x_i - x_j| = 2 * sum_i (2i - n - 1) x_(i), ranks i = 1..n
    weighted = math.fsum((2 * i - n - 1) * v for i, v in enumerate(x, start=1))
    return max(0.0, weighted / (n * total))


def gini_grouped(g: GroupedShares) -> float:
    """Trapezoidal Lorenz-curve Gini: ``1 - sum (P_k - P_k-1)(L_k + L_k-1)``."""
    area = []
    cum_l_prev = 0.0
    cum_l = 0.0
    for p, s in zip(g.population_shares, g.income_shares):
        cum_l += s
        area.append(p * (cum_l + cum_l_prev))
        cum_l_prev = cum_l
    return max(0.0, 1.0 - math.fsum(area))


def decile_shares(s: IncomeSample | Iterable[float], groups: int = 10) -> GroupedShares:
    """Equal-size population groups of a sample; n must be divisible by ``groups``."""
    s = _as_sample(s)
    n = len(s)
    if groups < 1 or n % groups:
        raise ParameterError(f"sample of {n} cannot be split into {groups} equal groups")
    x = sorted(s.incomes)
    size = n // groups
    total = math.fsum(x)
    inc = [math.fsum(x[g * size:(g + 1) * size]) / total for g in range(groups)]
    # Renormalize so the shares sum to one within rounding.
    scale = math.fsum(inc)
    inc = [v / scale for v in inc]
    return GroupedShares(tuple([1.0 / groups] * groups), tuple(inc))


def funds_ratio(s: IncomeSample | Iterable[float]) -> float:
    """Mean of the richest tenth over mean of the poorest tenth (floor(n/10) each)."""
    s = _as_sample(s)
    n = len(s)
    if n < 10:
        raise InsufficientDataError(f"funds ratio needs at least 10 incomes, got {n}")
    x = sorted(s.incomes)
    m = n // 10
    return (math.fsum(x[-m:]) / m) / (math.fsum(x[:m]) / m)


def poverty_headcount(s: IncomeSample | Iterable[float], living_wage: float) -> float:
    """Percent of incomes strictly below ``living_wage``."""
    if not living_wage > 0:
        raise ParameterError("living_wage must be positive")
    s = _as_sample(s)
    below = sum(1 for v in s.incomes if v < living_wage)
    return 100.0 * below / len(s)
