"""Column standardization.

Income is in the tens of thousands of rubles, poverty in percent and Gini
below one, so raw Euclidean distances would be driven by income alone.
Features are z-scored with the population (divisor n) standard deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FeatureMatrix
from .errors import DegenerateError, InsufficientDataError


@dataclass(frozen=True, eq=False)
class ColumnStats:
    mean: np.ndarray
    std: np.ndarray
    column_names: tuple[str, ...]


def column_stats(m: FeatureMatrix) -> ColumnStats:
    if m.n < 2:
        raise InsufficientDataError(f"column statistics need at least 2 rows, got {m.n}")
    x = m.values
    mean = x.mean(axis=0)
    std = np.sqrt(((x - mean) ** 2).mean(axis=0))
    return ColumnStats(mean, std, m.column_names)


def zscore(m: FeatureMatrix, stats: ColumnStats | None = None) -> FeatureMatrix:
    """Return ``(x - mean) / std`` column-wise; stats default to those of ``m``."""
    if stats is None:
        stats = column_stats(m)
    for name, s in zip(stats.column_names, stats.std):
        if not s > 0:
            raise DegenerateError(f"degenerate column: {name}")
    return FeatureMatrix((m.values - stats.mean) / stats.std, m.column_names, "zscore")
