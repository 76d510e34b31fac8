"""Euclidean dissimilarities in condensed upper-triangular storage."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import FeatureMatrix
from .errors import DataError, DimensionError, InsufficientDataError


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Pairwise dissimilarities for ``n`` items.

    ``values`` holds the ``n(n-1)/2`` entries ``d(i, j)`` for ``i < j`` in
    row-major order, i.e. (0,1), (0,2), ..., (0,n-1), (1,2), ...
    """

    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if self.n < 1:
            raise DataError("distance matrix needs at least one item")
        if vals.size != self.n * (self.n - 1) // 2:
            raise DataError(f"expected {self.n * (self.n - 1) // 2} condensed entries, got {vals.size}")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise DataError("distances must be finite and nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def index(self, i: int, j: int) -> int:
        if i == j:
            raise IndexError("diagonal entries are not stored")
        if i > j:
            i, j = j, i
        return self.n * i - i * (i + 1) // 2 + (j - i - 1)

    def __getitem__(self, ij: tuple[int, int]) -> float:
        i, j = ij
        if i == j:
            return 0.0
        return float(self.values[self.index(i, j)])

    def square(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n, 1)
        out[iu] = self.values
        out[(iu[1], iu[0])] = self.values
        return out

    @classmethod
    def from_square(cls, sq) -> "DistanceMatrix":
        sq = np.asarray(sq, dtype=float)
        n = sq.shape[0]
        return cls(n, sq[np.triu_indices(n, 1)])


def euclidean(a: Sequence[float], b: Sequence[float]) -> float:
    if len(a) != len(b):
        raise DimensionError(f"vectors have different lengths ({len(a)} vs {len(b)})")
    total = 0.0
    for x, y in zip(a, b):
        diff = float(x) - float(y)
        total += diff * diff
    return math.sqrt(total)


def _row_block(x: np.ndarray, i: int) -> np.ndarray:
    diff = x[i] - x[i + 1:]
    # Explicit left-to-right accumulation over coordinates, same order as euclidean().
    acc = np.zeros(diff.shape[0])
    for c in range(diff.shape[1]):
        acc += diff[:, c] * diff[:, c]
    return np.sqrt(acc)


def distance_matrix(m: FeatureMatrix, workers: int = 1) -> DistanceMatrix:
    """All pairwise Euclidean distances between rows of ``m``.

    Rows may be split across ``workers`` threads; each entry is computed
    identically either way, so the result does not depend on ``workers``.
    """
    if m.n < 2:
        raise InsufficientDataError(f"distance matrix needs at least 2 rows, got {m.n}")
    x = m.values
    rows = range(m.n - 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda i: _row_block(x, i), rows))
    else:
        blocks = [_row_block(x, i) for i in rows]
    return DistanceMatrix(m.n, np.concatenate(blocks))
