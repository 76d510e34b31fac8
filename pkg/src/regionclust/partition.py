"""Cluster assignments shared by both clustering methods."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import comb
from typing import Any, Sequence

from .errors import DataError


def canonical_labels(labels: Sequence[int]) -> tuple[int, ...]:
    """Renumber clusters 0, 1, ... in order of first appearance."""
    mapping: dict[int, int] = {}
    out = []
    for lab in labels:
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out.append(mapping[lab])
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    labels: tuple[int, ...]
    k: int
    method: str = ""
    params: tuple[tuple[str, Any], ...] = field(default=())
    seed: int | None = None

    def __post_init__(self):
        labels = tuple(int(v) for v in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise DataError("partition is empty")
        if labels != canonical_labels(labels):
            raise DataError("partition labels are not canonical")
        if max(labels) + 1 != self.k:
            raise DataError(f"partition has {max(labels) + 1} clusters but k={self.k}")

    @classmethod
    def from_labels(cls, labels: Sequence[int], method: str = "", params=None, seed=None) -> "Partition":
        canon = canonical_labels([int(v) for v in labels])
        items = tuple(sorted((params or {}).items()))
        return cls(canon, max(canon) + 1 if canon else 0, method, items, seed)

    @property
    def n(self) -> int:
        return len(self.labels)

    def sizes(self) -> list[int]:
        counts = Counter(self.labels)
        return [counts[c] for c in range(self.k)]

    def members(self, cluster: int) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab == cluster]


def adjusted_rand_index(a: Sequence[int], b: Sequence[int]) -> float:
    """Hubert-Arabie adjusted Rand index between two labelings."""
    if len(a) != len(b):
        raise DataError("labelings differ in length")
    n = len(a)
    pairs = Counter(zip(a, b))
    sum_ij = sum(comb(c, 2) for c in pairs.values())
    sum_a = sum(comb(c, 2) for c in Counter(a).values())
    sum_b = sum(comb(c, 2) for c in Counter(b).values())
    total = comb(n, 2)
    if total == 0:
        return 1.0
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        # Both labelings trivial (all-one or all-singleton) and so identical in pair structure.
        return 1.0
    return (sum_ij - expected) / (max_index - expected)
