"""Agglomerative clustering, tree cutting and cophenetic validation.

Node numbering follows the usual convention: leaves are ``0..n-1`` and the
``i``-th merge creates node ``n + i``.  When several cluster pairs share the
minimal dissimilarity the pair with the lexicographically smallest
``(min node id, max node id)`` is merged.

Average linkage keeps the exact rational sum of member distances for every
cluster pair, so each height is the correctly rounded mean of the original
pairwise distances rather than the result of a chain of rounded updates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distance import DistanceMatrix
from .errors import DataError, DegenerateError, InsufficientDataError, ParameterError
from .partition import Partition

LINKAGES = ("single", "complete", "average")


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    n: int
    merges: tuple[Merge, ...]
    linkage: str = "single"

    def __post_init__(self):
        merges = tuple(m if isinstance(m, Merge) else Merge(int(m[0]), int(m[1]), float(m[2]), int(m[3]))
                       for m in self.merges)
        object.__setattr__(self, "merges", merges)
        n = self.n
        if n < 1:
            raise DataError("dendrogram needs at least one leaf")
        if len(merges) != n - 1:
            raise DataError(f"dendrogram over {n} leaves needs {n - 1} merges, got {len(merges)}")
        sizes = [1] * n
        used = set()
        prev = -math.inf
        for i, m in enumerate(merges):
            node = n + i
            for child in (m.left, m.right):
                if not 0 <= child < node:
                    raise DataError(f"merge {i} references unknown node {child}")
                if child in used:
                    raise DataError(f"node {child} merged twice")
                used.add(child)
            if m.left == m.right:
                raise DataError(f"merge {i} joins node {m.left} with itself")
            if not math.isfinite(m.height) or m.height < 0:
                raise DataError(f"merge {i} has invalid height {m.height!r}")
            if m.height < prev:
                raise DataError(f"merge heights decrease at merge {i}")
            prev = m.height
            if m.size != sizes[m.left] + sizes[m.right]:
                raise DataError(f"merge {i} size {m.size} does not match its children")
            sizes.append(m.size)

    def to_json(self) -> str:
        doc = {"n": self.n, "merges": [[m.left, m.right, m.height, m.size] for m in self.merges]}
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Dendrogram":
        try:
            doc = json.loads(text)
            return cls(int(doc["n"]), tuple(doc["merges"]), doc.get("linkage", "single"))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            if isinstance(exc, DataError):
                raise
            raise DataError(f"malformed dendrogram JSON: {exc}") from None

    def leaf_order(self) -> list[int]:
        """Left-to-right leaf order in which no two brackets cross."""
        if self.n == 1:
            return [0]
        order = []
        stack = [2 * self.n - 2]
        while stack:
            node = stack.pop()
            if node < self.n:
                order.append(node)
            else:
                m = self.merges[node - self.n]
                stack.append(m.right)
                stack.append(m.left)
        return order


def agglomerate(d: DistanceMatrix, linkage: str = "single") -> Dendrogram:
    if linkage not in LINKAGES:
        raise ParameterError(f"unknown linkage {linkage!r}; expected one of {', '.join(LINKAGES)}")
    n = d.n
    if n < 2:
        raise InsufficientDataError("agglomeration needs at least 2 items")

    dist = d.square()
    np.fill_diagonal(dist, np.inf)
    node_of = list(range(n))  # node id held by each slot
    size = [1] * n
    active = np.ones(n, dtype=bool)
    sums = None
    if linkage == "average":
        sums = [[Fraction(float(dist[i, j])) if i != j else Fraction(0) for j in range(n)] for i in range(n)]

    merges = []
    for step in range(n - 1):
        live = np.flatnonzero(active)
        sub = dist[np.ix_(live, live)]
        best = sub.min()
        cand_r, cand_c = np.nonzero(sub == best)
        key = None
        for r, c in zip(cand_r, cand_c):
            if r >= c:
                continue
            a, b = node_of[live[r]], node_of[live[c]]
            pair = (min(a, b), max(a, b), live[r], live[c])
            if key is None or pair[:2] < key[:2]:
                key = pair
        lo, hi, sa, sb = key
        if node_of[sa] != lo:
            sa, sb = sb, sa
        new_size = size[sa] + size[sb]
        merges.append(Merge(lo, hi, float(best), new_size))

        others = np.flatnonzero(active)
        others = others[(others != sa) & (others != sb)]
        if linkage == "single":
            row = np.minimum(dist[sa, others], dist[sb, others])
        elif linkage == "complete":
            row = np.maximum(dist[sa, others], dist[sb, others])
        else:
            row = np.empty(len(others))
            for idx, o in enumerate(others):
                total = sums[sa][o] + sums[sb][o]
                sums[sa][o] = sums[o][sa] = total
                row[idx] = float(total / (new_size * size[o]))
        dist[sa, others] = row
        dist[others, sa] = row
        dist[sb, :] = np.inf
        dist[:, sb] = np.inf
        active[sb] = False
        node_of[sa] = n + step
        size[sa] = new_size
    return Dendrogram(n, tuple(merges), linkage)


def _components(t: Dendrogram, merges_used: int) -> list[int]:
    parent = list(range(2 * t.n - 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, m in enumerate(t.merges[:merges_used]):
        node = t.n + i
        parent[find(m.left)] = node
        parent[find(m.right)] = node
    return [find(leaf) for leaf in range(t.n)]


def cut(t: Dendrogram, k: int) -> Partition:
    """Undo the last ``k - 1`` merges and label the remaining components."""
    if not 1 <= k <= t.n:
        raise ParameterError(f"k must be in [1, {t.n}], got {k}")
    roots = _components(t, t.n - k)
    return Partition.from_labels(roots, method=f"hierarchical-{t.linkage}", params={"k": k})


def cophenetic_matrix(t: Dendrogram) -> DistanceMatrix:
    n = t.n
    out = np.zeros((n, n))
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    for i, m in enumerate(t.merges):
        left = members.pop(m.left)
        right = members.pop(m.right)
        out[np.ix_(left, right)] = m.height
        out[np.ix_(right, left)] = m.height
        members[n + i] = left + right
    return DistanceMatrix.from_square(out)


def cophenetic_correlation(d: DistanceMatrix, c: DistanceMatrix) -> float:
    """Pearson correlation between original and cophenetic distances."""
    if d.n != c.n:
        raise ParameterError(f"matrices cover different item counts ({d.n} vs {c.n})")
    x = d.values - d.values.mean()
    y = c.values - c.values.mean()
    sxx = float(np.dot(x, x))
    syy = float(np.dot(y, y))
    if sxx == 0 or syy == 0:
        raise DegenerateError("degenerate correlation: a distance vector has zero variance")
    r = float(np.dot(x, y)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))
