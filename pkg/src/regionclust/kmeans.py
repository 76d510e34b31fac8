"""Lloyd's k-means with k-means++ seeding, plus validation instruments.

Random streams come from numpy's PCG64 generator keyed by a
``SeedSequence`` over ``(seed mod 2**64, restart index)``, so each restart
is reproducible on its own and restarts can run in any order or in
parallel without changing the selected result.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import FeatureMatrix
from .errors import DegenerateError, ParameterError
from .partition import Partition

MAX_ITER = 300
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class KMeansResult:
    partition: Partition
    centroids: np.ndarray
    wcss: float
    iterations: int
    seed: int
    restarts_used: int
    restart: int = 0
    # WCSS of the selected restart after each mean update, first entry from the seeding.
    wcss_trace: tuple[float, ...] = ()

    def to_json(self) -> str:
        doc = {
            "k": self.partition.k,
            "labels": list(self.partition.labels),
            "centroids": [[float(v) for v in row] for row in self.centroids],
            "wcss": self.wcss,
            "seed": self.seed,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
        }
        return json.dumps(doc)


@dataclass(frozen=True)
class WcssCurve:
    points: tuple[tuple[int, float], ...]

    @property
    def ks(self) -> list[int]:
        return [k for k, _ in self.points]

    @property
    def values(self) -> list[float]:
        return [w for _, w in self.points]


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & _MASK64, restart])))


def _sq_dists(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - centroids[None, :, :]
    return (diff * diff).sum(axis=2)


def _cluster_mean(points: np.ndarray) -> np.ndarray:
    # Shifted by the first member: identical points give their value exactly.
    base = points[0]
    return base + (points - base).mean(axis=0)


def _wcss(x: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    diff = x - centroids[labels]
    return float((diff * diff).sum())


def _plusplus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = float(closest.sum())
        if total > 0:
            cum = np.cumsum(closest)
            idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
            idx = min(idx, n - 1)
            while closest[idx] == 0:  # guard against landing on a zero-weight point at the edge
                idx -= 1
        else:
            # Every point already coincides with a centre: pick uniformly among unused rows.
            unused = np.setdiff1d(np.arange(n), chosen)
            idx = int(unused[rng.integers(len(unused))])
        chosen.append(idx)
        closest = np.minimum(closest, ((x - x[idx]) ** 2).sum(axis=1))
    return x[chosen].copy()


def _assign(x: np.ndarray, centroids: np.ndarray, current: np.ndarray | None) -> np.ndarray:
    d2 = _sq_dists(x, centroids)
    labels = d2.argmin(axis=1)
    if current is not None:
        # Keep the current cluster on ties so assignments only move on strict improvement.
        keep = d2[np.arange(len(x)), current] <= d2[np.arange(len(x)), labels]
        labels = np.where(keep, current, labels)
    return labels


def _update(x: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Recompute means, reseeding empty clusters with the farthest point."""
    labels = labels.copy()
    centroids = np.zeros((k, x.shape[1]))
    counts = np.bincount(labels, minlength=k)
    for c in range(k):
        if counts[c]:
            centroids[c] = _cluster_mean(x[labels == c])
    for c in range(k):
        if counts[c]:
            continue
        d2 = ((x - centroids[labels]) ** 2).sum(axis=1)
        d2[counts[labels] <= 1] = -1.0
        far = int(d2.argmax())
        donor = labels[far]
        labels[far] = c
        counts[donor] -= 1
        counts[c] = 1
        centroids[c] = x[far]
        centroids[donor] = _cluster_mean(x[labels == donor])
    return labels, centroids


def _lloyd(x: np.ndarray, k: int, rng: np.random.Generator):
    init = _plusplus(x, k, rng)
    labels = _assign(x, init, None)
    labels, centroids = _update(x, labels, k)
    trace = [_wcss(x, labels, centroids)]
    iterations = 0
    while iterations < MAX_ITER:
        iterations += 1
        new_labels = _assign(x, centroids, labels)
        if np.array_equal(new_labels, labels):
            break
        labels, centroids = _update(x, new_labels, k)
        trace.append(_wcss(x, labels, centroids))
    return labels, centroids, trace[-1], iterations, trace


def kmeans(m: FeatureMatrix, k: int, seed: int = 0, restarts: int = 10, workers: int = 1) -> KMeansResult:
    """Best of ``restarts`` seeded Lloyd runs by within-cluster sum of squares.

    Lloyd iterations stop at an assignment fixpoint or after 300 rounds.
    Ties between restarts go to the lowest restart index.
    """
    n = m.n
    if not isinstance(k, (int, np.integer)) or k < 1 or k > n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    if restarts < 1:
        raise ParameterError(f"restarts must be positive, got {restarts}")
    x = np.asarray(m.values, dtype=float)

    def run(r):
        return _lloyd(x, k, restart_rng(seed, r))

    if workers > 1 and restarts > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run, range(restarts)))
    else:
        runs = [run(r) for r in range(restarts)]

    best = min(range(restarts), key=lambda r: (runs[r][2], r))
    labels, centroids, wcss, iterations, trace = runs[best]
    part = Partition.from_labels(labels.tolist(), method="kmeans",
                                 params={"k": int(k), "restarts": int(restarts)}, seed=seed)
    # Reorder centroids to follow the canonical labels.
    order = []
    for lab in labels.tolist():
        if lab not in order:
            order.append(lab)
    centroids = centroids[order]
    centroids.setflags(write=False)
    return KMeansResult(part, centroids, wcss, iterations, seed, restarts, best, tuple(trace))


def _sums_of_squares(m: FeatureMatrix, p: Partition) -> tuple[float, float, float]:
    x = np.asarray(m.values, dtype=float)
    if p.n != x.shape[0]:
        raise ParameterError(f"partition covers {p.n} rows, matrix has {x.shape[0]}")
    labels = np.asarray(p.labels)
    grand = _cluster_mean(x)
    tss = float(((x - grand) ** 2).sum())
    bss = 0.0
    wss = 0.0
    for c in range(p.k):
        pts = x[labels == c]
        centre = _cluster_mean(pts)
        bss += len(pts) * float(((centre - grand) ** 2).sum())
        wss += float(((pts - centre) ** 2).sum())
    return tss, bss, wss


def total_sum_of_squares(m: FeatureMatrix) -> float:
    x = np.asarray(m.values, dtype=float)
    return float(((x - _cluster_mean(x)) ** 2).sum())


def variance_decomposition(m: FeatureMatrix, p: Partition) -> tuple[float, float, float]:
    """Return ``(TSS, BSS, WSS)`` for partition ``p`` of ``m``."""
    return _sums_of_squares(m, p)


def explained_variance(m: FeatureMatrix, p: Partition) -> float:
    """Between-cluster share of the total sum of squares, in percent."""
    tss, bss, _ = _sums_of_squares(m, p)
    if tss == 0:
        raise DegenerateError("all rows identical: total sum of squares is zero")
    return min(100.0, max(0.0, 100.0 * bss / tss))


def wcss_curve(m: FeatureMatrix, k_min: int, k_max: int, seed: int = 0, restarts: int = 10,
               workers: int = 1) -> WcssCurve:
    if not 1 <= k_min <= k_max <= m.n:
        raise ParameterError(f"need 1 <= k_min <= k_max <= {m.n}, got [{k_min}, {k_max}]")
    return WcssCurve(tuple((k, kmeans(m, k, seed, restarts, workers).wcss) for k in range(k_min, k_max + 1)))


def chord_distances(c: WcssCurve) -> list[float]:
    """Distance of each point to the endpoint chord, both axes scaled to [0, 1]."""
    ks = np.array(c.ks, dtype=float)
    ws = np.array(c.values, dtype=float)
    kx = (ks - ks.min()) / (ks.max() - ks.min())
    span = ws.max() - ws.min()
    wy = (ws - ws.min()) / span if span > 0 else np.zeros_like(ws)
    x0, y0, x1, y1 = kx[0], wy[0], kx[-1], wy[-1]
    dx, dy = x1 - x0, y1 - y0
    norm = float(np.hypot(dx, dy))
    return [abs(dy * (px - x0) - dx * (py - y0)) / norm for px, py in zip(kx, wy)]


def elbow_select(c: WcssCurve) -> int:
    """Interior k farthest from the endpoint chord; ties go to the smaller k."""
    if len(c.points) < 3:
        raise ParameterError("elbow selection needs at least 3 points on the curve")
    ks = c.ks
    if ks != list(range(ks[0], ks[0] + len(ks))):
        raise ParameterError("curve must cover a contiguous range of k")
    dist = chord_distances(c)
    best = 1
    for i in range(2, len(ks) - 1):
        if dist[i] > dist[best]:
            best = i
    return ks[best]
