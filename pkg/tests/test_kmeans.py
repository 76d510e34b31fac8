import math

import numpy as np
import pytest

from oracles import rand_pairs_ari
from regionclust.data import FeatureMatrix, to_feature_matrix
from regionclust.errors import DegenerateError, ParameterError
from regionclust.kmeans import (
    WcssCurve,
    chord_distances,
    elbow_select,
    explained_variance,
    kmeans,
    total_sum_of_squares,
    variance_decomposition,
    wcss_curve,
)
from regionclust.partition import Partition, adjusted_rand_index, canonical_labels
from regionclust.preprocess import zscore


def fm(x):
    x = np.asarray(x, dtype=float)
    return FeatureMatrix(x, tuple(f"c{i}" for i in range(x.shape[1])))


@pytest.fixture(scope="module")
def blobs():
    rng = np.random.default_rng(0)
    centres = np.array([[0, 0, 0], [5, 5, 0], [0, 5, 5]], dtype=float)
    return fm(np.vstack([c + rng.normal(scale=0.8, size=(20, 3)) for c in centres]))


def test_k_equals_n():
    rng = np.random.default_rng(1)
    m = fm(rng.normal(size=(12, 3)))
    r = kmeans(m, 12, seed=3, restarts=2)
    assert r.wcss == 0.0
    assert r.partition.k == 12 and sorted(r.partition.sizes()) == [1] * 12


def test_k_equals_one(blobs):
    r = kmeans(blobs, 1, seed=0, restarts=1)
    assert r.partition.labels == (0,) * blobs.n
    assert np.allclose(r.centroids[0], blobs.values.mean(axis=0), rtol=1e-12)
    assert r.wcss == pytest.approx(total_sum_of_squares(blobs), rel=1e-12)


def test_parameter_errors(blobs):
    for k in (0, -1, blobs.n + 1):
        with pytest.raises(ParameterError):
            kmeans(blobs, k)
    with pytest.raises(ParameterError):
        kmeans(blobs, 2, restarts=0)


def test_zero_noise_table1_recovery(zero_noise_panel):
    ds, truth = zero_noise_panel
    r = kmeans(zscore(to_feature_matrix(ds)), 4, seed=7, restarts=10)
    assert r.wcss == 0.0
    assert r.partition.labels == canonical_labels(truth)


def test_lloyd_monotone_and_centroids_are_means(blobs):
    for seed in range(20):
        r = kmeans(blobs, 3, seed=seed, restarts=1)
        trace = r.wcss_trace
        assert all(b <= a * (1 + 1e-12) for a, b in zip(trace, trace[1:]))
        assert trace[-1] == r.wcss
        labels = np.array(r.partition.labels)
        for c in range(3):
            assert np.allclose(r.centroids[c], blobs.values[labels == c].mean(axis=0), rtol=1e-10, atol=1e-12)


def test_determinism_and_thread_independence(blobs):
    a = kmeans(blobs, 3, seed=42, restarts=8)
    b = kmeans(blobs, 3, seed=42, restarts=8)
    c = kmeans(blobs, 3, seed=42, restarts=8, workers=4)
    for other in (b, c):
        assert other.partition == a.partition
        assert other.centroids.tobytes() == a.centroids.tobytes()
        assert other.wcss == a.wcss and other.to_json() == a.to_json()


def test_best_restart_selected(blobs):
    best = kmeans(blobs, 4, seed=5, restarts=6)
    singles = [kmeans(blobs, 4, seed=5, restarts=r + 1).wcss for r in range(6)]
    assert best.wcss == min(singles)


def test_empty_cluster_repair_with_duplicates():
    x = fm([[0.0, 0.0]] * 5 + [[1.0, 1.0]] * 5)
    r = kmeans(x, 4, seed=0, restarts=3)
    assert r.partition.k == 4
    assert min(r.partition.sizes()) >= 1
    assert r.wcss == 0.0


def test_json_shape(blobs):
    import json
    r = kmeans(blobs, 3, seed=1, restarts=2)
    doc = json.loads(r.to_json())
    assert set(doc) >= {"labels", "centroids", "wcss", "seed", "iterations"}
    assert len(doc["labels"]) == blobs.n and len(doc["centroids"]) == 3


def test_explained_variance_bounds(blobs):
    one = Partition.from_labels([0] * blobs.n)
    assert explained_variance(blobs, one) == 0.0
    each = Partition.from_labels(range(blobs.n))
    assert explained_variance(blobs, each) == pytest.approx(100.0, abs=1e-9)


def test_explained_variance_degenerate():
    with pytest.raises(DegenerateError):
        explained_variance(fm([[1.0, 1.0]] * 4), Partition.from_labels([0, 0, 1, 1]))


def test_variance_decomposition_random_partitions(blobs):
    rng = np.random.default_rng(2)
    for _ in range(50):
        k = int(rng.integers(1, 8))
        labels = rng.integers(0, k, size=blobs.n)
        tss, bss, wss = variance_decomposition(blobs, Partition.from_labels(labels))
        assert bss + wss == pytest.approx(tss, rel=1e-9)


def test_zero_noise_explained_variance(zero_noise_panel):
    ds, truth = zero_noise_panel
    m = zscore(to_feature_matrix(ds))
    assert explained_variance(m, Partition.from_labels(truth)) == pytest.approx(100.0, abs=1e-9)


def test_wcss_curve_endpoints(blobs):
    n = blobs.n
    assert wcss_curve(blobs, n, n, seed=1, restarts=1).points == ((n, 0.0),)
    (k, w), = wcss_curve(blobs, 1, 1, seed=1, restarts=1).points
    assert k == 1 and w == pytest.approx(total_sum_of_squares(blobs), rel=1e-12)
    with pytest.raises(ParameterError):
        wcss_curve(blobs, 3, 2)


def test_wcss_curve_zero_noise(zero_noise_panel):
    m = zscore(to_feature_matrix(zero_noise_panel.dataset))
    curve = wcss_curve(m, 1, 8, seed=3, restarts=10)
    vals = curve.values
    assert all(v > 0 for v in vals[:3])
    assert vals[3:] == [0.0] * 5
    assert elbow_select(curve) == 4


def test_wcss_curve_non_increasing_small_panels():
    for seed in range(15):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(10, 51))
        m = fm(rng.normal(size=(n, 3)))
        vals = wcss_curve(m, 1, min(n, 8), seed=seed, restarts=10).values
        assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))


def test_elbow_hand_example():
    curve = WcssCurve(((1, 100.0), (2, 20.0), (3, 15.0), (4, 12.0)))
    # Normalized points (0,1), (1/3, 8/88), (2/3, 3/88), (1,0); chord x + y = 1.
    expected = [0.0, (1 - 1 / 3 - 8 / 88) / math.sqrt(2), (1 - 2 / 3 - 3 / 88) / math.sqrt(2), 0.0]
    assert chord_distances(curve) == pytest.approx(expected, abs=1e-12)
    assert elbow_select(curve) == 2


def test_elbow_linear_curve_picks_first_interior():
    curve = WcssCurve(tuple((k, 10.0 - k) for k in range(1, 7)))
    assert elbow_select(curve) == 2


def test_elbow_needs_three_points():
    with pytest.raises(ParameterError):
        elbow_select(WcssCurve(((1, 2.0), (2, 1.0))))


def test_ari_against_pair_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(2, 30))
        a = rng.integers(0, 4, size=n).tolist()
        b = rng.integers(0, 4, size=n).tolist()
        assert adjusted_rand_index(a, b) == pytest.approx(rand_pairs_ari(a, b), abs=1e-12)
    assert adjusted_rand_index([0, 0, 1, 1], [5, 5, 2, 2]) == 1.0
