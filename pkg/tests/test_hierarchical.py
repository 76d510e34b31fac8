import itertools

import numpy as np
import pytest

from oracles import naive_agglomerate, naive_cut, pearson, same_partition
from regionclust.data import FeatureMatrix
from regionclust.distance import DistanceMatrix, distance_matrix
from regionclust.errors import DataError, DegenerateError, ParameterError
from regionclust.hierarchical import (
    LINKAGES,
    Dendrogram,
    Merge,
    agglomerate,
    cophenetic_correlation,
    cophenetic_matrix,
    cut,
)


def line(points):
    return distance_matrix(FeatureMatrix(np.array(points, dtype=float).reshape(-1, 1), ("x",)))


def random_condensed(rng, n, integer=False):
    if integer:
        vals = rng.integers(1, 6, size=n * (n - 1) // 2).astype(float)
    else:
        vals = rng.random(n * (n - 1) // 2) * 10
    return DistanceMatrix(n, vals)


def test_three_points_single():
    t = agglomerate(line([0, 1, 10]), "single")
    assert t.merges == (Merge(0, 1, 1.0, 2), Merge(2, 3, 9.0, 3))


@pytest.mark.parametrize("linkage", LINKAGES)
def test_two_points_any_linkage(linkage):
    t = agglomerate(DistanceMatrix(2, [7.0]), linkage)
    assert t.merges == (Merge(0, 1, 7.0, 2),)


def test_complete_and_average_on_three_points():
    assert agglomerate(line([0, 1, 10]), "complete").merges[1].height == 10.0
    assert agglomerate(line([0, 1, 10]), "average").merges[1].height == 9.5


def test_unknown_linkage():
    with pytest.raises(ParameterError):
        agglomerate(line([0, 1]), "ward")


@pytest.mark.parametrize("linkage", LINKAGES)
@pytest.mark.parametrize("integer", [False, True], ids=["continuous", "tied"])
def test_matches_naive_oracle(linkage, integer):
    rng = np.random.default_rng(100 + integer)
    for _ in range(40):
        n = int(rng.integers(2, 13))
        d = random_condensed(rng, n, integer)
        t = agglomerate(d, linkage)
        expected = naive_agglomerate(d.square().tolist(), linkage)
        got = [(m.left, m.right, m.height, m.size) for m in t.merges]
        assert got == expected
        for k in range(1, n + 1):
            assert same_partition(cut(t, k).labels, naive_cut(n, expected, k))


def test_tie_rule_prefers_smallest_ids():
    # All distances equal: merges must chain through the lowest ids.
    t = agglomerate(DistanceMatrix(4, [1.0] * 6), "single")
    assert [(m.left, m.right) for m in t.merges] == [(0, 1), (2, 3), (4, 5)]


def test_cut_trivial_partitions():
    rng = np.random.default_rng(1)
    d = random_condensed(rng, 9)
    t = agglomerate(d)
    assert cut(t, 1).labels == (0,) * 9
    assert cut(t, 9).labels == tuple(range(9))
    assert cut(agglomerate(line([0, 1, 10])), 2).labels == (0, 0, 1)


def test_cut_range():
    t = agglomerate(line([0, 1, 10]))
    for k in (0, 4):
        with pytest.raises(ParameterError):
            cut(t, k)


def test_monotone_heights_on_random_data():
    rng = np.random.default_rng(2)
    for linkage in LINKAGES:
        for _ in range(20):
            t = agglomerate(random_condensed(rng, 30), linkage)
            h = [m.height for m in t.merges]
            assert h == sorted(h)


def test_dendrogram_validation():
    with pytest.raises(DataError):
        Dendrogram(3, (Merge(0, 1, 1.0, 2),))
    with pytest.raises(DataError):
        Dendrogram(3, (Merge(0, 1, 1.0, 2), Merge(0, 2, 2.0, 2)))
    with pytest.raises(DataError):
        Dendrogram(3, (Merge(0, 1, 2.0, 2), Merge(2, 3, 1.0, 3)))
    with pytest.raises(DataError):
        Dendrogram(3, (Merge(0, 1, 1.0, 2), Merge(2, 3, 2.0, 4)))


def test_json_round_trip():
    rng = np.random.default_rng(3)
    t = agglomerate(random_condensed(rng, 12), "average")
    doc = t.to_json()
    assert doc.startswith('{"n": 12, "merges": [[')
    back = Dendrogram.from_json(doc)
    assert back.merges == t.merges and back.n == 12


def test_json_malformed():
    with pytest.raises(DataError):
        Dendrogram.from_json('{"merges": []}')
    with pytest.raises(DataError):
        Dendrogram.from_json("not json")


def test_cophenetic_small():
    t = agglomerate(line([0, 1, 10]))
    assert cophenetic_matrix(t).values.tolist() == [1.0, 9.0, 9.0]
    t2 = agglomerate(DistanceMatrix(2, [7.0]))
    assert cophenetic_matrix(t2).values.tolist() == [7.0]


def test_cophenetic_ultrametric():
    rng = np.random.default_rng(4)
    for linkage in LINKAGES:
        for _ in range(5):
            n = 15
            c = cophenetic_matrix(agglomerate(random_condensed(rng, n), linkage)).square()
            for i, j, k in itertools.product(range(n), repeat=3):
                assert max(c[i, j], c[j, k]) >= c[i, k]


def test_single_linkage_cophenetic_is_subdominant():
    # Single-linkage cophenetic distances never exceed the original ones.
    rng = np.random.default_rng(5)
    d = random_condensed(rng, 20)
    c = cophenetic_matrix(agglomerate(d))
    assert np.all(c.values <= d.values)


def test_correlation_self_is_one():
    d = line([0, 1, 10])
    assert cophenetic_correlation(d, d) == 1.0


def test_correlation_matches_pearson_oracle():
    rng = np.random.default_rng(6)
    for _ in range(30):
        n = int(rng.integers(4, 25))
        d = random_condensed(rng, n)
        c = cophenetic_matrix(agglomerate(d))
        assert cophenetic_correlation(d, c) == pytest.approx(pearson(d.values.tolist(), c.values.tolist()), rel=1e-12)


def test_correlation_degenerate():
    d = DistanceMatrix(3, [1.0, 1.0, 1.0])
    with pytest.raises(DegenerateError):
        cophenetic_correlation(d, d)
    with pytest.raises(ParameterError):
        cophenetic_correlation(d, DistanceMatrix(2, [1.0]))


def test_permuting_rows_permutes_partition():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(25, 3))
    perm = rng.permutation(25)
    for linkage in LINKAGES:
        t = agglomerate(distance_matrix(FeatureMatrix(x)), linkage)
        tp = agglomerate(distance_matrix(FeatureMatrix(x[perm])), linkage)
        for k in range(1, 26):
            base = np.array(cut(t, k).labels)
            assert same_partition(cut(tp, k).labels, base[perm])


def test_leaf_order_is_a_permutation_and_contiguous():
    rng = np.random.default_rng(8)
    t = agglomerate(random_condensed(rng, 20))
    order = t.leaf_order()
    assert sorted(order) == list(range(20))
    pos = {leaf: i for i, leaf in enumerate(order)}
    members = {i: [i] for i in range(20)}
    for i, m in enumerate(t.merges):
        members[20 + i] = members[m.left] + members[m.right]
        spots = sorted(pos[v] for v in members[20 + i])
        assert spots == list(range(spots[0], spots[0] + len(spots)))
