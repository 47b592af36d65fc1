import itertools
import warnings

import numpy as np
import pytest

from driftscan.errors import ArgumentError
from driftscan.measures import ecdf_from_samples, get_spec, measure_eval
from driftscan.ordering import (
    EQUAL,
    GREATER,
    LESS,
    PARALLEL,
    ParallelismWarning,
    build_mst,
    build_poset,
    dominance,
    ecdf_from_partition,
    label_points,
    ordered_partition,
    topo_partition_mst,
    topo_partition_poset,
)

RNG = np.random.default_rng(11)


def test_dominance_cases():
    assert dominance((1, 2), (1, 2)) == EQUAL
    assert dominance((1, 1), (2, 2)) == LESS
    assert dominance((2, 3), (1, 2)) == GREATER
    assert dominance((1, 2), (2, 1)) == PARALLEL


def test_label_points_origins():
    pts = label_points([[1.0], [2.0]], [[3.0]])
    assert [p.origin for p in pts] == ["R", "R", "W"]


def test_poset_partition_1d_is_sorted_order():
    r = np.array([[3.0], [1.0], [2.0]])
    w = np.array([[2.5], [0.5]])
    partition = ordered_partition(r, w, "poset")
    values = [node.vector[0] for _, node in partition.positions()]
    assert values == sorted(values)
    assert partition.total_points() == 5


def test_poset_collapses_duplicates():
    partition = ordered_partition([[1.0], [1.0]], [[1.0], [2.0]], "poset")
    nodes = [node for _, node in partition.positions()]
    assert nodes[0].count_r == 2 and nodes[0].count_w == 1
    assert nodes[1].count_w == 1


def _brute_depths(vectors):
    """Longest-path depth per distinct vector under strict dominance."""
    n = len(vectors)
    less = [[all(a <= b for a, b in zip(vectors[i], vectors[j])) and vectors[i] != vectors[j]
             for j in range(n)] for i in range(n)]
    depth = [0] * n
    for _ in range(n):
        for j in range(n):
            for i in range(n):
                if less[i][j]:
                    depth[j] = max(depth[j], depth[i] + 1)
    return depth


def test_poset_depths_match_brute_force():
    for trial in range(30):
        rng = np.random.default_rng([21, trial])
        pts = rng.integers(0, 3, size=(7, 2)).astype(float)
        r, w = pts[:4], pts[4:]
        dag = build_poset(label_points(r, w))
        partition = topo_partition_poset(dag)
        vectors = sorted({tuple(p) for p in pts})
        expect = dict(zip(vectors, _brute_depths(vectors)))
        for depth, bin_nodes in enumerate(partition.bins):
            for node in bin_nodes:
                assert expect[node.vector] == depth


def _brute_mst_weight(vectors):
    n = len(vectors)
    best = None
    for edges in itertools.combinations(itertools.combinations(range(n), 2), n - 1):
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        weight = 0.0
        ok = True
        for i, j in edges:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
            weight += float(np.linalg.norm(np.subtract(vectors[i], vectors[j])))
        if ok and (best is None or weight < best):
            best = weight
    return best


def test_mst_weight_matches_enumeration():
    for trial in range(10):
        rng = np.random.default_rng([31, trial])
        pts = rng.standard_normal((5, 2))
        r, w = pts[:3], pts[3:]
        tree = build_mst(label_points(r, w))
        want = _brute_mst_weight([tuple(p) for p in pts])
        assert tree.total_weight == pytest.approx(want, rel=1e-9)


def test_mst_partition_peels_leaves():
    # a path graph peels from both ends inward
    pts = [[float(i)] for i in range(5)]
    tree = build_mst(label_points(pts[:3], pts[3:]))
    partition = topo_partition_mst(tree)
    assert partition.total_points() == 5
    assert len(partition.bins[0]) == 2  # the two path endpoints


def test_partition_ecdfs_count_origin_mass():
    partition = ordered_partition([[1.0], [2.0]], [[1.5], [2.5]], "poset")
    f_r = ecdf_from_partition(partition, "R")
    f_w = ecdf_from_partition(partition, "W")
    assert f_r.n == 2 and f_w.n == 2
    assert f_r.cum[-1] == 1.0 and f_w.cum[-1] == 1.0
    # R holds positions 1 and 3 of the traversal
    assert f_r.evaluate([1, 2, 3, 4]).tolist() == [0.5, 0.5, 1.0, 1.0]


def test_parallel_data_warns():
    # an antichain: every vector increases in one axis, decreases in the other
    r = [[float(i), float(-i)] for i in range(8)]
    w = [[float(i) + 0.5, float(-i) - 0.5] for i in range(8)]
    with pytest.warns(ParallelismWarning):
        ordered_partition(r, w, "poset")


def test_1d_poset_pipeline_equals_direct_measures():
    rng = np.random.default_rng(41)
    r = rng.standard_normal((40, 1))
    w = rng.standard_normal((40, 1)) + 0.3
    partition = ordered_partition(r, w, "poset")
    f_r = ecdf_from_partition(partition, "R")
    f_w = ecdf_from_partition(partition, "W")
    for mid in ("ks", "hellinger", "js", "euclid"):
        via_partition = measure_eval(get_spec(mid), f_r, f_w)
        direct = measure_eval(
            get_spec(mid), ecdf_from_samples(r.ravel()), ecdf_from_samples(w.ravel())
        )
        assert via_partition.raw == pytest.approx(direct.raw, abs=1e-12), mid


def test_ordered_partition_validates_method():
    with pytest.raises(ArgumentError):
        ordered_partition([[1.0]], [[2.0]], "nope")


def test_dimension_mismatch_rejected():
    with pytest.raises(ArgumentError):
        ordered_partition([[1.0, 2.0]], [[1.0]], "poset")
