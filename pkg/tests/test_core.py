import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bikmeans.core import (ClusteringError, DimensionMismatchError, InvalidPartitionError,
                           KMedianInstance, PointSet, assign, check_relaxed_3hop,
                           cluster_cost_centroid, cluster_cost_pairwise, cost_centers_kmeans,
                           cost_centers_kmedian, cost_partition_kmeans, cost_partition_kmedian,
                           labels_to_partition, make_partition)

from conftest import line_instance

coords = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def test_pointset_is_read_only():
    X = PointSet([[0.0, 1.0], [2.0, 3.0]])
    assert X.n == 2 and X.dim == 2
    with pytest.raises(ValueError):
        X.points[0, 0] = 5.0


def test_pointset_column_from_1d():
    X = PointSet([0.0, 2.0, 10.0])
    assert X.points.shape == (3, 1)


def test_pointset_rejects_empty_and_nan():
    with pytest.raises(ClusteringError):
        PointSet(np.zeros((0, 2)))
    with pytest.raises(ClusteringError):
        PointSet([[np.nan]])


def test_instance_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        KMedianInstance(PointSet(np.zeros((2, 2))), PointSet(np.zeros((2, 3))))


def test_instance_table_shape_checked():
    with pytest.raises(DimensionMismatchError):
        KMedianInstance(PointSet([0.0, 1.0]), PointSet([0.0]), dist=np.zeros((2, 2)), metric="table")


def test_three_point_example():
    X = PointSet([0.0, 2.0, 10.0])
    assert cost_partition_kmeans(X, [[0, 1], [2]]) == pytest.approx(2.0)
    assert cost_partition_kmeans(X, [[0], [1, 2]]) == pytest.approx(32.0)
    assert cost_partition_kmeans(X, [[0, 2], [1]]) == pytest.approx(50.0)


def test_singletons_cost_zero():
    X = PointSet(np.random.default_rng(0).normal(size=(5, 3)))
    assert cost_partition_kmeans(X, [[i] for i in range(5)]) == 0.0


def test_partition_validation():
    with pytest.raises(InvalidPartitionError):
        make_partition([[0, 1], [1, 2]], 3)
    with pytest.raises(InvalidPartitionError):
        make_partition([[0], [2]], 3)
    with pytest.raises(InvalidPartitionError):
        make_partition([[0, 1], [], [2]], 3)
    assert labels_to_partition([1, 0, 1]) == ((0, 2), (1,))


def test_cost_centers_matches_partition():
    X = PointSet([0.0, 2.0, 10.0])
    cost, S = cost_centers_kmeans(X, [[1.0], [10.0]])
    assert cost == pytest.approx(2.0)
    assert S == ((0, 1), (2,))


def test_assign_breaks_ties_by_index():
    inst = line_instance([[5.0]], [[0.0], [10.0]])
    sol = assign(inst.dist, [1, 0])
    assert sol.assignment == (0,)


def test_kmedian_costs():
    inst = line_instance([[0.0], [10.0]], [[0.0], [10.0]])
    assert cost_centers_kmedian(inst, [0]) == 100.0
    assert cost_centers_kmedian(inst, [0, 1]) == 0.0
    assert cost_partition_kmedian(inst, [[0, 1]]) == 100.0


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 7), st.integers(1, 4)), elements=coords))
def test_pairwise_equals_centroid(pts):
    a, b = cluster_cost_pairwise(pts), cluster_cost_centroid(pts)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(arrays(float, st.tuples(st.integers(2, 7), st.just(2)), elements=coords),
       st.lists(st.floats(-50, 50), min_size=2, max_size=2))
def test_centroid_is_optimal_center(pts, c):
    own = cluster_cost_centroid(pts)
    other = float(((pts - np.array(c)) ** 2).sum())
    assert own <= other + 1e-7 * (1 + other)


@settings(max_examples=30, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 6), st.integers(1, 3)), elements=coords),
       st.data())
def test_kmedian_cost_equals_kmeans_when_centers_are_centroids(pts, data):
    X = PointSet(pts)
    labels = data.draw(st.lists(st.integers(0, 2), min_size=X.n, max_size=X.n))
    S = labels_to_partition(labels)
    cents = np.array([pts[list(cl)].mean(axis=0) for cl in S])
    inst = KMedianInstance(X, PointSet(cents))
    # the centroid-served partition can only be beaten by reassigning to nearer centroids
    assert cost_centers_kmedian(inst, range(len(S))) <= cost_partition_kmeans(X, S) + 1e-7


def test_3hop_tight_witness():
    inst = line_instance([[0.0], [1.0], [2.0], [3.0]], [[0.0], [1.0], [2.0], [3.0]])
    rep = check_relaxed_3hop(inst, 3.0, samples=None)
    assert rep.violations == 0
    assert rep.worst_ratio == pytest.approx(3.0, abs=1e-9)
    j, ip, jp, i = rep.worst_quadruple
    assert abs(i - j) == 3


def test_3hop_fails_below_three():
    inst = line_instance([[0.0], [1.0], [2.0], [3.0]], [[0.0], [1.0], [2.0], [3.0]])
    assert check_relaxed_3hop(inst, 2.9, samples=None).violations > 0


@settings(max_examples=25, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 5), st.integers(1, 3)), elements=coords),
       arrays(float, st.tuples(st.integers(1, 5), st.integers(1, 3)), elements=coords))
def test_3hop_holds_for_squared_euclidean(D, C):
    if D.shape[1] != C.shape[1]:
        C = np.resize(C, (C.shape[0], D.shape[1]))
    inst = KMedianInstance(PointSet(D), PointSet(C))
    assert check_relaxed_3hop(inst, 3.0, samples=None).violations == 0


def test_3hop_sampled_mode_counts():
    inst = line_instance([[0.0], [3.0]], [[1.0], [2.0]])
    rep = check_relaxed_3hop(inst, 3.0, samples=200, seed=1)
    assert rep.checked == 200 and rep.violations == 0
    assert math.isfinite(rep.worst_ratio)
