from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ambiball.errors import (
    Asymmetry,
    DimensionMismatch,
    DuplicatePoint,
    NegativeEntry,
    NonzeroDiagonal,
    ParseError,
    TriangleViolation,
)
from ambiball.metric_space import FiniteMetricSpace, PointSet, from_points, inflate, validate_metric


def test_valid_matrix_round_trips(two_point):
    again = FiniteMetricSpace.from_dict(two_point.to_dict())
    assert again == two_point
    assert hash(again) == hash(two_point)


def test_labels_default_to_indices():
    space = validate_metric([[0, 2], [2, 0]])
    assert space.labels == ("p0", "p1")
    assert space.index("p1") == 1


@pytest.mark.parametrize(
    "dist, err",
    [
        ([[0, 1], [2, 0]], Asymmetry),
        ([[1, 1], [1, 0]], NonzeroDiagonal),
        ([[0, -1], [-1, 0]], NegativeEntry),
        ([[0, 0], [0, 0]], DuplicatePoint),
        ([[0, 1, 5], [1, 0, 1], [5, 1, 0]], TriangleViolation),
        ([[0, 1, 2]], DimensionMismatch),
    ],
)
def test_axiom_violations(dist, err):
    with pytest.raises(err):
        validate_metric(dist)


def test_triangle_violation_reports_triple():
    with pytest.raises(TriangleViolation) as info:
        validate_metric([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    i, j, k = info.value.triple
    assert (i, j, k) == (0, 2, 1)


def test_non_numeric_matrix():
    with pytest.raises(ParseError):
        validate_metric([["x", 1], [1, 0]])


def test_unknown_label(two_point):
    with pytest.raises(ParseError):
        two_point.index("zzz")


def test_from_points_norms():
    pts = [[0, 0], [3, 4]]
    assert from_points(pts).dist[0, 1] == pytest.approx(5)
    assert from_points(pts, "manhattan").dist[0, 1] == pytest.approx(7)
    assert from_points(pts, "chebyshev").dist[0, 1] == pytest.approx(4)
    with pytest.raises(DuplicatePoint):
        from_points([[1, 1], [1, 1]])
    with pytest.raises(ParseError):
        from_points(pts, "cosine")


def test_dist_is_read_only(two_point):
    with pytest.raises(ValueError):
        two_point.dist[0, 1] = 3


def test_inflate_closed_and_open(two_point_close):
    A = PointSet((0,))
    assert inflate(two_point_close, A, 0.4).indices == (0, 1)
    assert inflate(two_point_close, A, 0.4, closed=False).indices == (0,)
    assert inflate(two_point_close, PointSet(()), 0.4).indices == ()


def test_inflate_fraction_threshold_is_exact():
    space = validate_metric([[0, 0.5], [0.5, 0]])
    assert inflate(space, PointSet((0,)), Fraction(1, 2)).indices == (0, 1)
    assert inflate(space, PointSet((0,)), Fraction(1, 2), closed=False).indices == (0,)


def test_exceeds_and_threshold(two_point_close):
    assert two_point_close.exceeds(0.3).tolist() == [[False, True], [True, False]]
    assert not two_point_close.exceeds(0.4).any()
    assert two_point_close.near_threshold(0.4)
    assert not two_point_close.near_threshold(0.3)


def test_pointset_ops(two_point):
    a = PointSet.of(two_point, ["b", "a", "a"])
    assert a.indices == (0, 1)
    assert PointSet((1,)) <= a
    assert (PointSet((0,)) | PointSet((1,))) == a
    assert a.labels(two_point) == ["a", "b"]
    with pytest.raises(ValueError):
        PointSet((1, 1))


coords = st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=7, unique=True)


@given(coords, st.sampled_from(["euclidean", "manhattan", "chebyshev"]))
def test_normed_spaces_are_metrics(pts, kind):
    space = from_points(pts, kind)
    d = space.dist
    assert np.allclose(d, d.T)
    assert np.all(np.diag(d) == 0)
    # via[i, j, k] = d[i, k] + d[k, j]
    via = d[:, None, :] + d.T[None, :, :]
    assert np.all(d[:, :, None] <= via + 1e-9)


@given(coords, st.floats(0, 30))
def test_inflation_is_monotone(pts, eps):
    space = from_points(pts)
    A = PointSet((0,))
    assert A <= inflate(space, A, eps)
    assert inflate(space, A, eps, closed=False) <= inflate(space, A, eps)
    assert inflate(space, A, eps) <= inflate(space, A, eps + 1)
