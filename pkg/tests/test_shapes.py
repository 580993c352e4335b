"""Implicit CSG shapes: membership signs, extents, transforms."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from meshfree import Ball, Box, GeometryError


def test_ball_classify_signs():
    b = Ball([0.0, 0.0], 1.0)
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, -1.0], [1.1, 0.0], [0.5, 0.5]])
    assert list(b.classify(pts)) == [1, 0, 0, -1, 1]


def test_ball_classify_tolerance_band():
    b = Ball([0.0, 0.0], 1.0)
    p = np.array([[0.995, 0.0], [1.005, 0.0]])
    assert list(b.classify(p)) == [1, -1]
    assert list(b.classify(p, tol=0.01)) == [0, 0]


def test_box_membership():
    box = Box([0.0, 0.0], [2.0, 1.0])
    assert box.contains([[1.0, 0.5]]).all()
    assert not box.contains([[2.1, 0.5]]).any()
    assert box.classify(np.array([[0.0, 0.5]]))[0] == 0
    assert not box.interior_contains([[0.0, 0.5]]).any()


def test_union_is_pointwise_max():
    u = Ball([0.0, 0.0], 1.0) | Ball([1.5, 0.0], 1.0)
    pts = np.array([[0.0, 0.0], [1.5, 0.0], [0.75, 0.0], [3.0, 0.0]])
    assert u.contains(pts).tolist() == [True, True, True, False]
    # point on the left sphere's surface but inside the right one: interior
    assert u.classify(np.array([[1.0, 0.0]]))[0] == 1


def test_difference_annulus():
    ann = Ball([0.0, 0.0], 1.0) - Ball([0.0, 0.0], 0.5, tag=-2)
    pts = np.array(
        [[0.0, 0.0], [0.75, 0.0], [2.0, 0.0], [0.5, 0.0], [1.0, 0.0], [0.25, 0.0]]
    )
    assert list(ann.classify(pts)) == [-1, 1, -1, 0, 0, -1]


def test_bounding_boxes():
    lo, hi = (Ball([1.0, 2.0], 0.5)).bounding_box()
    assert np.allclose(lo, [0.5, 1.5]) and np.allclose(hi, [1.5, 2.5])
    lo, hi = (Ball([0.0, 0.0], 1.0) | Box([2.0, -3.0], [3.0, 0.0])).bounding_box()
    assert np.allclose(lo, [-1.0, -3.0]) and np.allclose(hi, [3.0, 1.0])
    # difference cannot grow past the positive operand
    lo, hi = (Box([0.0, 0.0], [1.0, 1.0]) - Ball([0.5, 0.5], 10.0)).bounding_box()
    assert np.allclose(lo, [0.0, 0.0]) and np.allclose(hi, [1.0, 1.0])


def test_diameter():
    assert Ball([0.0, 0.0, 0.0], 1.0).diameter() == pytest.approx(2.0 * np.sqrt(3.0))


def test_translate_and_rotate_membership():
    shifted = Ball([0.0, 0.0], 1.0).translate([5.0, 0.0])
    assert shifted.contains([[5.5, 0.0]]).all()
    assert not shifted.contains([[0.0, 0.0]]).any()

    th = 0.3
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    box = Box([0.0, 0.0], [2.0, 1.0]).rotate(rot)
    inside = rot @ np.array([1.0, 0.5])
    outside = rot @ np.array([2.5, 0.5])
    assert box.contains([inside]).all()
    assert not box.contains([outside]).any()


def test_invalid_construction():
    with pytest.raises(GeometryError):
        Ball([0.0, 0.0], -1.0)
    with pytest.raises(GeometryError):
        Ball([0.0, 0.0], 1.0, tag=3)
    with pytest.raises(GeometryError):
        Box([0.0, 0.0], [0.0, 1.0])
    with pytest.raises(GeometryError):
        Ball([0.0, 0.0], 1.0).contains([[1.0, 2.0, 3.0]])


@given(
    st.lists(st.floats(-2.0, 2.0), min_size=2, max_size=2),
    st.floats(0.1, 1.5),
    st.lists(st.floats(-4.0, 4.0), min_size=2, max_size=2),
)
def test_ball_membership_matches_norm(center, radius, point):
    b = Ball(center, radius)
    r = float(np.linalg.norm(np.array(point) - np.array(center)))
    assert b.contains([point])[0] == (r <= radius)
