import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aktfourier.geometry import (Frame, FrameError, Point, circle_distance, pairwise_cost,
                                 to_half_torus, torus_distance, wrap)

PI = math.pi
finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
torus_coord = st.floats(min_value=-PI, max_value=PI, allow_nan=False).filter(lambda v: v > -PI)
half_coord = st.floats(min_value=0.0, max_value=PI)
unit_coord = st.floats(min_value=0.0, max_value=1.0)


def test_wrap_examples():
    assert wrap(0.0) == 0.0
    assert wrap(4.0) == pytest.approx(4.0 - 2 * PI, abs=1e-15)
    assert wrap(-PI) == PI
    assert wrap(PI) == PI
    assert wrap(3 * PI) == PI


def test_wrap_rejects_nonfinite():
    with pytest.raises(ValueError):
        wrap(float("inf"))
    with pytest.raises(ValueError):
        wrap(np.array([0.0, np.nan]))


@given(finite)
def test_wrap_properties(y):
    r = wrap(y)
    assert -PI < r <= PI
    assert wrap(r) == r
    assert abs(r) <= abs(y)
    k = (y - r) / (2 * PI)
    assert abs(k - round(k)) < 1e-9 * max(1.0, abs(k))


def test_wrap_vectorized_matches_scalar():
    ys = np.linspace(-20, 20, 1001)
    assert np.array_equal(wrap(ys), np.array([wrap(float(y)) for y in ys]))


def test_circle_distance_examples():
    assert circle_distance(3.0, -3.0) == pytest.approx(2 * PI - 6, abs=1e-15)
    assert circle_distance(1.3, 1.3) == 0.0
    assert circle_distance(0.0, PI) == PI
    with pytest.raises(ValueError):
        circle_distance(4.0, 0.0)


@given(torus_coord, torus_coord)
def test_circle_distance_symmetric_bounded(x, y):
    d = circle_distance(x, y)
    assert d == circle_distance(y, x)
    assert 0.0 <= d <= PI


def test_torus_distance_examples():
    assert torus_distance((0.0, 0.0), (PI, PI)) == pytest.approx(PI * math.sqrt(2), rel=1e-15)
    assert torus_distance((0.4, -1.0), (0.4, -1.0)) == 0.0
    assert torus_distance((3.0, 0.0), (-3.0, 0.0)) == pytest.approx(2 * PI - 6, abs=1e-15)
    with pytest.raises(ValueError):
        torus_distance((0.0,), (0.0, 1.0))
    with pytest.raises(FrameError):
        torus_distance(Point((0.5,), Frame.UNIT_CUBE), Point((0.5,), Frame.UNIT_CUBE))


@settings(max_examples=200)
@given(st.integers(1, 4).flatmap(lambda d: st.tuples(*[st.lists(torus_coord, min_size=d, max_size=d)] * 3)))
def test_torus_triangle_inequality(xyz):
    x, y, z = xyz
    assert torus_distance(x, z) <= torus_distance(x, y) + torus_distance(y, z) + 1e-12
    assert torus_distance(x, y) <= math.dist(x, y) + 1e-12


@given(st.integers(1, 4).flatmap(lambda d: st.tuples(*[st.lists(half_coord, min_size=d, max_size=d)] * 2)))
def test_torus_equals_euclidean_on_half_torus(xy):
    x, y = xy
    assert torus_distance(x, y) == pytest.approx(math.dist(x, y), abs=1e-15 * len(x))


def test_to_half_torus():
    assert to_half_torus(Point((0.0, 0.0), Frame.UNIT_CUBE)).coords == (0.0, 0.0)
    assert to_half_torus(Point((1.0, 1.0), Frame.UNIT_CUBE)).coords == (PI, PI)
    assert to_half_torus(Point((0.5,), Frame.UNIT_CUBE)).coords == (PI / 2,)
    with pytest.raises(FrameError):
        to_half_torus(Point((0.5,), Frame.HALF_TORUS))


@given(st.integers(1, 4).flatmap(lambda d: st.tuples(*[st.lists(unit_coord, min_size=d, max_size=d)] * 2)))
def test_scaling_by_pi(pq):
    p, q = (Point(tuple(c), Frame.UNIT_CUBE) for c in pq)
    assert torus_distance(to_half_torus(p), to_half_torus(q)) == pytest.approx(PI * math.dist(*pq), abs=1e-14)


def test_point_frame_invariants():
    with pytest.raises(FrameError):
        Point((1.5,), Frame.UNIT_CUBE)
    with pytest.raises(FrameError):
        Point((-PI,), Frame.FULL_TORUS)
    assert Point((PI, 0.0)).dim == 2


def test_pairwise_cost_torus_vs_loop():
    rng = np.random.default_rng(3)
    xs = rng.uniform(-PI, PI, (5, 3))
    ys = rng.uniform(-PI, PI, (4, 3))
    c = pairwise_cost(xs, ys, "torus")
    for i in range(5):
        for j in range(4):
            assert c[i, j] == pytest.approx(torus_distance(xs[i], ys[j]), abs=1e-14)
