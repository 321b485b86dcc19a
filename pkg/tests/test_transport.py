import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from aktfourier.geometry import Frame, FrameError
from aktfourier.measures import DiscreteMeasure
from aktfourier.transport import w1_1d, w1_bruteforce, w1_cdf_integral, w1_exact


def _pair(rng, n, d, frame=Frame.UNIT_CUBE):
    hi = 1.0 if frame is Frame.UNIT_CUBE else math.pi
    return (DiscreteMeasure(rng.uniform(0, hi, (n, d)), frame),
            DiscreteMeasure(rng.uniform(0, hi, (n, d)), frame))


def test_same_multiset_is_zero():
    pts = np.random.default_rng(0).random((6, 2))
    mu = DiscreteMeasure(pts)
    nu = DiscreteMeasure(pts[::-1])
    assert w1_exact(mu, nu).value == 0.0


def test_1d_sorted_example():
    mu, nu = DiscreteMeasure([[0.0], [0.5]]), DiscreteMeasure([[0.25], [0.75]])
    assert w1_exact(mu, nu).value == pytest.approx(0.25, abs=1e-15)
    assert w1_1d([0.0, 0.5], [0.25, 0.75]) == pytest.approx(0.25, abs=1e-15)
    assert w1_1d([0.3, 0.1], [0.1, 0.3]) == 0.0


def test_bruteforce_examples():
    mu, nu = DiscreteMeasure([[0.2, 0.3]]), DiscreteMeasure([[0.5, 0.7]])
    assert w1_bruteforce(mu, nu).value == pytest.approx(0.5, abs=1e-15)
    cross = w1_bruteforce(DiscreteMeasure([[0, 0], [1, 1]]), DiscreteMeasure([[1, 0], [0, 1]]))
    assert cross.value == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        w1_bruteforce(*_pair(np.random.default_rng(0), 10, 1))


@pytest.mark.parametrize("metric", ["euclidean", "torus"])
def test_exact_matches_bruteforce(metric):
    rng = np.random.default_rng(17)
    for _ in range(150):
        n, d = int(rng.integers(1, 8)), int(rng.integers(1, 4))
        mu, nu = _pair(rng, n, d, Frame.FULL_TORUS if metric == "torus" else Frame.UNIT_CUBE)
        if metric == "torus":
            mu = DiscreteMeasure(mu.points * 2 - math.pi + 1e-9, Frame.FULL_TORUS)
        assert abs(w1_exact(mu, nu, metric).value - w1_bruteforce(mu, nu, metric).value) <= 1e-9


def test_1d_fast_path_matches_exact_and_cdf():
    rng = np.random.default_rng(4)
    for _ in range(100):
        n = int(rng.integers(1, 65))
        xs, ys = rng.random(n), rng.random(n)
        exact = w1_exact(DiscreteMeasure(xs), DiscreteMeasure(ys)).value
        assert abs(w1_1d(xs, ys) - exact) <= 1e-10
        assert abs(w1_cdf_integral(xs, ys) - exact) <= 1e-10


def test_errors():
    rng = np.random.default_rng(0)
    mu, _ = _pair(rng, 3, 2)
    _, nu = _pair(rng, 4, 2)
    with pytest.raises(ValueError):
        w1_exact(mu, nu)
    a, b = _pair(rng, 3, 2)
    with pytest.raises(FrameError):
        w1_exact(a, b.to_half_torus())
    with pytest.raises(FrameError):
        w1_exact(a, b, "torus")
    with pytest.raises(ValueError):
        w1_1d([0.1], [0.1, 0.2])


def test_permutation_is_bijection_and_reconstructs_value():
    mu, nu = _pair(np.random.default_rng(2), 50, 3)
    res = w1_exact(mu, nu)
    assert sorted(res.permutation) == list(range(50))
    assert abs(res.recompute(mu, nu) - res.value) <= 1e-12


unit_cloud = st.integers(1, 6).flatmap(
    lambda n: st.tuples(*[arrays(np.float64, (n, 2), elements=st.floats(0, 1))] * 3))


@settings(max_examples=60, deadline=None)
@given(unit_cloud)
def test_metric_axioms(clouds):
    a, b, c = (DiscreteMeasure(p) for p in clouds)
    ab = w1_exact(a, b).value
    assert ab == w1_exact(b, a).value or abs(ab - w1_exact(b, a).value) < 1e-15
    assert w1_exact(a, a).value == 0.0
    assert w1_exact(a, c).value <= ab + w1_exact(b, c).value + 1e-10


@settings(max_examples=60, deadline=None)
@given(unit_cloud)
def test_torus_domination_and_half_torus_equality(clouds):
    a, b, _ = (DiscreteMeasure(p).to_half_torus() for p in clouds)
    torus = w1_exact(a, b, "torus").value
    eucl = w1_exact(a, b, "euclidean").value
    assert abs(torus - eucl) <= 1e-12
    full = [DiscreteMeasure(np.clip(p * 2 * math.pi - math.pi, -math.pi + 1e-12, math.pi), Frame.FULL_TORUS)
            for p in clouds[:2]]
    assert w1_exact(*full, "torus").value <= w1_exact(*full, "euclidean").value + 1e-12


@settings(max_examples=40, deadline=None)
@given(unit_cloud)
def test_scale_equivariance(clouds):
    a, b = DiscreteMeasure(clouds[0]), DiscreteMeasure(clouds[1])
    scaled = w1_exact(a.to_half_torus(), b.to_half_torus()).value
    assert scaled == pytest.approx(math.pi * w1_exact(a, b).value, rel=1e-12, abs=1e-13)
