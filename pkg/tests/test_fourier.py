import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from aktfourier.fourier import (char_fn, char_fn_box, char_fn_unit, default_t_grid, lemma1_bound,
                                optimize_t, prop2_bound, prop2_tail_bound)
from aktfourier.geometry import Frame, FrameError
from aktfourier.measures import DiscreteMeasure, RngStream, sample_iid_uniform
from aktfourier.transport import w1_exact

PI = math.pi


def torus(pts):
    return DiscreteMeasure(np.atleast_2d(np.asarray(pts, dtype=float)).reshape(len(pts), -1), Frame.FULL_TORUS)


def test_char_fn_examples():
    mu = torus([[0.3, -1.0], [2.0, 0.1]])
    assert char_fn(mu, (0, 0)) == 1.0
    delta0 = torus([[0.0, 0.0]])
    assert char_fn(delta0, (5, -3)) == 1.0
    two = torus([[0.0], [PI]])
    assert abs(char_fn(two, (1,))) < 1e-15
    assert char_fn(two, (2,)) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        char_fn(mu, (1,))
    with pytest.raises(FrameError):
        char_fn(DiscreteMeasure([[0.5]]), (1,))


def test_char_fn_unit():
    mu = DiscreteMeasure(np.random.default_rng(1).random((9, 2)))
    assert char_fn_unit(mu, (0, 0)) == 1.0
    for m in [(1, 2), (-3, 0), (4, 4)]:
        assert abs(char_fn_unit(mu, m) - char_fn(mu.to_half_torus(), m)) <= 1e-15
    assert abs(char_fn_unit(DiscreteMeasure([[0.0], [1.0]]), (1,))) < 1e-15
    with pytest.raises(FrameError):
        char_fn_unit(mu.to_half_torus(), (1, 1))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (7, 2), elements=st.floats(0, PI)),
       st.tuples(st.integers(-6, 6), st.integers(-6, 6)))
def test_char_fn_modulus_and_conjugate_symmetry(pts, m):
    mu = DiscreteMeasure(pts, Frame.HALF_TORUS)
    f = char_fn(mu, m)
    assert abs(f) <= 1 + 1e-15
    g = char_fn(mu, (-m[0], -m[1]))
    assert abs(g - f.conjugate()) <= 1e-15


@pytest.mark.parametrize("d", [1, 2, 3])
def test_char_fn_box_matches_pointwise(d):
    rng = np.random.default_rng(d)
    mu = DiscreteMeasure(rng.uniform(0, PI, (13, d)), Frame.HALF_TORUS)
    nu = DiscreteMeasure(rng.uniform(0, PI, (8, d)), Frame.HALF_TORUS)
    M = 3
    box = char_fn_box(mu, M, nu)
    for idx in np.ndindex(*box.shape):
        m = tuple(i - M for i in idx)
        assert abs(box[idx] - (char_fn(mu, m) - char_fn(nu, m))) < 1e-13


def test_lemma1_examples():
    mu = torus([[0.2], [1.0]])
    assert lemma1_bound(mu, mu, 5) == 0.0
    # m = +1 and m = -1 each contribute |1 - (-1)|^2 = 4
    assert lemma1_bound(torus([[0.0]]), torus([[PI]]), 1) == pytest.approx(math.sqrt(8), abs=1e-14)
    # the full series is 8 * sum_{odd m} 1/m^2 = pi^2, equal to W1(delta_0, delta_pi)^2
    assert lemma1_bound(torus([[0.0]]), torus([[PI]]), 20001) == pytest.approx(PI, abs=1e-4)
    with pytest.raises(ValueError):
        lemma1_bound(mu, mu, 0)


def test_lemma1_nondecreasing_in_truncation():
    x, y = sample_iid_uniform(20, 2, RngStream(3))
    X, Y = x.to_half_torus(), y.to_half_torus()
    vals = [lemma1_bound(X, Y, M) for M in range(1, 12)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_prop2_identical_measures():
    mu = DiscreteMeasure(np.random.default_rng(0).uniform(0, PI, (10, 2)), Frame.HALF_TORUS)
    for t in (0.01, 0.3):
        rep = prop2_bound(mu, mu, t)
        assert rep.main_sum == 0.0
        assert rep.total == pytest.approx(2 * math.sqrt(4 * t) + math.sqrt(rep.tail_bound))
        assert rep.tail_bound < 1e-20
        assert rep.m_max == rep.m_max_cap


def test_prop2_dominates_exact_w1():
    for s in range(15):
        x, y = sample_iid_uniform(100, 2, RngStream(500).split(s))
        X, Y = x.to_half_torus(), y.to_half_torus()
        rep = prop2_bound(X, Y, 1 / 200)
        assert rep.total >= w1_exact(X, Y, "torus").value
        assert rep.tail_bound <= 1e-3 * rep.main_sum


def test_prop2_dominates_on_full_torus():
    rng = np.random.default_rng(8)
    for _ in range(10):
        X = DiscreteMeasure(rng.uniform(-PI + 1e-9, PI, (30, 2)), Frame.FULL_TORUS)
        Y = DiscreteMeasure(rng.uniform(-PI + 1e-9, PI, (30, 2)), Frame.FULL_TORUS)
        for t in (0.002, 0.05, 0.5):
            assert prop2_bound(X, Y, t).total >= w1_exact(X, Y, "torus").value


def test_tail_halves_when_m_max_doubles():
    t, d = 0.01, 2
    for M in (1, 2, 5, 10, 20, 40):
        assert prop2_tail_bound(t, d, 2 * M) <= 0.5 * prop2_tail_bound(t, d, M)


def test_tail_bound_dominates_true_tail():
    """Bound vs a brute-force sum of the weights beyond the box (|f-g|^2 <= 4)."""
    t, d, M, big = 0.05, 2, 6, 60
    m = np.arange(-big, big + 1)
    r2 = m[:, None] ** 2 + m[None, :] ** 2
    sup = np.maximum(np.abs(m)[:, None], np.abs(m)[None, :])
    mask = sup > M
    true_tail = 4 * np.sum(np.exp(-2 * t * r2[mask]) / r2[mask])
    assert true_tail <= prop2_tail_bound(t, d, M)


def test_prop2_fixed_m_max_and_errors():
    x, y = sample_iid_uniform(30, 2, RngStream(1))
    X, Y = x.to_half_torus(), y.to_half_torus()
    rep = prop2_bound(X, Y, 0.02, m_max=5)
    assert rep.m_max == 5
    with pytest.raises(ValueError):
        prop2_bound(X, Y, 0.0)
    with pytest.raises(FrameError):
        prop2_bound(x, y, 0.1)


def test_optimize_t():
    x, y = sample_iid_uniform(60, 2, RngStream(2))
    X, Y = x.to_half_torus(), y.to_half_torus()
    grid = [0.001, 0.005, 0.02, 0.1]
    t_star, rep = optimize_t(X, Y, grid)
    assert t_star in grid
    assert all(rep.total <= prop2_bound(X, Y, t).total for t in grid)
    t_same, rep_same = optimize_t(X, X, grid)
    assert t_same == min(grid)
    with pytest.raises(ValueError):
        optimize_t(X, Y, [])


def test_optimized_not_worse_than_half_inv_n():
    n = 1000
    x, y = sample_iid_uniform(n, 2, RngStream(3))
    X, Y = x.to_half_torus(), y.to_half_torus()
    grid = default_t_grid(n, size=8)
    assert 1 / (2 * n) in grid
    _, rep = optimize_t(X, Y, grid)
    assert rep.total <= prop2_bound(X, Y, 1 / (2 * n)).total


def test_moment_bound_iid():
    """Mean over trials of |f_mu_n(m) - f_nu_n(m)|^2 stays below 4/n (+3 se)."""
    n, trials = 200, 300
    for m in [(1, 0), (1, 1), (2, 3)]:
        vals = []
        for s in range(trials):
            x, y = sample_iid_uniform(n, 2, RngStream(31).split(s))
            vals.append(abs(char_fn(x.to_half_torus(), m) - char_fn(y.to_half_torus(), m)) ** 2)
        vals = np.array(vals)
        assert vals.mean() <= 4 / n + 3 * vals.std(ddof=1) / math.sqrt(trials)
