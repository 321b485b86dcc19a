"""Exact W1 between equal-size uniform empirical measures."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geometry import Frame, FrameError, pairwise_cost
from .measures import DiscreteMeasure

MAX_DENSE_N = 8192
MAX_BRUTEFORCE_N = 9
METRICS = ("euclidean", "torus")


@dataclass(frozen=True)
class MatchingResult:
    value: float
    permutation: np.ndarray
    metric: str
    frame: Frame

    def recompute(self, mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
        """Average matched distance under ``permutation``, from scratch."""
        c = pairwise_cost(mu.points, nu.points[self.permutation], self.metric)
        return float(np.mean(np.diag(c)))


def _check_pair(mu: DiscreteMeasure, nu: DiscreteMeasure, metric: str) -> None:
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    if mu.n != nu.n:
        raise ValueError(f"measures must have equal point counts ({mu.n} vs {nu.n})")
    if mu.dim != nu.dim:
        raise ValueError(f"dimension mismatch ({mu.dim} vs {nu.dim})")
    if mu.frame is not nu.frame:
        raise FrameError(f"frame mismatch ({mu.frame.name} vs {nu.frame.name})")
    if metric == "torus" and not mu.frame.is_torus:
        raise FrameError("the torus metric needs HALF_TORUS or FULL_TORUS measures")


def _matched_mean(cost: np.ndarray, perm: np.ndarray) -> float:
    return float(np.sum(cost[np.arange(cost.shape[0]), perm]) / cost.shape[0])


def w1_exact(mu: DiscreteMeasure, nu: DiscreteMeasure, metric: str = "euclidean") -> MatchingResult:
    """Optimal matching cost via a shortest-augmenting-path assignment solver.

    The value is contractual; among tied optima the permutation returned is
    whichever the solver reaches first.
    """
    _check_pair(mu, nu, metric)
    if mu.n > MAX_DENSE_N:
        raise ValueError(f"n={mu.n} exceeds the dense solver cap of {MAX_DENSE_N}")
    cost = pairwise_cost(mu.points, nu.points, metric)
    _, perm = linear_sum_assignment(cost)
    return MatchingResult(_matched_mean(cost, perm), perm, metric, mu.frame)


def w1_bruteforce(mu: DiscreteMeasure, nu: DiscreteMeasure, metric: str = "euclidean") -> MatchingResult:
    """Minimum over all n! permutations. Test oracle; n <= 9."""
    _check_pair(mu, nu, metric)
    n = mu.n
    if n > MAX_BRUTEFORCE_N:
        raise ValueError(f"brute force is limited to n <= {MAX_BRUTEFORCE_N}, got {n}")
    cost = pairwise_cost(mu.points, nu.points, metric)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    totals = cost[np.arange(n), perms].sum(axis=1)
    best = perms[int(np.argmin(totals))]
    return MatchingResult(_matched_mean(cost, best), best, metric, mu.frame)


def w1_1d(xs, ys) -> float:
    """W1 on the line by the monotone (sorted) coupling, O(n log n)."""
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.shape != ys.shape:
        raise ValueError(f"length mismatch ({xs.size} vs {ys.size})")
    if xs.size == 0:
        raise ValueError("empty samples")
    for a in (xs, ys):
        if not np.all((a >= 0.0) & (a <= 1.0)):
            raise ValueError("1-D samples must lie in [0, 1]")
    return float(np.mean(np.abs(np.sort(xs) - np.sort(ys))))


def w1_cdf_integral(xs, ys) -> float:
    """W1 on [0, 1] as the integral of |F_x - F_y|, evaluated piecewise exactly.

    Independent of the sorted-pairing route; used as a cross-check.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    n = xs.size
    knots = np.sort(np.concatenate([xs, ys, [0.0, 1.0]]))
    left = knots[:-1]
    Fx = np.searchsorted(np.sort(xs), left, side="right")
    Fy = np.searchsorted(np.sort(ys), left, side="right")
    return math.fsum(np.abs(Fx - Fy) * np.diff(knots)) / n
