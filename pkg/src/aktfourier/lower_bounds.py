"""Per-instance lower bounds on W1 and the c(n, t), e(n, t) diagnostic series."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Frame, FrameError
from .measures import DiscreteMeasure
from .series import SeriesValue, direct_lattice_series, s_d_series

KINDS = ("OneDimSum", "MeanShift", "DistToSample")
MAX_QUADRATURE_DIM = 4
_QUERY_CHUNK = 1 << 18


@dataclass(frozen=True)
class LowerBoundReport:
    kind: str
    value: float
    quadrature_error: float = 0.0

    @property
    def certified(self) -> float:
        """value - quadrature_error, clipped at zero."""
        return max(0.0, self.value - self.quadrature_error)


def lower_1d_statistic(xs, ys) -> LowerBoundReport:
    """(1/n) |sum_k (x_k - y_k)|, a lower bound on W1 of the two samples on the line."""
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.shape != ys.shape:
        raise ValueError(f"length mismatch ({xs.size} vs {ys.size})")
    if xs.size == 0:
        raise ValueError("empty samples")
    return LowerBoundReport("OneDimSum", abs(math.fsum(xs - ys)) / xs.size)


def mean_shift_statistic(mu: DiscreteMeasure, nu: DiscreteMeasure) -> LowerBoundReport:
    """|mean(mu) - mean(nu)|: the linear test function in the direction of the shift.

    Valid in any dimension for the Euclidean metric, hence also for torus
    measures supported in [0, pi]^d.
    """
    if mu.dim != nu.dim or mu.frame is not nu.frame:
        raise ValueError("measures must share frame and dimension")
    shift = mu.points.mean(axis=0) - nu.points.mean(axis=0)
    return LowerBoundReport("MeanShift", float(math.sqrt(math.fsum(shift**2))))


def _midpoints(res: int, d: int) -> np.ndarray:
    c = (np.arange(res) + 0.5) / res
    grids = np.meshgrid(*([c] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def dist_to_sample_integral(sample: DiscreteMeasure, grid_resolution: int) -> LowerBoundReport:
    """Midpoint-rule integral over [0,1]^d of x -> distance to the nearest sample point.

    The integrand is 1-Lipschitz, so the midpoint rule is off by at most
    h sqrt(d) / 2 with h = 1/grid_resolution; value minus that error is a
    certified lower bound on W1(sample, Lebesgue measure on the cube).
    """
    if sample.frame is not Frame.UNIT_CUBE:
        raise FrameError("dist_to_sample_integral needs a UNIT_CUBE sample")
    d = sample.dim
    if d > MAX_QUADRATURE_DIM:
        raise ValueError(f"grid quadrature supports d <= {MAX_QUADRATURE_DIM}, got {d}")
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be >= 2")
    tree = cKDTree(sample.points)
    grid = _midpoints(int(grid_resolution), d)
    parts = []
    for start in range(0, grid.shape[0], _QUERY_CHUNK):
        dist, _ = tree.query(grid[start:start + _QUERY_CHUNK])
        parts.append(float(np.sum(dist)))
    value = math.fsum(parts) / grid.shape[0]
    h = 1.0 / grid_resolution
    return LowerBoundReport("DistToSample", value, h * math.sqrt(d) / 2.0)


def dist_to_sample_discrete(sample: DiscreteMeasure, target: DiscreteMeasure) -> LowerBoundReport:
    """Exact mean over target atoms of the distance to the sample's support.

    Lower bound on W1(sample, target) for any uniform discrete target.
    """
    if sample.frame is not target.frame or sample.dim != target.dim:
        raise ValueError("measures must share frame and dimension")
    dist, _ = cKDTree(sample.points).query(target.points)
    return LowerBoundReport("DistToSample", math.fsum(dist) / target.n)


def _check(n: int, t: float) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")


def c_series(n: int, t: float, d: int) -> SeriesValue:
    """c(n, t) = (1/n) sum_{m != 0} (2/|m|^2) exp(-2|m|^2 t) = (2/n) S~_d(2t)."""
    _check(n, t)
    s = s_d_series(2.0 * t, d)
    return SeriesValue(2.0 * s.value / n, 2.0 * s.error / n, s.terms)


def e_series(n: int, t: float, d: int) -> SeriesValue:
    """e(n, t) = (1/n^3) (sum_{m != 0} exp(-|m|^2 t) / |m|)^4."""
    _check(n, t)
    s = direct_lattice_series(t, d, power=1.0)
    v, e = s.value, s.error
    value = v**4 / n**3
    err = ((v + e) ** 4 - v**4) / n**3
    return SeriesValue(value, float(err), s.terms)
