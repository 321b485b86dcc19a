"""Coordinate frames and the flat-torus metric on (-pi, pi]^d."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class Frame(enum.Enum):
    """Where a point cloud lives.

    UNIT_CUBE is [0, 1]^d, HALF_TORUS is [0, pi]^d (the unit cube scaled by
    pi) and FULL_TORUS is (-pi, pi]^d.
    """

    UNIT_CUBE = "unit"
    HALF_TORUS = "half_torus"
    FULL_TORUS = "torus"

    @property
    def is_torus(self) -> bool:
        return self is not Frame.UNIT_CUBE


class FrameError(ValueError):
    """Raised when an operation receives data in the wrong coordinate frame."""


def check_in_frame(coords, frame: Frame) -> None:
    """Raise FrameError unless every coordinate satisfies the frame's range."""
    a = np.asarray(coords, dtype=float)
    if not np.all(np.isfinite(a)):
        raise FrameError("coordinates must be finite")
    if frame is Frame.UNIT_CUBE:
        ok = np.all((a >= 0.0) & (a <= 1.0))
    elif frame is Frame.HALF_TORUS:
        ok = np.all((a >= 0.0) & (a <= math.pi))
    else:
        ok = np.all((a > -math.pi) & (a <= math.pi))
    if not ok:
        raise FrameError(f"coordinates outside the {frame.name} range")


@dataclass(frozen=True)
class Point:
    coords: tuple[float, ...]
    frame: Frame = Frame.FULL_TORUS

    def __post_init__(self):
        coords = tuple(float(c) for c in np.atleast_1d(self.coords))
        if len(coords) < 1:
            raise ValueError("a point needs at least one coordinate")
        check_in_frame(coords, self.frame)
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)


def wrap(y):
    """Periodization map: y - 2*pi*k with pi(2k-1) < y <= pi(2k+1).

    Works elementwise on arrays. The result lies in (-pi, pi], differs from
    y by a multiple of 2*pi, and never exceeds |y| in absolute value.
    """
    y_arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y_arr)):
        raise ValueError("wrap requires finite input")
    k = np.ceil((y_arr - math.pi) / TWO_PI)
    r = y_arr - TWO_PI * k
    # rounding in the division can land one window off
    r = np.where(r <= -math.pi, r + TWO_PI, r)
    r = np.where(r > math.pi, r - TWO_PI, r)
    if np.ndim(y) == 0:
        return float(r)
    return r


def _circle_dist(x, y):
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    return np.minimum(d, TWO_PI - d)


def circle_distance(x: float, y: float) -> float:
    """Geodesic distance on the circle R / 2piZ for x, y in (-pi, pi]."""
    check_in_frame([x, y], Frame.FULL_TORUS)
    return float(_circle_dist(x, y))


def _coords(p):
    if isinstance(p, Point):
        return np.asarray(p.coords), p.frame
    return np.atleast_1d(np.asarray(p, dtype=float)), None


def torus_distance(x, y) -> float:
    """rho_d(x, y): Euclidean combination of per-axis circle distances.

    Accepts Points (torus frames only) or plain coordinate sequences, which
    are taken to be in (-pi, pi]^d.
    """
    xc, xf = _coords(x)
    yc, yf = _coords(y)
    for f in (xf, yf):
        if f is not None and not f.is_torus:
            raise FrameError("torus_distance needs torus-frame points")
    if xc.shape != yc.shape:
        raise ValueError(f"dimension mismatch: {xc.shape} vs {yc.shape}")
    check_in_frame(xc, Frame.FULL_TORUS)
    check_in_frame(yc, Frame.FULL_TORUS)
    return float(math.sqrt(math.fsum(_circle_dist(xc, yc) ** 2)))


def to_half_torus(p: Point) -> Point:
    """Scale a unit-cube point by pi."""
    if p.frame is not Frame.UNIT_CUBE:
        raise FrameError(f"expected a UNIT_CUBE point, got {p.frame.name}")
    return Point(tuple(math.pi * c for c in p.coords), Frame.HALF_TORUS)


def pairwise_cost(xs: np.ndarray, ys: np.ndarray, metric: str = "euclidean") -> np.ndarray:
    """Dense (n, m) distance matrix between two point arrays of shape (n, d), (m, d).

    Axes are accumulated in a fixed order so the result is bit-stable.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 2 or ys.ndim != 2 or xs.shape[1] != ys.shape[1]:
        raise ValueError("point arrays must be 2-D with matching dimension")
    sq = np.zeros((xs.shape[0], ys.shape[0]))
    for ax in range(xs.shape[1]):
        diff = np.abs(xs[:, ax][:, None] - ys[:, ax][None, :])
        if metric == "torus":
            np.minimum(diff, TWO_PI - diff, out=diff)
        elif metric != "euclidean":
            raise ValueError(f"unknown metric {metric!r}")
        sq += diff * diff
    return np.sqrt(sq)
