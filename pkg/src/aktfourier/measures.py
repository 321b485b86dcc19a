"""Uniform empirical measures, seeded samplers, and heat-kernel smoothing."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .geometry import Frame, FrameError, Point, check_in_frame, wrap


@dataclass(frozen=True)
class DiscreteMeasure:
    """(1/n) * sum of Dirac masses at the rows of ``points``.

    Repeated rows are allowed; every row carries weight 1/n.
    """

    points: np.ndarray
    frame: Frame = Frame.UNIT_CUBE

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("a measure needs at least one point of dimension >= 1")
        check_in_frame(pts, self.frame)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n, 1.0 / self.n)

    def to_half_torus(self) -> "DiscreteMeasure":
        if self.frame is not Frame.UNIT_CUBE:
            raise FrameError(f"expected UNIT_CUBE measure, got {self.frame.name}")
        return DiscreteMeasure(math.pi * self.points, Frame.HALF_TORUS)

    @classmethod
    def from_points(cls, pts: Sequence[Point]) -> "DiscreteMeasure":
        pts = list(pts)
        if not pts:
            raise ValueError("empty point list")
        frames = {p.frame for p in pts}
        dims = {p.dim for p in pts}
        if len(frames) != 1 or len(dims) != 1:
            raise FrameError("points must share one frame and dimension")
        return cls(np.array([p.coords for p in pts]), frames.pop())


@dataclass(frozen=True)
class RngStream:
    """Counter-based (Philox) stream addressed by a root seed and a key path.

    ``split`` derives an independent child stream; streams with distinct keys
    never share state, so trials can run in any order or process.
    """

    seed: int
    key: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def split(self, *index: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(int(i) for i in index))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.key)
        return np.random.Generator(np.random.Philox(ss))


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return RngStream(int(rng)).generator()


def _check_n(n: int) -> None:
    if int(n) < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")


def sample_iid_uniform(n: int, d: int, rng) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Two independent n-point uniform samples on [0, 1]^d."""
    _check_n(n)
    if d < 1:
        raise ValueError("dimension must be >= 1")
    g = _gen(rng)
    xy = g.random((2, n, d))
    return DiscreteMeasure(xy[0]), DiscreteMeasure(xy[1])


def sample_iid_custom(n: int, draw: Callable[[np.random.Generator, int], np.ndarray], rng):
    """Two independent n-point samples from a caller-supplied sampler.

    ``draw(generator, n)`` must return an (n, d) array with entries in [0, 1].
    """
    _check_n(n)
    g = _gen(rng)
    return DiscreteMeasure(draw(g, n)), DiscreteMeasure(draw(g, n))


# named samplers usable from experiment configs; signature (generator, n, d)
CUSTOM_SAMPLERS: dict[str, Callable] = {
    "uniform": lambda g, n, d: g.random((n, d)),
    "beta22": lambda g, n, d: g.beta(2.0, 2.0, size=(n, d)),
}


# -- rotation sequence -------------------------------------------------------

_U64 = np.uint64


def _rotation_phases(n: int, g: np.random.Generator) -> np.ndarray:
    """frac(k*w1 + w2), k = 1..n, evaluated exactly on the 2^-64 grid."""
    a, b = g.integers(0, 2**64, size=2, dtype=np.uint64, endpoint=False)
    k = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        u = k * a + b  # wraps mod 2^64
    return u


def _phase_to_unit(u: np.ndarray) -> np.ndarray:
    return (u >> _U64(11)).astype(np.float64) * 2.0**-53


def deinterleave_map(d: int) -> Callable[[np.ndarray], np.ndarray]:
    """Map s in [0, 1) to [0, 1)^d by dealing out the binary digits of s.

    Pushes the uniform law on [0, 1) to the uniform law on the cube (up to
    the 53-bit resolution of s), which makes it a convenient default U.
    """
    bits_per_axis = 53 // d

    def U(s):
        s = np.asarray(s, dtype=float)
        b = np.floor(s * 2.0**53).astype(np.uint64)
        out = np.zeros((s.shape[0], d))
        for ax in range(d):
            acc = np.zeros(s.shape[0], dtype=np.uint64)
            for j in range(bits_per_axis):
                shift = _U64(52 - (j * d + ax))
                bit = (b >> shift) & _U64(1)
                acc = (acc << _U64(1)) | bit
            out[:, ax] = acc.astype(float) * 2.0**-bits_per_axis
        return out

    return U


def default_rotation_maps(d: int = 2):
    """Default (U, V): digit de-interleaving, and the same map after a half turn.

    Both push the uniform law to the uniform law on [0, 1]^d, so X_k and Y_k
    are equidistributed. This choice is ours; nothing forces it.
    """
    U = deinterleave_map(d)

    def V(s):
        return U(np.mod(np.asarray(s) + 0.5, 1.0))

    return U, V


def sample_rotation_sequence(n: int, U=None, V=None, rng=0, d: int = 2):
    """X_k = U(frac(k w1 + w2)), Y_k = V(frac(k w1 + w2)) with (w1, w2) uniform.

    The couples (X_k, Y_k) are stationary and pairwise independent but far
    from independent. ``U`` and ``V`` take an array of phases in [0, 1) and
    return an (n, d) array in [0, 1]^d.
    """
    _check_n(n)
    if U is None or V is None:
        dU, dV = default_rotation_maps(d)
        U = U or dU
        V = V or dV
    g = _gen(rng)
    s = _phase_to_unit(_rotation_phases(n, g))
    xs = np.asarray(U(s), dtype=float).reshape(n, -1)
    ys = np.asarray(V(s), dtype=float).reshape(n, -1)
    return DiscreteMeasure(xs), DiscreteMeasure(ys)


def identity_map(s):
    return np.asarray(s, dtype=float)[:, None]


# -- renewal mixing chain ----------------------------------------------------

def sample_renewal_mixing(n: int, d: int, rho_mix: float, rng):
    """Stationary chain of pairs: copy the previous pair w.p. rho_mix, else redraw.

    A fresh pair has X and Y independent and uniform on [0, 1]^d. The strong
    mixing coefficients satisfy alpha(l) <= rho_mix^l.
    """
    _check_n(n)
    if not 0.0 < rho_mix < 1.0:
        raise ValueError(f"rho_mix must lie in (0, 1), got {rho_mix}")
    g = _gen(rng)
    fresh = g.random((2, n, d))
    keep = g.random(n) < rho_mix
    keep[0] = False
    idx = np.where(keep, 0, np.arange(n))
    idx = np.maximum.accumulate(idx)
    return DiscreteMeasure(fresh[0][idx]), DiscreteMeasure(fresh[1][idx])


def mixing_alpha_sum(rho_mix: float) -> float:
    """sum_{l>=1} rho^l, the bound on sum alpha(l) for the renewal chain."""
    return rho_mix / (1.0 - rho_mix)


# -- subsets of fixed atoms --------------------------------------------------

def _atom_array(atoms) -> np.ndarray:
    if isinstance(atoms, DiscreteMeasure):
        if atoms.frame is not Frame.UNIT_CUBE:
            raise FrameError("atoms must be in the UNIT_CUBE frame")
        return atoms.points
    if len(atoms) and isinstance(atoms[0], Point):
        return DiscreteMeasure.from_points(atoms).points
    arr = np.asarray(atoms, dtype=float)
    return arr[:, None] if arr.ndim == 1 else arr


def random_subset(N: int, n: int, rng) -> np.ndarray:
    """Sorted indices of a uniformly random n-subset of range(N)."""
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    g = _gen(rng)
    return np.sort(g.permutation(N)[:n])


def subset_empirical(atoms, n: int, rng) -> DiscreteMeasure:
    """mu_tau for tau drawn uniformly among the n-subsets of the atom indices."""
    pts = _atom_array(atoms)
    tau = random_subset(pts.shape[0], n, rng)
    return DiscreteMeasure(pts[tau])


def average_measure(atoms) -> DiscreteMeasure:
    """(1/N) sum_j delta_{x_j}."""
    pts = _atom_array(atoms)
    if pts.shape[0] == 0:
        raise ValueError("empty atom list")
    return DiscreteMeasure(pts)


# -- heat kernel smoothing ---------------------------------------------------

def smooth_sample(mu: DiscreteMeasure, t: float, rng) -> DiscreteMeasure:
    """One draw from mu * gamma_t: add N(0, 2t) noise per axis and wrap."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if not mu.frame.is_torus:
        raise FrameError("smooth_sample needs a torus-frame measure")
    g = _gen(rng)
    noise = g.normal(0.0, math.sqrt(2.0 * t), size=mu.points.shape)
    return DiscreteMeasure(wrap(mu.points + noise), Frame.FULL_TORUS)


# -- point CSV files ---------------------------------------------------------

def read_points_csv(path) -> DiscreteMeasure:
    """Read a header-less CSV of points in [0, 1]^d (one point per row)."""
    path = Path(path)
    rows = []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: no points")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: rows have different lengths")
    try:
        return DiscreteMeasure(np.array(rows), Frame.UNIT_CUBE)
    except FrameError as exc:
        raise FrameError(f"{path}: {exc}") from None


def write_points_csv(mu: DiscreteMeasure, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in mu.points:
            w.writerow([repr(float(v)) for v in row])
