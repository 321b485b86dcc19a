"""Theta-type lattice series with rigorous truncation bounds.

Notation: Theta(s) = sum_{m in Z} exp(-s m^2) and Theta_M(s) is the partial
sum over |m| <= M. All lattice truncations are over the sup-norm box
|m|_inf <= M, so tails factor through one-dimensional theta sums.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

_EPS = np.finfo(float).eps
# cap on lattice points enumerated by a direct sum
LATTICE_BUDGET = 30_000_000


@dataclass(frozen=True)
class SeriesValue:
    value: float
    error: float
    terms: int = 0
    reference_bound: float | None = None

    @property
    def lower(self) -> float:
        return self.value - self.error

    @property
    def upper(self) -> float:
        return self.value + self.error

    def within_reference(self) -> bool:
        """True when value - error respects ``reference_bound``."""
        return self.reference_bound is None or self.lower <= self.reference_bound


def _check_t(t: float) -> None:
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"t must be positive and finite, got {t}")


def theta_partial(s: float, M: int) -> float:
    """Theta_M(s) = 1 + 2 sum_{m=1}^M exp(-s m^2)."""
    m = np.arange(1, M + 1, dtype=float)
    return 1.0 + 2.0 * math.fsum(np.exp(-s * m * m))


def theta_tail_bound(s: float, M: int) -> float:
    """Upper bound on sum_{|m|>M} exp(-s m^2), by comparison with an integral."""
    return math.sqrt(math.pi / s) * math.exp(-s * M * M)


def box_tail_bound(s: float, d: int, M: int, power: float = 0.0) -> float:
    """Upper bound on sum_{|m|_inf > M} |m|^-power exp(-s |m|^2).

    Outside the box |m| >= |m|_inf > M, so the weight is at most M^-power,
    and the unweighted tail is Theta(s)^d - Theta_M(s)^d, which is bounded
    by expanding (Theta_M + tau)^d with tau the 1-D tail bound.
    """
    if M < 1 and power > 0:
        raise ValueError("M must be >= 1 for a weighted tail")
    th = theta_partial(s, M)
    tau = theta_tail_bound(s, M)
    acc = math.fsum(math.comb(d, l) * th ** (d - l) * tau**l for l in range(1, d + 1))
    return acc / (M**power if power else 1.0)


def _axis_sq(M: int) -> np.ndarray:
    m = np.arange(-M, M + 1, dtype=float)
    return m * m


def lattice_norm_sq(M: int, d: int) -> np.ndarray:
    """|m|^2 on the box {-M..M}^d, as a d-dimensional array."""
    q = _axis_sq(M)
    out = np.zeros((2 * M + 1,) * d)
    for ax in range(d):
        shape = [1] * d
        shape[ax] = 2 * M + 1
        out = out + q.reshape(shape)
    return out


def lattice_sum(t: float, d: int, M: int, power: float = 0.0) -> float:
    """sum over 0 < |m|_inf <= M of |m|^-power exp(-t |m|^2), by enumeration.

    Enumerates 2-D slices so memory stays O(M^2) for any d.
    """
    q = _axis_sq(M)
    if d == 1:
        sl = [q]
        lead_iter = [()]
    else:
        plane = q[:, None] + q[None, :]
        lead_iter = itertools.product(range(2 * M + 1), repeat=d - 2)
    parts = []
    for lead in lead_iter:
        base = sum(q[i] for i in lead) if lead else 0.0
        r2 = (plane + base) if d > 1 else sl[0]
        with np.errstate(divide="ignore"):
            w = np.exp(-t * r2)
            if power:
                w = w / r2 ** (power / 2.0)
        w = np.where(r2 == 0.0, 0.0, w)
        parts.append(float(np.sum(w)))
    return math.fsum(parts)


def _choose_box(t: float, d: int, power: float, target: float, m_max: int | None) -> int:
    if m_max is not None:
        return int(m_max)
    budget = max(1, int((LATTICE_BUDGET ** (1.0 / d) - 1) // 2))
    M = max(1, math.ceil(math.sqrt(36.0 / t)))
    while box_tail_bound(t, d, M, power) > target and M < budget:
        M = min(budget, math.ceil(1.25 * M) + 1)
    return min(M, budget)


def direct_lattice_series(t: float, d: int, power: float = 0.0, m_max: int | None = None,
                          rel_tol: float = 1e-15) -> SeriesValue:
    """sum_{m != 0} |m|^-power exp(-t |m|^2) by direct box enumeration plus tail bound."""
    _check_t(t)
    if d < 1:
        raise ValueError("d must be >= 1")
    # the 2d nearest lattice points already contribute 2d exp(-t)
    target = rel_tol * 2 * d * math.exp(-t)
    M = _choose_box(t, d, power, target, m_max)
    value = lattice_sum(t, d, M, power)
    terms = (2 * M + 1) ** d - 1
    err = float(box_tail_bound(t, d, M, power) + 4 * terms * _EPS * value)
    return SeriesValue(value, err, terms)


def t1_upper_bound(t: float) -> float:
    """(2 + sqrt(pi/t)) exp(-t), an upper bound on T_1(t)."""
    return (2.0 + math.sqrt(math.pi / t)) * math.exp(-t)


def t1_series(t: float) -> SeriesValue:
    """T_1(t) = sum_{m != 0} exp(-m^2 t) = 2 sum_{m >= 1} exp(-m^2 t)."""
    _check_t(t)
    K = math.ceil(math.sqrt(40.0 / t)) + 1
    m = np.arange(1, K + 1, dtype=float)
    value = 2.0 * math.fsum(np.exp(-t * m * m))
    # 2 sum_{m>K} exp(-t m^2) <= 2 int_K^inf exp(-t x^2) dx
    tail = math.sqrt(math.pi / t) * math.erfc(K * math.sqrt(t))
    err = float(tail + 2 * K * _EPS * value)
    return SeriesValue(value, err, K, t1_upper_bound(t))


def td_upper_bound(t: float, d: int) -> float:
    """2^d (2 + sqrt(pi/t))^d exp(-t)."""
    return 2.0**d * (2.0 + math.sqrt(math.pi / t)) ** d * math.exp(-t)


def t_d_series(t: float, d: int) -> SeriesValue:
    """T_d(t) = sum_{m in Z^d, m != 0} exp(-|m|^2 t), via (1 + T_1(t))^d - 1."""
    if d < 1:
        raise ValueError("d must be >= 1")
    t1 = t1_series(t)
    v = t1.value
    value = math.expm1(d * math.log1p(v))
    # (1+v+e)^d - (1+v)^d = (1+v)^d * expm1(d log1p(e/(1+v)))
    prop = (1.0 + v) ** d * math.expm1(d * math.log1p(t1.error / (1.0 + v)))
    err = float(prop + 4 * d * _EPS * (value + 1.0))
    return SeriesValue(value, err, t1.terms, td_upper_bound(t, d))


def s_d_series(t: float, d: int, m_max: int | None = None) -> SeriesValue:
    """S~_d(t) = sum_{m != 0} exp(-|m|^2 t) / |m|^2.

    For t >= pi the value is also compared against 6^d exp(-t).
    """
    sv = direct_lattice_series(t, d, power=2.0, m_max=m_max)
    ref = 6.0**d * math.exp(-t) if t >= math.pi else None
    return SeriesValue(sv.value, sv.error, sv.terms, ref)
