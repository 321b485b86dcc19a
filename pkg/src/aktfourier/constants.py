"""Closed-form rate constants and the subset-sampling variance identity."""

from __future__ import annotations

import math

import numpy as np


def quantitative_bound(delta: float, d: int) -> float:
    """Upper bound on E W1(mu, nu) on [0, 1]^d when E|f_mu(pi m) - f_nu(pi m)|^2 <= delta^2.

    delta                          if d = 1
    5 delta sqrt(1 + log(4/delta^2)) if d = 2
    10 sqrt(d) delta^(2/d)          if d >= 3
    """
    if not 0.0 <= delta <= 2.0:
        raise ValueError(f"delta must lie in [0, 2], got {delta}")
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        return float(delta)
    if d == 2:
        if delta == 0.0:
            return 0.0
        return 5.0 * delta * math.sqrt(1.0 + math.log(4.0 / delta**2))
    return 10.0 * math.sqrt(d) * delta ** (2.0 / d)


def akt_upper_constants(n: int, d: int) -> float:
    """Explicit bound on E W1(mu_n, nu_n) for two n-samples (published constants)."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if d == 1:
        return 2.0 / math.sqrt(n)
    if d == 2:
        return 10.0 * math.sqrt((1.0 + math.log(n)) / n)
    return 16.0 * math.sqrt(d) / n ** (1.0 / d)


def subset_constants(n: int, d: int) -> float:
    """Explicit bound on E W1(mu_tau, mu) for a uniform n-subset of fixed atoms."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if d == 1:
        return math.sqrt(2.0 / n)
    if d == 2:
        return 8.0 * math.sqrt((1.0 + math.log(2 * n)) / n)
    return 13.0 * math.sqrt(d) / n ** (1.0 / d)


def mixing_delta_sq(n: int, alpha_sum: float) -> float:
    """4/n + (128/n) * sum_l alpha(l): second-moment bound under strong mixing."""
    return 4.0 / n + 128.0 * alpha_sum / n


def subset_variance(u_values, n: int) -> float:
    """Variance of L_u(tau) = (1/n) sum_{j in tau} u(x_j) over uniform n-subsets tau.

    Closed form (N - n) / (2 n N^2 (N - 1)) * sum_{i,j} |u_i - u_j|^2, with
    the double sum evaluated as 2 N sum_i |u_i - mean(u)|^2.
    """
    u = np.asarray(u_values)
    N = u.size
    if N < 2:
        raise ValueError("need at least two atoms")
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    dev = u - u.mean()
    pair_sum = 2.0 * N * math.fsum(np.abs(dev) ** 2)
    return (N - n) / (2.0 * n * N**2 * (N - 1)) * pair_sum
