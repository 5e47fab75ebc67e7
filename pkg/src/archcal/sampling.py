"""Seeded samplers: Gumbel copula, equi-correlated Gaussian data, bootstrap indices.

All functions are pure in ``(parameters, seed)``; see :mod:`archcal.rng`.
"""

import numpy as np

from .rng import Stream


def tau_to_theta(tau: float) -> float:
    """Gumbel parameter whose population Kendall's tau equals ``tau``."""
    tau = float(tau)
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"tau must lie in [0, 1), got {tau}")
    return 1.0 / (1.0 - tau)


def positive_stable(alpha: float, size: int, stream: Stream) -> np.ndarray:
    """Positive stable variates with Laplace transform ``exp(-s**alpha)``.

    Chambers-Mallows-Stuck representation with one uniform angle and one
    unit exponential per draw; requires ``0 < alpha < 1``.
    """
    angle = np.pi * stream.uniform(size)
    e = stream.exponential(size)
    a = np.sin(alpha * angle) / np.sin(angle) ** (1.0 / alpha)
    b = (np.sin((1.0 - alpha) * angle) / e) ** ((1.0 - alpha) / alpha)
    return a * b


def sample_gumbel(theta: float, m: int, n: int, seed) -> np.ndarray:
    """``n`` i.i.d. rows of the ``m``-variate Gumbel copula.

    Marshall-Olkin construction ``U_j = exp(-(E_j / V) ** (1/theta))`` with a
    positive stable frailty ``V``.  ``theta == 1`` returns independent
    uniforms directly.
    """
    theta = float(theta)
    if not theta >= 1.0:
        raise ValueError(f"theta must be >= 1, got {theta}")
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    stream = Stream(seed)
    if theta == 1.0:
        return stream.uniform((n, m))
    alpha = 1.0 / theta
    v = positive_stable(alpha, n, stream)
    e = stream.exponential((n, m))
    u = np.exp(-((e / v[:, None]) ** alpha))
    # keep inside the open unit cube so normal quantiles stay finite
    return np.clip(u, 2.0**-1000, np.nextafter(1.0, 0.0))


def sample_gauss_equicorr(rho: float, mu, n: int, seed) -> np.ndarray:
    """``n`` rows from N(mu, rho * 11' + (1 - rho) * I) via one common factor."""
    rho = float(rho)
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    m = mu.size
    stream = Stream(seed)
    common = stream.normal(n)
    own = stream.normal((n, m))
    return mu + np.sqrt(rho) * common[:, None] + np.sqrt(1.0 - rho) * own


def bootstrap_indices(n: int, B: int, seed) -> np.ndarray:
    """``B x n`` matrix of zero-based row indices drawn with replacement."""
    if n < 1 or B < 1:
        raise ValueError("n and B must be positive")
    return Stream(seed).integers(n, (B, n))
