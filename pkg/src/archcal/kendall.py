"""Pseudo-observations and the (modified) empirical Kendall distribution function."""

from dataclasses import dataclass

import numpy as np

_BLOCK = 1 << 22


@dataclass(frozen=True)
class KendallDF:
    """Right-continuous step distribution function on [0, 1].

    ``atoms`` are strictly ascending, ``cumulative[j]`` is K(atoms[j]) and the
    last cumulative value is 1.
    """

    atoms: np.ndarray
    cumulative: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        cumulative = np.asarray(self.cumulative, dtype=float)
        if atoms.ndim != 1 or atoms.shape != cumulative.shape or atoms.size == 0:
            raise ValueError("atoms and cumulative must be equal-length 1-d arrays")
        if np.any(np.diff(atoms) <= 0):
            raise ValueError("atoms must be strictly ascending")
        if np.any(np.diff(cumulative) < 0) or cumulative[-1] != 1.0:
            raise ValueError("cumulative values must be non-decreasing and end at 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "cumulative", cumulative)

    @property
    def masses(self) -> np.ndarray:
        return np.diff(self.cumulative, prepend=0.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        j = np.searchsorted(self.atoms, t, side="right")
        out = np.where(j > 0, self.cumulative[np.maximum(j - 1, 0)], 0.0)
        return np.where(t >= 1.0, 1.0, out)


def pseudo_observations(sample) -> np.ndarray:
    """Strict componentwise dominance counts scaled by ``n + 1``.

    ``W_i = #{j != i : X_j < X_i in every coordinate} / (n + 1)``.  Ties never
    count as dominance.
    """
    x = np.asarray(sample, dtype=float)
    if x.ndim != 2:
        raise ValueError("sample must be a 2-d array")
    n, m = x.shape
    if n < 2 or m < 2:
        raise ValueError(f"need n >= 2 rows and m >= 2 columns, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    counts = np.empty(n, dtype=np.int64)
    rows = max(1, _BLOCK // n)
    for start in range(0, n, rows):
        block = x[start:start + rows]
        dom = x[None, :, 0] < block[:, None, 0]
        for col in range(1, m):
            if not dom.any():
                break
            dom &= x[None, :, col] < block[:, None, col]
        counts[start:start + rows] = dom.sum(axis=1)
    return counts / (n + 1.0)


def empirical_kendall_df(w) -> KendallDF:
    """Empirical df of ``w``, adjusted so that it is itself a Kendall df.

    Each cumulative value is raised to at least the next atom (1 after the
    last one), which gives K(t) >= t.  An atom at 0 carrying the mass below the
    smallest observation is added when ``min(w) > 0``.
    """
    w = np.asarray(w, dtype=float).ravel()
    if w.size == 0:
        raise ValueError("w must not be empty")
    if np.any((w < 0.0) | (w >= 1.0)) or not np.all(np.isfinite(w)):
        raise ValueError("pseudo-observations must lie in [0, 1)")
    atoms, counts = np.unique(w, return_counts=True)
    cumulative = np.cumsum(counts) / w.size
    if atoms[0] > 0.0:
        atoms = np.concatenate(([0.0], atoms))
        cumulative = np.concatenate(([0.0], cumulative))
    upper = np.append(atoms[1:], 1.0)
    cumulative = np.maximum.accumulate(np.maximum(cumulative, upper))
    cumulative[-1] = 1.0
    return KendallDF(atoms, cumulative)


def kendall_df_gumbel_2d(theta: float, t):
    """Bivariate Gumbel Kendall df ``t - t log(t) / theta`` (0 at t = 0)."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = t - t * np.log(t) / theta
    out = np.where(t > 0.0, k, 0.0)
    return out if out.ndim else float(out)
