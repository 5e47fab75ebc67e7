"""Single-step multiple tests calibrated through the copula diagonal."""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .generator import ParametricGumbel, copula_diagonal_quantile
from .sampling import bootstrap_indices

METHODS = ("gnz", "pairwise", "bonferroni", "oracle_gumbel")


@dataclass(frozen=True)
class CalibrationResult:
    method: str
    alpha_loc: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {"method": self.method, "alpha_loc": self.alpha_loc, "diagnostics": dict(self.diagnostics)}


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False

    rejections: np.ndarray
    fwe: bool
    power: float


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def p_two_sided_normal(t, n_data: int):
    """Two-sided p-value of a N(0, 1/n_data) null: ``2 * (1 - Phi(sqrt(n) |t|))``."""
    if n_data < 1:
        raise ValueError("n_data must be >= 1")
    z = np.sqrt(n_data) * np.abs(np.asarray(t, dtype=float))
    # 2 * Phi(-z) avoids cancellation in the upper tail
    return 2.0 * ndtr(-z)


def calibrate(gen, m: int, alpha: float, method: str = "gnz") -> CalibrationResult:
    """Equal local level ``1 - Q(1 - alpha)`` with ``Q`` the diagonal quantile of ``gen``."""
    _check_alpha(alpha)
    level = 1.0 - copula_diagonal_quantile(gen, m, 1.0 - alpha)
    diagnostics = {
        "fit_failures": int(getattr(gen, "fit_failures", 1 if getattr(gen, "folded", 0) else 0)),
        "folded_atoms": int(getattr(gen, "folded", 0)),
    }
    return CalibrationResult(method, float(min(max(level, 0.0), 1.0)), diagnostics)


def calibrate_bonferroni(m: int, alpha: float) -> CalibrationResult:
    _check_alpha(alpha)
    if m < 1:
        raise ValueError("m must be >= 1")
    return CalibrationResult("bonferroni", alpha / m)


def calibrate_oracle_gumbel(theta: float, m: int, alpha: float) -> CalibrationResult:
    """Closed-form level under a Gumbel(theta) copula: ``1 - (1-alpha)**(m**(-1/theta))``."""
    _check_alpha(alpha)
    ParametricGumbel(theta)
    level = -np.expm1(m ** (-1.0 / theta) * np.log1p(-alpha))
    return CalibrationResult("oracle_gumbel", float(level))


def decide(pvals, alpha_loc: float) -> np.ndarray:
    """Reject H_j iff p_j < alpha_loc."""
    return np.asarray(pvals, dtype=float) < alpha_loc


def evaluate(rejections, truth) -> TestOutcome:
    """FWE indicator and power; ``truth[j]`` is True when H_j holds."""
    rejections = np.asarray(rejections, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if rejections.shape != truth.shape:
        raise ValueError(f"length mismatch: {rejections.shape} vs {truth.shape}")
    fwe = bool(np.any(rejections & truth))
    alt = ~truth
    power = float(rejections[alt].mean()) if alt.any() else 0.0
    return TestOutcome(rejections, fwe, power)


def bootstrap_lfc_statistics(data, B: int, seed) -> np.ndarray:
    """Bootstrap statistics ``|mean(X*_j) - mean(X_j)|``, one row per replicate."""
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    n = data.shape[0]
    if n < 2:
        raise ValueError("need at least two observations")
    idx = bootstrap_indices(n, B, seed)
    centre = data.mean(axis=0)
    out = np.empty((B, data.shape[1]))
    for b in range(B):
        out[b] = np.abs(data[idx[b]].mean(axis=0) - centre)
    return out


def realized_fwer_gumbel(theta_star: float, m: int, alpha_loc: float) -> float:
    """True FWER ``1 - (1 - alpha_loc)**(m**(1/theta*))`` under a Gumbel LFC copula."""
    ParametricGumbel(theta_star)
    if alpha_loc <= 0.0:
        return 0.0
    if alpha_loc >= 1.0:
        return 1.0
    return float(-np.expm1(m ** (1.0 / theta_star) * np.log1p(-alpha_loc)))

