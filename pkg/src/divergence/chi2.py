"""χ² divergence between the expert and the expert/policy mixture.

Two normalizations appear here. The mixture quantities (variational form,
optimal reward, closed form) use the regularized "2χ² with k = c/2" scale,
bounded by 1/c. ``pearson_chi2`` is the standard Σ (p − q)²/q used by the
convexity bound.
"""

from dataclasses import dataclass

import numpy as np

from src.errors import InvalidDistributionError, UnsupportedConfigurationError
from src.mdp.occupancy import StateActionDistribution

SYMMETRIC_TOL = 1e-12


def _table(d) -> np.ndarray:
    values = d.values if isinstance(d, StateActionDistribution) else np.asarray(d, dtype=float)
    if np.any(values < 0) or abs(values.sum() - 1.0) > 1e-10:
        raise InvalidDistributionError("expected a probability table")
    return values


@dataclass(frozen=True)
class MixtureSpec:
    c: float
    alpha: float
    d_expert: np.ndarray
    d_policy: np.ndarray

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        expert, policy = _table(self.d_expert), _table(self.d_policy)
        if expert.shape != policy.shape:
            raise InvalidDistributionError(f"shape mismatch: {expert.shape} vs {policy.shape}")
        object.__setattr__(self, "d_expert", expert)
        object.__setattr__(self, "d_policy", policy)

    @property
    def support(self) -> np.ndarray:
        return (self.d_expert + self.d_policy) > 0

    def _require_symmetric(self) -> None:
        if abs(self.alpha - 0.5) > SYMMETRIC_TOL:
            raise UnsupportedConfigurationError("closed forms are only available for alpha = 1/2")


def variational_objective(r: np.ndarray, spec: MixtureSpec) -> float:
    """E_dE[r] − E_dπ[r] − cα E_dE[r²] − c(1−α) E_dπ[r²] over the union support."""
    r = np.where(spec.support, np.asarray(r, dtype=float), 0.0)
    d_e, d_p = spec.d_expert, spec.d_policy
    return float(
        np.sum(d_e * r)
        - np.sum(d_p * r)
        - spec.c * spec.alpha * np.sum(d_e * r ** 2)
        - spec.c * (1.0 - spec.alpha) * np.sum(d_p * r ** 2)
    )


def optimal_reward(spec: MixtureSpec) -> np.ndarray:
    """r* = (1/c)(dE − dπ)/(dE + dπ); zero outside the support."""
    spec._require_symmetric()
    total = spec.d_expert + spec.d_policy
    ratio = np.divide(spec.d_expert - spec.d_policy, total, out=np.zeros_like(total), where=total > 0)
    return ratio / spec.c


def chi2_mixture_closed_form(spec: MixtureSpec) -> float:
    """(1/(2c)) Σ (dE − dπ)²/(dE + dπ); lies in [0, 1/c]."""
    spec._require_symmetric()
    total = spec.d_expert + spec.d_policy
    diff_sq = (spec.d_expert - spec.d_policy) ** 2
    terms = np.divide(diff_sq, total, out=np.zeros_like(total), where=total > 0)
    return float(terms.sum() / (2.0 * spec.c))


def pearson_chi2(p, q) -> float:
    """Σ (p − q)²/q; infinite when q vanishes where p is positive."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if np.any((q == 0) & (p > 0)):
        return float("inf")
    mask = q > 0
    return float(np.sum((p[mask] - q[mask]) ** 2 / q[mask]))


def chi2_convexity_bound_check(d_expert, d_policy, alpha: float, slack: float = 1e-10) -> bool:
    """χ²(dE ‖ α dE + (1−α) dπ) ≤ (1−α) χ²(dE ‖ dπ)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    d_e, d_p = _table(d_expert), _table(d_policy)
    lhs = pearson_chi2(d_e, alpha * d_e + (1.0 - alpha) * d_p)
    rhs = (1.0 - alpha) * pearson_chi2(d_e, d_p)
    return bool(np.isinf(rhs) or lhs <= rhs + slack)
