"""Mixture χ² divergence: closed form, variational form and bounds."""

from src.divergence.chi2 import (
    MixtureSpec,
    chi2_convexity_bound_check,
    chi2_mixture_closed_form,
    optimal_reward,
    pearson_chi2,
    variational_objective,
)

__all__ = [
    "MixtureSpec",
    "chi2_convexity_bound_check",
    "chi2_mixture_closed_form",
    "optimal_reward",
    "pearson_chi2",
    "variational_objective",
]
