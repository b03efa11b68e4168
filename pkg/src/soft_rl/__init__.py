"""Maximum-entropy RL primitives: policies, Bellman solvers and critics."""

from src.soft_rl.policy import Policy, as_probs, log_sum_exp_value, maxent_policy, soft_value
from src.soft_rl.solvers import (
    entropy_critic,
    policy_evaluation_hard,
    policy_evaluation_soft,
    soft_value_iteration,
    value_iteration,
)
from src.soft_rl.critics import CriticState, combined_critic_update, g_loss_and_grad

__all__ = [
    "Policy",
    "as_probs",
    "log_sum_exp_value",
    "maxent_policy",
    "soft_value",
    "entropy_critic",
    "policy_evaluation_hard",
    "policy_evaluation_soft",
    "soft_value_iteration",
    "value_iteration",
    "CriticState",
    "combined_critic_update",
    "g_loss_and_grad",
]
