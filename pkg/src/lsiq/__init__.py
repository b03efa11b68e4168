"""LS-IQ losses, operators and training-step updates, plus SQIL / IQ baselines."""

from src.lsiq.settings import (
    Algorithm,
    LsIqConfig,
    Operator,
    RewardTargets,
    TargetUpdate,
    ValueTarget,
    q_bounds,
    reward_targets,
)
from src.lsiq.operators import bootstrap_values, forward_backup, implicit_reward, target_soft_values
from src.lsiq.losses import (
    iq_loss_and_grad,
    iqv0_loss_and_grad,
    ls_loss_and_grad,
    loss_curvature,
    ls_targets,
    objective_identity_check,
    sqil_loss_and_grad,
)
from src.lsiq.agent import (
    auxiliary_critic_step,
    critic_step,
    critic_update,
    entropy_clip_update,
    init_critic,
    policy_improvement,
)

__all__ = [
    "Algorithm",
    "LsIqConfig",
    "Operator",
    "RewardTargets",
    "TargetUpdate",
    "ValueTarget",
    "q_bounds",
    "reward_targets",
    "bootstrap_values",
    "forward_backup",
    "implicit_reward",
    "target_soft_values",
    "iq_loss_and_grad",
    "iqv0_loss_and_grad",
    "ls_loss_and_grad",
    "loss_curvature",
    "ls_targets",
    "objective_identity_check",
    "sqil_loss_and_grad",
    "auxiliary_critic_step",
    "critic_step",
    "critic_update",
    "entropy_clip_update",
    "init_critic",
    "policy_improvement",
]
