"""Critic and policy updates of the LS-IQ training step."""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import ConfigurationError
from src.lsiq.losses import (
    iq_loss_and_grad,
    iqv0_loss_and_grad,
    loss_curvature,
    ls_loss_and_grad,
    sqil_loss_and_grad,
)
from src.lsiq.operators import entropy_bonuses, implicit_reward, target_soft_values
from src.lsiq.settings import Algorithm, LsIqConfig, TargetUpdateKind
from src.mdp.transitions import TransitionBatch
from src.soft_rl.critics import CriticState, combined_critic_update
from src.soft_rl.policy import Policy, maxent_policy

logger = logging.getLogger(__name__)


def init_critic(n_states: int, n_actions: int, cfg: LsIqConfig) -> CriticState:
    fill = cfg.q_min if cfg.pessimistic_init else 0.0
    return CriticState.zeros(
        n_states,
        n_actions,
        fill=fill,
        h=cfg.use_entropy_critic and not cfg.use_regularization_critic,
        g=cfg.use_regularization_critic,
    )


def entropy_clip_update(
    tracker: Optional[float], policy_batch_entropy_bonuses: Sequence[float], decay: float = 0.99
) -> Tuple[float, float]:
    """EMA of the per-batch maximum policy entropy bonus.

    The first batch initializes the tracker. Returns (tracker, cap); the cap
    equals the updated tracker.
    """
    bonuses = np.asarray(policy_batch_entropy_bonuses, dtype=float)
    if bonuses.size == 0:
        if tracker is None:
            raise ValueError("cannot initialize the entropy tracker from an empty batch")
        return tracker, tracker
    batch_max = float(bonuses.max())
    updated = batch_max if tracker is None else decay * tracker + (1.0 - decay) * batch_max
    return updated, updated


def update_target(critic: CriticState, cfg: LsIqConfig) -> None:
    rule = cfg.target_update
    if rule.kind is TargetUpdateKind.HARD:
        if critic.step_count % rule.period == 0:
            critic.q_target = critic.q.copy()
    else:
        critic.q_target = (1.0 - rule.tau) * critic.q_target + rule.tau * critic.q


def loss_and_grad(
    critic: CriticState,
    expert_batch: TransitionBatch,
    policy_batch: TransitionBatch,
    policy: Policy,
    cfg: LsIqConfig,
    initial_dist: Optional[np.ndarray] = None,
):
    if cfg.algorithm is Algorithm.LSIQ:
        return ls_loss_and_grad(critic, expert_batch, policy_batch, policy, cfg)
    if cfg.algorithm is Algorithm.SQIL:
        return sqil_loss_and_grad(critic, expert_batch, policy_batch, policy, cfg)
    if cfg.algorithm is Algorithm.IQ:
        return iq_loss_and_grad(critic, expert_batch, policy_batch, policy, cfg)
    if initial_dist is None:
        raise ConfigurationError("IQv0 needs the initial state distribution")
    return iqv0_loss_and_grad(critic, expert_batch, policy_batch, policy, cfg, initial_dist)


def entry_step_sizes(curvature: np.ndarray, cfg: LsIqConfig) -> np.ndarray:
    """Step size per Q entry.

    A plain step uses lr_q but never moves an entry past the minimizer of its
    own quadratic (step 1/curvature), so a pair that fills the batch cannot
    overshoot. A normalized step moves every touched entry the fraction lr_q
    of the way to that minimizer. Untouched entries keep lr_q.
    """
    touched = curvature > 0
    if cfg.normalized_step:
        return np.divide(cfg.lr_q, curvature, out=np.full(curvature.shape, cfg.lr_q), where=touched)
    newton = np.divide(1.0, curvature, out=np.full(curvature.shape, np.inf), where=touched)
    return np.minimum(cfg.lr_q, newton)


def critic_update(
    critic: CriticState,
    expert_batch: TransitionBatch,
    policy_batch: TransitionBatch,
    policy: Policy,
    cfg: LsIqConfig,
    initial_dist: Optional[np.ndarray] = None,
) -> Tuple[CriticState, float]:
    """One Q step; returns the new critic and the loss before the step.

    With clipped targets the LS-IQ table is kept inside [q_min, q_max].
    """
    updated = critic.copy()
    if cfg.entropy_clip:
        bonuses = entropy_bonuses(policy, cfg.beta)[policy_batch.s_next]
        updated.entropy_cap, _ = entropy_clip_update(updated.entropy_cap, bonuses, cfg.entropy_clip_decay)

    loss, grad = loss_and_grad(updated, expert_batch, policy_batch, policy, cfg, initial_dist)
    curvature = loss_curvature(updated.q.shape, expert_batch, policy_batch, cfg)
    updated.q = updated.q - entry_step_sizes(curvature, cfg) * grad
    if cfg.clip_targets and cfg.algorithm is Algorithm.LSIQ:
        updated.q = np.clip(updated.q, cfg.q_min, cfg.q_max)
    updated.step_count += 1
    update_target(updated, cfg)
    return updated, loss


def critic_step(
    critic: CriticState,
    expert_batch: TransitionBatch,
    policy_batch: TransitionBatch,
    policy: Policy,
    cfg: LsIqConfig,
    initial_dist: Optional[np.ndarray] = None,
) -> CriticState:
    """Gradient step with lr_q on the loss selected by cfg.algorithm, then the target update."""
    return critic_update(critic, expert_batch, policy_batch, policy, cfg, initial_dist)[0]


def auxiliary_critic_step(critic: CriticState, policy_batch: TransitionBatch, policy: Policy, cfg: LsIqConfig) -> CriticState:
    """Update G (regularization critic on) or H (entropy critic only).

    The squared implicit reward uses the LS-IQ operator on policy samples.
    """
    if not cfg.critic_carries_entropy:
        return critic
    updated = critic.copy()
    k = cfg.k if cfg.use_regularization_critic else 0.0
    if cfg.use_regularization_critic:
        v_policy = target_soft_values(updated.q_target, policy, cfg, expert_side=False, clip=cfg.clip_targets)
        r_q = implicit_reward(updated, policy_batch, v_policy, cfg, expert_side=False)
    else:
        r_q = np.zeros(len(policy_batch))

    table_name = "g" if cfg.use_regularization_critic else "h"
    table = getattr(updated, table_name)
    if table is None:
        raise ConfigurationError(f"critic table '{table_name}' is required by the configuration")
    setattr(updated, table_name, combined_critic_update(table, policy_batch, r_q, k, cfg.beta, policy, cfg.lr_g, cfg.gamma))
    return updated


def policy_improvement(critic: CriticState, cfg: LsIqConfig) -> Policy:
    """Softmax of Q† = q + (g or h) at temperature β; greedy when β = 0."""
    q_dagger = critic.q
    if cfg.use_regularization_critic:
        if critic.g is None:
            raise ConfigurationError("regularization critic enabled but critic.g is missing")
        q_dagger = critic.q + critic.g
    elif cfg.use_entropy_critic:
        if critic.h is None:
            raise ConfigurationError("entropy critic enabled but critic.h is missing")
        q_dagger = critic.q + critic.h

    if cfg.beta == 0:
        greedy = np.zeros_like(q_dagger)
        greedy[np.arange(q_dagger.shape[0]), np.argmax(q_dagger, axis=1)] = 1.0
        return Policy(greedy)
    return maxent_policy(q_dagger, cfg.beta)
