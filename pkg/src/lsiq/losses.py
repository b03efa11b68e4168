"""Critic losses with exact gradients in the Q table.

Targets are treated as constants: they are computed from the target table
and the current (fixed) policy, so every gradient here is exact for the loss
value returned alongside it.
"""

import logging
from typing import Tuple

import numpy as np

from src.errors import InvalidBatchError
from src.lsiq.operators import bootstrap_values, entropy_bonuses, target_soft_values
from src.lsiq.settings import Algorithm, LsIqConfig, Operator
from src.mdp.tabular import TabularMdp
from src.mdp.transitions import TransitionBatch
from src.soft_rl.critics import CriticState
from src.soft_rl.policy import PolicyLike, as_probs, soft_value

logger = logging.getLogger(__name__)

LossAndGrad = Tuple[float, np.ndarray]


def _check_batches(expert_batch: TransitionBatch, policy_batch: TransitionBatch):
    if len(expert_batch) == 0 or len(policy_batch) == 0:
        raise InvalidBatchError("expert and policy batches must be non-empty")
    return expert_batch.require_actions(), policy_batch.require_actions()


def _least_squares(
    q: np.ndarray,
    expert_batch: TransitionBatch,
    policy_batch: TransitionBatch,
    expert_targets: np.ndarray,
    policy_targets: np.ndarray,
    alpha: float,
) -> LossAndGrad:
    a_e, a_p = _check_batches(expert_batch, policy_batch)
    res_e = q[expert_batch.s, a_e] - expert_targets
    res_p = q[policy_batch.s, a_p] - policy_targets

    loss = alpha * np.mean(res_e ** 2) + (1.0 - alpha) * np.mean(res_p ** 2)
    grad = np.zeros_like(q, dtype=float)
    np.add.at(grad, (expert_batch.s, a_e), 2.0 * alpha * res_e / len(expert_batch))
    np.add.at(grad, (policy_batch.s, a_p), 2.0 * (1.0 - alpha) * res_p / len(policy_batch))
    return float(loss), grad


def ls_targets(
    critic: CriticState,
    expert_batch: TransitionBatch,
    policy_batch: TransitionBatch,
    policy: PolicyLike,
    cfg: LsIqConfig,
) -> Tuple[np.ndarray, np.ndarray]:
    """Regression targets (T_E, T_π) of the LS-IQ objective.

    T_E is q_max under fixed expert targets, otherwise r_max plus the
    bootstrap; T_π is r_min plus the bootstrap, which is q_min on absorbing
    transitions under the LS-IQ operator.
    """
    clip = cfg.clip_targets
    v_expert = target_soft_values(
        critic.q_target, policy, cfg, expert_side=True, entropy_cap=critic.entropy_cap, clip=clip
    )
    v_policy = target_soft_values(critic.q_target, policy, cfg, expert_side=False, clip=clip)

    if cfg.fixed_expert_target:
        expert_targets = np.full(len(expert_batch), cfg.q_max)
    else:
        expert_targets = cfg.r_max + bootstrap_values(expert_batch, v_expert, cfg, expert_side=True)
    policy_targets = cfg.r_min + bootstrap_values(policy_batch, v_policy, cfg, expert_side=False)

    if clip:
        expert_targets = np.clip(expert_targets, cfg.q_min, cfg.q_max)
        policy_targets = np.clip(policy_targets, cfg.q_min, cfg.q_max)
    return expert_targets, policy_targets


def ls_loss_and_grad(
    critic: CriticState,
    expert_batch: TransitionBatch,
    policy_batch: TransitionBatch,
    policy: PolicyLike,
    cfg: LsIqConfig,
) -> LossAndGrad:
    """α·mean_E (Q − T_E)² + (1−α)·mean_π (Q − T_π)²."""
    _check_batches(expert_batch, policy_batch)
    expert_targets, policy_targets = ls_targets(critic, expert_batch, policy_batch, policy, cfg)
    return _least_squares(critic.q, expert_batch, policy_batch, expert_targets, policy_targets, cfg.alpha)


def sqil_loss_and_grad(
    critic: CriticState,
    expert_batch: TransitionBatch,
    policy_batch: TransitionBatch,
    policy: PolicyLike,
    cfg: LsIqConfig,
) -> LossAndGrad:
    """SQIL: constant rewards (1, 0), or (r_max, r_min) when symmetric.

    Absorbing transitions are plain terminals (no analytic value) and targets
    are never clipped.
    """
    _check_batches(expert_batch, policy_batch)
    r_expert, r_policy = (cfg.r_max, cfg.r_min) if cfg.sqil_symmetric else (1.0, 0.0)
    v_expert = target_soft_values(critic.q_target, policy, cfg, expert_side=True, entropy_cap=critic.entropy_cap)
    v_policy = target_soft_values(critic.q_target, policy, cfg, expert_side=False)
    expert_targets = r_expert + bootstrap_values(expert_batch, v_expert, cfg, True, Operator.IQ_OPERATOR)
    policy_targets = r_policy + bootstrap_values(policy_batch, v_policy, cfg, False, Operator.IQ_OPERATOR)
    return _least_squares(critic.q, expert_batch, policy_batch, expert_targets, policy_targets, cfg.alpha)


def _iq_rewards(critic: CriticState, expert_batch, policy_batch, policy, cfg: LsIqConfig):
    a_e, a_p = _check_batches(expert_batch, policy_batch)
    v_expert = target_soft_values(critic.q_target, policy, cfg, expert_side=True, entropy_cap=critic.entropy_cap)
    v_policy = target_soft_values(critic.q_target, policy, cfg, expert_side=False)
    r_e = critic.q[expert_batch.s, a_e] - bootstrap_values(expert_batch, v_expert, cfg, True, Operator.IQ_OPERATOR)
    r_p = critic.q[policy_batch.s, a_p] - bootstrap_values(policy_batch, v_policy, cfg, False, Operator.IQ_OPERATOR)
    return a_e, a_p, r_e, r_p


def iq_loss_and_grad(
    critic: CriticState,
    expert_batch: TransitionBatch,
    policy_batch: TransitionBatch,
    policy: PolicyLike,
    cfg: LsIqConfig,
) -> LossAndGrad:
    """Negated IQ objective with the mixture χ² regularizer.

    −(mean_E r − mean_π r − cα mean_E r² − c(1−α) mean_π r²), with r the
    implicit reward under the IQ operator.
    """
    a_e, a_p, r_e, r_p = _iq_rewards(critic, expert_batch, policy_batch, policy, cfg)
    c, alpha = cfg.c, cfg.alpha
    loss = -(np.mean(r_e) - np.mean(r_p) - c * alpha * np.mean(r_e ** 2) - c * (1 - alpha) * np.mean(r_p ** 2))

    grad = np.zeros_like(critic.q, dtype=float)
    np.add.at(grad, (expert_batch.s, a_e), -(1.0 - 2.0 * c * alpha * r_e) / len(expert_batch))
    np.add.at(grad, (policy_batch.s, a_p), (1.0 + 2.0 * c * (1 - alpha) * r_p) / len(policy_batch))
    return float(loss), grad


def iqv0_loss_and_grad(
    critic: CriticState,
    expert_batch: TransitionBatch,
    policy_batch: TransitionBatch,
    policy: PolicyLike,
    cfg: LsIqConfig,
    initial_dist: np.ndarray,
) -> LossAndGrad:
    """IQ with the policy term telescoped into (1−γ)·E_μ0[V(s0)].

    V(s0) is the soft value of the online table, so it carries gradient
    (1−γ)·μ0(s)·π(a|s). The χ² regularizer stays on the sampled batches.
    """
    a_e, a_p, r_e, r_p = _iq_rewards(critic, expert_batch, policy_batch, policy, cfg)
    probs = as_probs(policy)
    initial_dist = np.asarray(initial_dist, dtype=float)
    if initial_dist.shape != (critic.q.shape[0],):
        raise InvalidBatchError("initial_dist must have one entry per state")

    bonus = 0.0 if cfg.critic_carries_entropy else entropy_bonuses(probs, cfg.beta)
    v0 = np.where(probs > 0, probs * critic.q, 0.0).sum(axis=1) + bonus
    c, alpha = cfg.c, cfg.alpha
    initial_term = (1.0 - cfg.gamma) * float(initial_dist @ v0)
    loss = -(np.mean(r_e) - initial_term - c * alpha * np.mean(r_e ** 2) - c * (1 - alpha) * np.mean(r_p ** 2))

    grad = (1.0 - cfg.gamma) * initial_dist[:, None] * probs
    np.add.at(grad, (expert_batch.s, a_e), -(1.0 - 2.0 * c * alpha * r_e) / len(expert_batch))
    np.add.at(grad, (policy_batch.s, a_p), 2.0 * c * (1 - alpha) * r_p / len(policy_batch))
    return float(loss), grad


def loss_curvature(
    q_shape: Tuple[int, int],
    expert_batch: TransitionBatch,
    policy_batch: TransitionBatch,
    cfg: LsIqConfig,
) -> np.ndarray:
    """Diagonal second derivative of the selected loss in the Q table.

    Every loss is quadratic in each visited entry once targets are fixed:
    2w_E·n_E(s,a)/N_E + 2w_π·n_π(s,a)/N_π, with (w_E, w_π) = (α, 1−α) for the
    least-squares losses and (cα, c(1−α)) for IQ and IQv0. Entries outside
    both batches get 0.
    """
    a_e, a_p = _check_batches(expert_batch, policy_batch)
    if cfg.algorithm in (Algorithm.IQ, Algorithm.IQV0):
        w_e, w_p = cfg.c * cfg.alpha, cfg.c * (1.0 - cfg.alpha)
    else:
        w_e, w_p = cfg.alpha, 1.0 - cfg.alpha
    n_cells = int(np.prod(q_shape))
    expert_counts = np.bincount(np.ravel_multi_index((expert_batch.s, a_e), q_shape), minlength=n_cells)
    policy_counts = np.bincount(np.ravel_multi_index((policy_batch.s, a_p), q_shape), minlength=n_cells)
    curvature = 2.0 * w_e * expert_counts / len(expert_batch) + 2.0 * w_p * policy_counts / len(policy_batch)
    return curvature.reshape(q_shape)


def objective_identity_check(
    q: np.ndarray,
    mdp: TabularMdp,
    policy: PolicyLike,
    d_expert: np.ndarray,
    d_policy: np.ndarray,
    cfg: LsIqConfig,
) -> Tuple[float, float, float]:
    """Evaluate the IQ objective J, the least-squares objective L and K.

    Both use r_Q = Q − γ P Ṽ with Ṽ the soft value of ``q`` under the fixed
    policy. Completing the square gives J = K − c·L exactly.
    """
    probs = as_probs(policy)
    q = np.asarray(q, dtype=float)
    d_e = getattr(d_expert, "values", d_expert)
    d_p = getattr(d_policy, "values", d_policy)
    c, alpha, beta = cfg.c, cfg.alpha, cfg.beta

    v = soft_value(q, probs, beta)
    r_q = q - mdp.gamma * mdp.transition @ v
    # H(π) = E_dπ[−log π(a|s)]; actions the policy never takes contribute nothing
    neg_log = -np.log(np.where(probs > 0, probs, 1.0))
    entropy = float(np.sum(d_p * neg_log))

    j = (
        np.sum(d_e * r_q)
        - np.sum(d_p * r_q)
        - c * alpha * np.sum(d_e * r_q ** 2)
        - c * (1 - alpha) * np.sum(d_p * r_q ** 2)
        - beta * entropy
    )
    l = alpha * np.sum(d_e * (r_q - cfg.r_max) ** 2) + (1 - alpha) * np.sum(d_p * (r_q - cfg.r_min) ** 2)
    l += beta / c * entropy
    k = 1.0 / (4.0 * alpha * c) + 1.0 / (4.0 * (1.0 - alpha) * c)
    return float(j), float(l), float(k)
