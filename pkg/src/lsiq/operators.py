"""Inverse and forward Bellman operators with absorbing-state handling.

Under the IQ operator an absorbing next state contributes nothing to the
bootstrap. Under the LS-IQ operator it contributes the closed-form value
r_A/(1−γ), with r_A = r_max on expert samples and r_min on policy samples.
"""

from typing import Optional

import numpy as np
from scipy.special import logsumexp, xlogy

from src.lsiq.settings import LsIqConfig, Operator, ValueTarget
from src.mdp.tabular import TabularMdp
from src.mdp.transitions import TransitionBatch
from src.soft_rl.critics import CriticState
from src.soft_rl.policy import PolicyLike, as_probs


def entropy_bonuses(policy: PolicyLike, beta: float) -> np.ndarray:
    """β·H(π(·|s)) per state."""
    probs = as_probs(policy)
    return -beta * xlogy(probs, probs).sum(axis=1)


def target_soft_values(
    q_table: np.ndarray,
    policy: PolicyLike,
    cfg: LsIqConfig,
    expert_side: bool = False,
    entropy_cap: Optional[float] = None,
    clip: bool = False,
) -> np.ndarray:
    """V̂(s) computed from a (target) Q table.

    The entropy bonus is left out when an entropy or regularization critic
    carries it. On expert samples the bonus is capped at ``entropy_cap``
    when entropy clipping is on. With ``clip`` the table and the resulting
    values are kept inside [q_min, q_max].
    """
    probs = as_probs(policy)
    q_table = np.asarray(q_table, dtype=float)
    if clip:
        q_table = np.clip(q_table, cfg.q_min, cfg.q_max)

    soft = cfg.beta > 0 and not cfg.critic_carries_entropy
    if cfg.value_target is ValueTarget.OPTIMAL:
        values = cfg.beta * logsumexp(q_table / cfg.beta, axis=1) if soft else q_table.max(axis=1)
    else:
        values = np.where(probs > 0, probs * q_table, 0.0).sum(axis=1)
        if soft:
            bonus = entropy_bonuses(probs, cfg.beta)
            if expert_side and cfg.entropy_clip and entropy_cap is not None:
                bonus = np.minimum(bonus, entropy_cap)
            values = values + bonus

    if clip:
        values = np.clip(values, cfg.q_min, cfg.q_max)
    return values


def absorbing_value(cfg: LsIqConfig, expert_side: bool, operator: Optional[Operator] = None) -> float:
    operator = cfg.operator if operator is None else operator
    if operator is Operator.IQ_OPERATOR:
        return 0.0
    return (cfg.r_max if expert_side else cfg.r_min) / (1.0 - cfg.gamma)


def bootstrap_values(
    batch: TransitionBatch,
    soft_values: np.ndarray,
    cfg: LsIqConfig,
    expert_side: bool,
    operator: Optional[Operator] = None,
) -> np.ndarray:
    """γ((1−ν)V(s') + ν·V_A) per transition."""
    nu = batch.absorbing.astype(float)
    v_next = np.asarray(soft_values, dtype=float)[batch.s_next]
    v_absorbing = absorbing_value(cfg, expert_side, operator)
    return cfg.gamma * ((1.0 - nu) * v_next + nu * v_absorbing)


def implicit_reward(
    critic: CriticState,
    batch: TransitionBatch,
    soft_values: np.ndarray,
    cfg: LsIqConfig,
    expert_side: bool,
    operator: Optional[Operator] = None,
    q_table: Optional[np.ndarray] = None,
) -> np.ndarray:
    """r_Q(s,a) = Q(s,a) − γ((1−ν)V(s') + ν·V_A) per transition."""
    actions = batch.require_actions()
    q = critic.q if q_table is None else q_table
    return q[batch.s, actions] - bootstrap_values(batch, soft_values, cfg, expert_side, operator)


def forward_backup(q: np.ndarray, mdp: TabularMdp, reward: np.ndarray, policy: PolicyLike) -> np.ndarray:
    """(B Q)(s,a) = r + γ E_{s'}[(1−ν)Σ_a' π Q(s',a') + ν Σ_a' π r(s',a')/(1−γ)].

    Q^π is its fixed point and it is a γ-contraction in sup norm.
    """
    probs = as_probs(policy)
    reward = np.asarray(reward, dtype=float)
    v_policy = (probs * q).sum(axis=1)
    v_absorbing = (probs * reward).sum(axis=1) / (1.0 - mdp.gamma)
    v_next = np.where(mdp.absorbing, v_absorbing, v_policy)
    return reward + mdp.gamma * mdp.transition @ v_next
