"""Exact and iterative solvers for soft and hard Bellman equations."""

import logging

import numpy as np
from scipy.special import logsumexp, xlogy

from src.errors import ConvergenceError, InvalidTemperatureError
from src.mdp.tabular import TabularMdp
from src.soft_rl.policy import PolicyLike, as_probs

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 100_000


def absorbing_soft_values(mdp: TabularMdp, reward: np.ndarray, beta: float) -> np.ndarray:
    """Closed-form soft value of each absorbing state, zero elsewhere.

    An absorbing state loops on itself, so V = β·LSE(r(s_A,·)/β) + γV, i.e.
    V(s_A) = β·LSE(r(s_A,·)/β)/(1−γ); for an action-independent reward this
    is (r_A + β log|A|)/(1−γ).
    """
    values = np.zeros(mdp.n_states)
    if mdp.absorbing.any():
        rows = reward[mdp.absorbing]
        values[mdp.absorbing] = beta * logsumexp(rows / beta, axis=1) / (1.0 - mdp.gamma)
    return values


def _soft_backup(mdp: TabularMdp, reward: np.ndarray, q: np.ndarray, beta: float, v_absorbing: np.ndarray):
    v = beta * logsumexp(q / beta, axis=1)
    v = np.where(mdp.absorbing, v_absorbing, v)
    return reward + mdp.gamma * mdp.transition @ v


def soft_value_iteration(
    mdp: TabularMdp,
    reward: np.ndarray,
    beta: float,
    tol: float = 1e-10,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> np.ndarray:
    """Iterate the soft Bellman operator to a sup-norm residual ≤ tol.

    Returns the soft Q table Q̃; π* = maxent_policy(Q̃, β).

    Raises:
        ConvergenceError: budget exhausted, with the last residual.
    """
    if not beta > 0:
        raise InvalidTemperatureError(f"beta must be positive, got {beta}")
    if not tol > 0:
        raise ValueError("tol must be positive")

    reward = np.asarray(reward, dtype=float)
    v_absorbing = absorbing_soft_values(mdp, reward, beta)
    q = np.zeros_like(reward)
    residual = np.inf
    for iteration in range(1, max_iterations + 1):
        q_new = _soft_backup(mdp, reward, q, beta, v_absorbing)
        residual = float(np.max(np.abs(q_new - q)))
        q = q_new
        # a γ-contraction: one more backup moves q by at most γ·residual
        if mdp.gamma * residual <= tol:
            logger.debug(f"Soft value iteration converged in {iteration} iterations (residual {residual:.2e})")
            return q
    raise ConvergenceError("soft value iteration did not converge", residual, max_iterations)


def value_iteration(
    mdp: TabularMdp, reward: np.ndarray, tol: float = 1e-10, max_iterations: int = DEFAULT_MAX_ITERATIONS
) -> np.ndarray:
    """Hard (β → 0) value iteration; oracle for expert quality checks."""
    reward = np.asarray(reward, dtype=float)
    v_absorbing = np.zeros(mdp.n_states)
    if mdp.absorbing.any():
        v_absorbing[mdp.absorbing] = reward[mdp.absorbing].max(axis=1) / (1.0 - mdp.gamma)
    q = np.zeros_like(reward)
    residual = np.inf
    for _ in range(max_iterations):
        v = np.where(mdp.absorbing, v_absorbing, q.max(axis=1))
        q_new = reward + mdp.gamma * mdp.transition @ v
        residual = float(np.max(np.abs(q_new - q)))
        q = q_new
        if mdp.gamma * residual <= tol:
            return q
    raise ConvergenceError("value iteration did not converge", residual, max_iterations)


def _solve_state_action(mdp: TabularMdp, probs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = mdp.n_states * mdp.n_actions
    system = np.eye(n) - mdp.gamma * mdp.state_action_transition(probs)
    return np.linalg.solve(system, rhs.reshape(n)).reshape(mdp.n_states, mdp.n_actions)


def policy_evaluation_hard(mdp: TabularMdp, reward: np.ndarray, policy: PolicyLike) -> np.ndarray:
    """Q^π = r + γ P Π Q^π by direct solve (no entropy bonus)."""
    probs = as_probs(policy)
    return _solve_state_action(mdp, probs, np.asarray(reward, dtype=float))


def _entropy_bonus(probs: np.ndarray, beta: float) -> np.ndarray:
    return -beta * xlogy(probs, probs).sum(axis=1)


def entropy_critic(mdp: TabularMdp, policy: PolicyLike, beta: float) -> np.ndarray:
    """H^π(s,a) = γ E_{s'}[β·ent(π(·|s')) + E_{a'} H^π(s',a')].

    Zero for deterministic policies; Q̃^π = Q^π + H^π for every reward.
    """
    probs = as_probs(policy)
    rhs = mdp.gamma * mdp.transition @ _entropy_bonus(probs, beta)
    return _solve_state_action(mdp, probs, rhs)


def policy_evaluation_soft(mdp: TabularMdp, reward: np.ndarray, policy: PolicyLike, beta: float) -> np.ndarray:
    """Soft Q̃^π solved as a single system with the entropy bonus in the value."""
    probs = as_probs(policy)
    rhs = np.asarray(reward, dtype=float) + mdp.gamma * mdp.transition @ _entropy_bonus(probs, beta)
    return _solve_state_action(mdp, probs, rhs)
