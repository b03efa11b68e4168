"""Tabular stochastic policies and softmax extraction."""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import logsumexp, softmax, xlogy

from src.errors import InvalidPolicyError, InvalidTemperatureError

ROW_TOL = 1e-12


@dataclass(frozen=True)
class Policy:
    """Per-state action distribution.

    Attributes:
        probs: Array (S, A); each row sums to 1.
        beta: Temperature the policy was extracted with, if any.
    """

    probs: np.ndarray
    beta: Optional[float] = None

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 2:
            raise InvalidPolicyError(f"policy table must be 2-D, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise InvalidPolicyError("policy entries must be finite and nonnegative")
        deviation = np.max(np.abs(probs.sum(axis=1) - 1.0))
        if deviation > ROW_TOL:
            raise InvalidPolicyError(f"policy rows must sum to 1 (max deviation {deviation:.2e})")
        object.__setattr__(self, "probs", probs)

    @property
    def n_states(self) -> int:
        return self.probs.shape[0]

    @property
    def n_actions(self) -> int:
        return self.probs.shape[1]

    def entropy(self) -> np.ndarray:
        """Shannon entropy per state (nats)."""
        return -xlogy(self.probs, self.probs).sum(axis=1)

    def greedy_actions(self) -> np.ndarray:
        """Mode action per state; ties go to the lowest action id."""
        return np.argmax(self.probs, axis=1)

    def greedy(self) -> "Policy":
        one_hot = np.zeros_like(self.probs)
        one_hot[np.arange(self.n_states), self.greedy_actions()] = 1.0
        return Policy(one_hot)

    def sample(self, s: int, rng: np.random.Generator) -> int:
        return int(rng.choice(self.n_actions, p=self.probs[s]))

    @classmethod
    def uniform(cls, n_states: int, n_actions: int) -> "Policy":
        return cls(np.full((n_states, n_actions), 1.0 / n_actions))


PolicyLike = Union[Policy, np.ndarray]


def as_probs(policy: PolicyLike) -> np.ndarray:
    """Validated (S, A) probability table from a Policy or raw array."""
    if isinstance(policy, Policy):
        return policy.probs
    return Policy(policy).probs


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise InvalidTemperatureError(f"beta must be positive, got {beta}")


def maxent_policy(q_soft: np.ndarray, beta: float) -> Policy:
    """π(a|s) ∝ exp(q_soft(s, a) / β)."""
    _check_beta(beta)
    q_soft = np.asarray(q_soft, dtype=float)
    if not np.all(np.isfinite(q_soft)):
        raise InvalidPolicyError("q_soft must be finite")
    probs = softmax(q_soft / beta, axis=1)
    # renormalize so rows meet the 1e-12 contract after float rounding
    probs /= probs.sum(axis=1, keepdims=True)
    return Policy(probs, beta=beta)


def soft_value(q_soft: np.ndarray, policy: PolicyLike, beta: float) -> np.ndarray:
    """Ṽ(s) = Σ_a π(a|s) (q(s,a) − β log π(a|s)); zero-probability actions drop out."""
    probs = as_probs(policy)
    q_soft = np.asarray(q_soft, dtype=float)
    expected_q = np.where(probs > 0, probs * q_soft, 0.0).sum(axis=1)
    return expected_q - beta * xlogy(probs, probs).sum(axis=1)


def log_sum_exp_value(q_soft: np.ndarray, beta: float) -> np.ndarray:
    """β log Σ_a exp(q/β), the soft value of the softmax policy."""
    _check_beta(beta)
    return beta * logsumexp(np.asarray(q_soft, dtype=float) / beta, axis=1)
