"""Critic tables and the combined entropy/regularization critic update."""

from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import xlogy

from src.errors import InvalidBatchError
from src.mdp.transitions import TransitionBatch
from src.soft_rl.policy import PolicyLike, as_probs


@dataclass
class CriticState:
    """Learnable tables.

    q is the hard Q table and q_target its slow copy. h is the entropy critic
    H^π and g the combined critic G^π = H^π + k·C; both are optional.
    entropy_cap is the running entropy-clip tracker.
    """

    q: np.ndarray
    q_target: np.ndarray
    h: Optional[np.ndarray] = None
    g: Optional[np.ndarray] = None
    step_count: int = 0
    entropy_cap: Optional[float] = None

    @classmethod
    def zeros(cls, n_states: int, n_actions: int, fill: float = 0.0, h: bool = False, g: bool = False):
        q = np.full((n_states, n_actions), float(fill))
        return cls(
            q=q,
            q_target=q.copy(),
            h=np.zeros_like(q) if h else None,
            g=np.zeros_like(q) if g else None,
        )

    def copy(self) -> "CriticState":
        return replace(
            self,
            q=self.q.copy(),
            q_target=self.q_target.copy(),
            h=None if self.h is None else self.h.copy(),
            g=None if self.g is None else self.g.copy(),
        )

    def to_dict(self) -> Dict:
        return {
            "q": self.q.tolist(),
            "q_target": self.q_target.tolist(),
            "h": None if self.h is None else self.h.tolist(),
            "g": None if self.g is None else self.g.tolist(),
            "step_count": self.step_count,
            "entropy_cap": self.entropy_cap,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "CriticState":
        def table(key):
            return None if data.get(key) is None else np.asarray(data[key], dtype=float)

        return cls(
            q=table("q"),
            q_target=table("q_target"),
            h=table("h"),
            g=table("g"),
            step_count=int(data.get("step_count", 0)),
            entropy_cap=data.get("entropy_cap"),
        )


def g_loss_and_grad(
    g: np.ndarray,
    batch: TransitionBatch,
    r_q: np.ndarray,
    k: float,
    beta: float,
    policy: PolicyLike,
    gamma: float,
    bootstrap: Optional[np.ndarray] = None,
) -> Tuple[float, np.ndarray]:
    """Mean squared G error and its semi-gradient.

    The bootstrap table (default: ``g`` itself, frozen) is treated as a
    constant, so the gradient is exact for the loss at a fixed bootstrap.
    """
    actions = batch.require_actions()
    probs = as_probs(policy)
    frozen = g if bootstrap is None else bootstrap
    next_value = (np.where(probs > 0, probs * frozen, 0.0) - beta * xlogy(probs, probs)).sum(axis=1)
    targets = k * np.asarray(r_q, dtype=float) ** 2 + gamma * next_value[batch.s_next]

    residual = g[batch.s, actions] - targets
    loss = float(np.mean(residual ** 2))
    grad = np.zeros_like(g, dtype=float)
    np.add.at(grad, (batch.s, actions), 2.0 * residual / len(batch))
    return loss, grad


def combined_critic_update(
    g: np.ndarray,
    batch: TransitionBatch,
    r_q: np.ndarray,
    k: float,
    beta: float,
    policy: PolicyLike,
    lr: float,
    gamma: float,
) -> np.ndarray:
    """One semi-gradient step on the combined critic G (no target table).

    Regresses G(s,a) towards k·r_Q² + γ E_{a'}[−β log π(a'|s') + G(s',a')].
    With k = 0 the fixed point is the entropy critic H^π.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not lr > 0:
        raise ValueError("lr must be positive")
    if len(batch) != len(r_q):
        raise InvalidBatchError("r_q must have one entry per transition")
    _, grad = g_loss_and_grad(g, batch, r_q, k, beta, policy, gamma)
    return g - lr * grad
