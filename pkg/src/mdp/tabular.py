"""Finite MDP container.

Transitions are stored densely as a (S, A, S) tensor. Absorbing states
self-loop under every action; their value is handled analytically by the
solvers and operators that consume this class.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.errors import InvalidEnvironmentError

logger = logging.getLogger(__name__)

ROW_TOL = 1e-12


@dataclass(frozen=True)
class TabularMdp:
    """Finite discounted MDP with absorbing-state flags.

    Attributes:
        transition: Array (S, A, S) of next-state probabilities.
        absorbing: Boolean flag per state (the ν indicator lives here).
        initial_dist: Start distribution μ0.
        gamma: Discount factor in (0, 1), or 0 for myopic checks.
        true_reward: Optional (S, A) task reward, only used for experts and evaluation.
        goal: Boolean flag per state; absorbing goal states count as success.
    """

    transition: np.ndarray
    absorbing: np.ndarray
    initial_dist: np.ndarray
    gamma: float
    true_reward: Optional[np.ndarray] = None
    goal: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        transition = np.asarray(self.transition, dtype=float)
        absorbing = np.asarray(self.absorbing, dtype=bool)
        initial = np.asarray(self.initial_dist, dtype=float)
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "absorbing", absorbing)
        object.__setattr__(self, "initial_dist", initial)

        if transition.ndim != 3 or transition.shape[0] != transition.shape[2]:
            raise InvalidEnvironmentError(f"transition must have shape (S, A, S), got {transition.shape}")
        n_states, n_actions = transition.shape[:2]
        if n_states == 0 or n_actions == 0:
            raise InvalidEnvironmentError("MDP needs at least one state and one action")
        if absorbing.shape != (n_states,) or initial.shape != (n_states,):
            raise InvalidEnvironmentError("absorbing and initial_dist must have one entry per state")
        if not 0.0 <= self.gamma < 1.0:
            raise InvalidEnvironmentError(f"gamma must lie in [0, 1), got {self.gamma}")
        if np.any(transition < 0) or np.max(np.abs(transition.sum(axis=2) - 1.0)) > ROW_TOL:
            raise InvalidEnvironmentError("every transition row must be a probability vector")

        for s in np.flatnonzero(absorbing):
            if not np.allclose(transition[s, :, s], 1.0, atol=ROW_TOL, rtol=0.0):
                raise InvalidEnvironmentError(f"absorbing state {s} must self-transition with probability 1")

        if np.any(initial < 0) or abs(initial.sum() - 1.0) > ROW_TOL:
            raise InvalidEnvironmentError("initial_dist must sum to 1")
        # Degenerate MDPs made only of absorbing states may start in one.
        if not absorbing.all() and initial[absorbing].sum() > 0.0:
            raise InvalidEnvironmentError("initial_dist must assign zero mass to absorbing states")

        if self.true_reward is not None:
            reward = np.asarray(self.true_reward, dtype=float)
            if reward.shape != (n_states, n_actions):
                raise InvalidEnvironmentError("true_reward must have shape (S, A)")
            object.__setattr__(self, "true_reward", reward)

        goal = np.zeros(n_states, dtype=bool) if self.goal is None else np.asarray(self.goal, dtype=bool)
        if goal.shape != (n_states,) or np.any(goal & ~absorbing):
            raise InvalidEnvironmentError("goal flags must mark absorbing states only")
        object.__setattr__(self, "goal", goal)

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[1]

    @property
    def hazard(self) -> np.ndarray:
        """Absorbing states that are not goals."""
        return self.absorbing & ~self.goal

    def sample_initial_state(self, rng: np.random.Generator) -> int:
        return int(rng.choice(self.n_states, p=self.initial_dist))

    def sample_next_state(self, s: int, a: int, rng: np.random.Generator) -> int:
        return int(rng.choice(self.n_states, p=self.transition[s, a]))

    def policy_transition(self, probs: np.ndarray) -> np.ndarray:
        """State-to-state matrix P_π(s, s') = Σ_a π(a|s) P(s'|s,a)."""
        return np.einsum("sa,sat->st", probs, self.transition)

    def state_action_transition(self, probs: np.ndarray) -> np.ndarray:
        """(S·A, S·A) matrix P Π used by the exact policy-evaluation solves."""
        n_states, n_actions = self.n_states, self.n_actions
        matrix = np.einsum("sat,tb->satb", self.transition, probs)
        return matrix.reshape(n_states * n_actions, n_states * n_actions)


def random_mdp(
    n_states: int,
    n_actions: int,
    gamma: float,
    rng: np.random.Generator,
    n_absorbing: int = 0,
    deterministic: bool = False,
) -> TabularMdp:
    """Draw a random MDP for property checks.

    The last ``n_absorbing`` states are absorbing; μ0 is spread over the others.
    """
    if not 0 <= n_absorbing < n_states:
        raise InvalidEnvironmentError("need at least one non-absorbing state")

    if deterministic:
        transition = np.zeros((n_states, n_actions, n_states))
        targets = rng.integers(0, n_states, size=(n_states, n_actions))
        transition[np.arange(n_states)[:, None], np.arange(n_actions)[None, :], targets] = 1.0
    else:
        transition = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))

    absorbing = np.zeros(n_states, dtype=bool)
    absorbing[n_states - n_absorbing:] = True
    for s in np.flatnonzero(absorbing):
        transition[s] = 0.0
        transition[s, :, s] = 1.0

    initial = np.where(absorbing, 0.0, rng.uniform(0.1, 1.0, size=n_states))
    initial /= initial.sum()

    return TabularMdp(
        transition=transition,
        absorbing=absorbing,
        initial_dist=initial,
        gamma=gamma,
        true_reward=rng.normal(size=(n_states, n_actions)),
    )
