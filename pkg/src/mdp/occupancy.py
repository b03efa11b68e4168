"""Occupancy measures, state-action distributions and rollouts."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.errors import ConvergenceError, InvalidDistributionError
from src.mdp.tabular import TabularMdp
from src.mdp.transitions import Transition
from src.soft_rl.policy import PolicyLike, as_probs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StateActionDistribution:
    """Nonnegative (S, A) table.

    ``normalized`` marks a distribution d (sums to 1); an unnormalized table is
    an occupancy measure ρ that sums to 1/(1−γ) for the stored ``gamma``.
    """

    values: np.ndarray
    normalized: bool = True
    gamma: Optional[float] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or np.any(values < 0) or not np.all(np.isfinite(values)):
            raise InvalidDistributionError("state-action tables must be finite, nonnegative and 2-D")
        if self.normalized and abs(values.sum() - 1.0) > 1e-10:
            raise InvalidDistributionError(f"distribution sums to {values.sum():.12f}, expected 1")
        object.__setattr__(self, "values", values)

    @property
    def total(self) -> float:
        return float(self.values.sum())


def state_visitation(mdp: TabularMdp, policy: PolicyLike) -> np.ndarray:
    """Discounted state visitation x = μ0 + γ P_πᵀ x, by direct solve."""
    probs = as_probs(policy)
    p_pi = mdp.policy_transition(probs)
    system = np.eye(mdp.n_states) - mdp.gamma * p_pi.T
    return np.linalg.solve(system, mdp.initial_dist)


def occupancy_measure(mdp: TabularMdp, policy: PolicyLike) -> StateActionDistribution:
    """ρ_π(s, a) = π(a|s) Σ_t γ^t μ_t(s); total mass 1/(1−γ).

    Absorbing states self-loop, so they accumulate the geometric tail of
    their discounted inflow.
    """
    probs = as_probs(policy)
    visitation = state_visitation(mdp, probs)
    rho = np.clip(visitation, 0.0, None)[:, None] * probs
    return StateActionDistribution(rho, normalized=False, gamma=mdp.gamma)


def occupancy_measure_iterative(
    mdp: TabularMdp, policy: PolicyLike, tol: float = 1e-12, max_iterations: int = 100_000
) -> StateActionDistribution:
    """Fixed-point iteration of the flow equation; cross-check oracle."""
    probs = as_probs(policy)
    p_pi_t = mdp.policy_transition(probs).T
    x = mdp.initial_dist.copy()
    for iteration in range(1, max_iterations + 1):
        x_new = mdp.initial_dist + mdp.gamma * p_pi_t @ x
        residual = float(np.max(np.abs(x_new - x)))
        x = x_new
        if residual <= tol:
            return StateActionDistribution(x[:, None] * probs, normalized=False, gamma=mdp.gamma)
    raise ConvergenceError("occupancy iteration did not converge", residual, max_iterations)


def occupancy_to_distribution(rho: StateActionDistribution) -> StateActionDistribution:
    """d = (1−γ) ρ.

    No renormalization: a ρ whose mass is not 1/(1−γ) within 1e-10 is
    rejected, as is a ρ without a discount factor.
    """
    if rho.normalized:
        return rho
    if rho.gamma is None:
        raise InvalidDistributionError("occupancy measure carries no discount factor")
    d = (1.0 - rho.gamma) * rho.values
    if d.sum() <= 0.0:
        raise InvalidDistributionError("cannot convert a zero-mass occupancy measure")
    return StateActionDistribution(d, normalized=True, gamma=rho.gamma)


def rollout(mdp: TabularMdp, policy: PolicyLike, horizon: int, seed) -> List[Transition]:
    """Sample one trajectory from μ0.

    The transition into an absorbing state is recorded and ends the episode.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    probs = as_probs(policy)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    s = mdp.sample_initial_state(rng)
    trajectory = []
    for _ in range(horizon):
        a = int(rng.choice(mdp.n_actions, p=probs[s]))
        s_next = mdp.sample_next_state(s, a, rng)
        absorbing = bool(mdp.absorbing[s_next])
        trajectory.append(Transition(s, a, s_next, absorbing))
        if absorbing:
            break
        s = s_next
    return trajectory


def empirical_occupancy(
    trajectories: Sequence[Sequence[Transition]], mdp: TabularMdp, policy: PolicyLike
) -> StateActionDistribution:
    """Monte-Carlo estimate of ρ_π from rollouts.

    Each visit at step t weighs γ^t. A trajectory that ends in an absorbing
    state s_A at step t adds the analytic tail γ^t/(1−γ)·π(·|s_A).
    """
    if not trajectories:
        raise InvalidDistributionError("need at least one trajectory")
    probs = as_probs(policy)
    gamma = mdp.gamma
    rho = np.zeros((mdp.n_states, mdp.n_actions))
    for trajectory in trajectories:
        for t, step in enumerate(trajectory):
            rho[step.s, step.a] += gamma ** t
        if trajectory and trajectory[-1].absorbing_next:
            t_end = len(trajectory)
            rho[trajectory[-1].s_next] += gamma ** t_end / (1.0 - gamma) * probs[trajectory[-1].s_next]
    return StateActionDistribution(rho / len(trajectories), normalized=False, gamma=gamma)
