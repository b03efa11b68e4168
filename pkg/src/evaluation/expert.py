"""Expert training and demonstration collection."""

import logging
from typing import List

import numpy as np

from src.errors import ConfigurationError, ExpertQualityError
from src.mdp.occupancy import rollout
from src.mdp.tabular import TabularMdp
from src.mdp.transitions import Transition, TransitionSet
from src.soft_rl.policy import Policy, PolicyLike, as_probs, maxent_policy
from src.soft_rl.solvers import soft_value_iteration

logger = logging.getLogger(__name__)

HAZARD_TOLERANCE = 1e-6


def hazard_reach_probability(mdp: TabularMdp, policy: PolicyLike, horizon: int) -> float:
    """Exact probability of sitting in a hazard state after ``horizon`` steps.

    Hazards are absorbing, so this is the probability of ever entering one
    within the horizon.
    """
    p_pi = mdp.policy_transition(as_probs(policy))
    dist = mdp.initial_dist.copy()
    for _ in range(horizon):
        dist = dist @ p_pi
    return float(dist[mdp.hazard].sum())


def train_expert(mdp: TabularMdp, beta: float, tol: float = 1e-10) -> Policy:
    """Soft-optimal policy for the task reward.

    On tasks with goal states the expert must not enter a hazard with
    probability above 1e-6.

    Raises:
        ConfigurationError: the MDP carries no true reward.
        ExpertQualityError: the expert reaches a hazard.
    """
    if mdp.true_reward is None:
        raise ConfigurationError("expert training needs mdp.true_reward")

    q_soft = soft_value_iteration(mdp, mdp.true_reward, beta, tol)
    expert = maxent_policy(q_soft, beta)

    if mdp.goal.any():
        p_hazard = hazard_reach_probability(mdp, expert, horizon=4 * mdp.n_states)
        if p_hazard > HAZARD_TOLERANCE:
            raise ExpertQualityError(f"expert reaches a hazard with probability {p_hazard:.3e}")
        logger.info(f"Expert trained (beta={beta}); hazard probability {p_hazard:.2e}")
    return expert


def demonstration_trajectories(
    mdp: TabularMdp, expert: PolicyLike, n_traj: int, horizon: int, seed
) -> List[List[Transition]]:
    if n_traj < 1:
        raise ValueError("n_traj must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return [rollout(mdp, expert, horizon, rng) for _ in range(n_traj)]


def collect_demonstrations(
    mdp: TabularMdp, expert: PolicyLike, n_traj: int, horizon: int, lfo: bool, seed
) -> TransitionSet:
    """Roll out the expert. With ``lfo`` the learner-visible view has no actions."""
    demos = TransitionSet(observed_actions=not lfo)
    for trajectory in demonstration_trajectories(mdp, expert, n_traj, horizon, seed):
        demos.extend(trajectory)
    logger.info(f"Collected {len(demos)} expert transitions from {n_traj} trajectories (lfo={lfo})")
    return demos
