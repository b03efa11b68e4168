"""Greedy evaluation and the metrics CSV."""

import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.mdp.tabular import TabularMdp
from src.soft_rl.policy import Policy, PolicyLike, as_probs

logger = logging.getLogger(__name__)

METRICS_COLUMNS = [
    "step",
    "discounted_return",
    "success_rate",
    "q_mean_absorbing",
    "q_mean_nonabsorbing",
    "loss",
    "idm_accuracy",
]


@dataclass(frozen=True)
class MetricsRow:
    step: int
    discounted_return: float
    success_rate: float
    q_mean_absorbing: float
    q_mean_nonabsorbing: float
    loss: float
    idm_accuracy: Optional[float] = None


def evaluate(mdp: TabularMdp, policy: PolicyLike, episodes: int, horizon: int, seed) -> Tuple[float, float]:
    """Mean discounted return and success rate under greedy actions.

    An episode succeeds when it enters a goal state before the horizon. On
    entering an absorbing state the return adds its closed-form tail
    γ^t·r(s_A, a)/(1−γ), so returns estimate the exact value at μ0.
    """
    if episodes < 1:
        raise ValueError("episodes must be at least 1")
    actions = Policy(as_probs(policy)).greedy_actions()
    reward = mdp.true_reward if mdp.true_reward is not None else np.zeros((mdp.n_states, mdp.n_actions))
    gamma = mdp.gamma
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    def absorbing_tail(state: int) -> float:
        return reward[state, actions[state]] / (1.0 - gamma)

    returns, successes = [], []
    for _ in range(episodes):
        s = mdp.sample_initial_state(rng)
        if mdp.absorbing[s]:
            returns.append(absorbing_tail(s))
            successes.append(bool(mdp.goal[s]))
            continue

        total, discount, success = 0.0, 1.0, False
        for _ in range(horizon):
            a = actions[s]
            total += discount * reward[s, a]
            discount *= gamma
            s = mdp.sample_next_state(s, a, rng)
            if mdp.absorbing[s]:
                total += discount * absorbing_tail(s)
                success = bool(mdp.goal[s])
                break
        returns.append(total)
        successes.append(success)

    return float(np.mean(returns)), float(np.mean(successes))


def metrics_frame(rows: Sequence[MetricsRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in rows], columns=METRICS_COLUMNS)


def write_metrics_csv(rows: Sequence[MetricsRow], path) -> Path:
    """Write rows with the fixed header; missing idm_accuracy stays empty."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metrics_frame(rows).to_csv(path, index=False, na_rep="")
    logger.info(f"Wrote {len(rows)} metrics rows to {path}")
    return path


def read_metrics_csv(path) -> List[MetricsRow]:
    frame = pd.read_csv(path)
    rows = []
    for record in frame.to_dict(orient="records"):
        idm = record["idm_accuracy"]
        record["idm_accuracy"] = None if pd.isna(idm) else float(idm)
        record["step"] = int(record["step"])
        rows.append(MetricsRow(**record))
    return rows
