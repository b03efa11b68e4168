"""
Imitation Learning Loop

Runs the full training loop on a point-mass grid:
1. Train the expert and collect demonstrations
2. Roll the learner's policy into the replay buffer
3. Update the critic (and optional G/H critic) from expert and policy batches
4. Extract the new policy and, for learning from observations, refit the IDM
5. Emit evaluation metrics every ``eval_every`` steps
"""

import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from src.errors import ConfigurationError
from src.evaluation.expert import collect_demonstrations, train_expert
from src.evaluation.metrics import MetricsRow, evaluate, write_metrics_csv
from src.idm.inverse_dynamics import InverseDynamicsModel, idm_accuracy, idm_update, label_confident
from src.lsiq.agent import auxiliary_critic_step, critic_update, init_critic, policy_improvement
from src.lsiq.settings import Algorithm, LsIqConfig
from src.mdp.pointmass import load_environment
from src.mdp.tabular import TabularMdp
from src.mdp.transitions import Transition, TransitionBatch, TransitionSet
from src.soft_rl.critics import CriticState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentConfig:
    """One training run: environment, algorithm and loop settings.

    With ``full_batch`` every update regresses on the whole replay buffer and
    the whole demonstration set instead of sampled mini-batches.
    """

    environment: Dict = field(default_factory=lambda: {"size": 7})
    lsiq: LsIqConfig = field(default_factory=LsIqConfig)
    n_expert_trajectories: int = 10
    lfo: bool = False
    total_steps: int = 6000
    eval_every: int = 500
    eval_episodes: int = 100
    seed: int = 0
    horizon: Optional[int] = None
    replay_capacity: Optional[int] = None
    expert_beta: float = 0.01
    warmup_steps: Optional[int] = None
    env_steps_per_iteration: int = 1
    full_batch: bool = False
    show_progress: bool = False

    def __post_init__(self):
        if isinstance(self.lsiq, dict):
            object.__setattr__(self, "lsiq", LsIqConfig.from_dict(self.lsiq))

        errors = []
        if self.lfo and self.lsiq.algorithm is not Algorithm.LSIQ:
            errors.append("lfo requires algorithm 'lsiq'")
        if self.n_expert_trajectories < 1:
            errors.append("n_expert_trajectories must be positive")
        if self.total_steps < 0:
            errors.append("total_steps must be nonnegative")
        for name in ("eval_every", "eval_episodes", "env_steps_per_iteration"):
            if getattr(self, name) < 1:
                errors.append(f"{name} must be positive")
        if self.horizon is not None and self.horizon < 1:
            errors.append("horizon must be positive")
        if self.replay_capacity is not None and self.replay_capacity < 1:
            errors.append("replay_capacity must be positive")
        if self.warmup_steps is not None and self.warmup_steps < 0:
            errors.append("warmup_steps must be nonnegative")
        if errors:
            raise ConfigurationError("Invalid experiment configuration:\n" + "\n".join(f"  - {e}" for e in errors))

    @property
    def grid_size(self) -> int:
        return int(self.environment.get("size", 7))

    @property
    def episode_horizon(self) -> int:
        return self.horizon if self.horizon is not None else 4 * self.grid_size

    @property
    def warmup(self) -> int:
        return self.warmup_steps if self.warmup_steps is not None else self.lsiq.batch_size

    def build_environment(self) -> TabularMdp:
        return load_environment(self.environment, gamma=self.lsiq.gamma)

    def replace(self, **changes) -> "ExperimentConfig":
        data = self.to_dict()
        for key, value in changes.items():
            if key == "lsiq" and isinstance(value, LsIqConfig):
                value = value.to_dict()
            data[key] = value
        return ExperimentConfig.from_dict(data)

    def to_dict(self) -> Dict:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["lsiq"] = self.lsiq.to_dict()
        data["environment"] = dict(self.environment)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown experiment config keys: {sorted(unknown)}")
        data = dict(data)
        if "lsiq" in data and isinstance(data["lsiq"], dict):
            data["lsiq"] = LsIqConfig.from_dict(data["lsiq"])
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(Path(path), "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


class ImitationLearningLoop:
    """Training loop over one environment and one algorithm configuration.

    The experiment seed spawns independent streams for environment
    transitions, policy sampling, batch sampling, expert demonstrations and
    evaluation.
    """

    def __init__(self, config: ExperimentConfig, mdp: Optional[TabularMdp] = None):
        self.config = config
        self.cfg = config.lsiq
        self.mdp = mdp if mdp is not None else config.build_environment()
        if self.mdp.gamma != self.cfg.gamma:
            raise ConfigurationError("environment and algorithm discount factors differ")

        streams = np.random.SeedSequence(config.seed).spawn(5)
        self.env_rng, self.policy_rng, self.batch_rng, expert_stream, eval_stream = (
            np.random.default_rng(s) for s in streams
        )
        self.eval_seed = int(eval_stream.integers(0, 2**31 - 1))

        self.expert = train_expert(self.mdp, config.expert_beta)
        self.demos = collect_demonstrations(
            self.mdp,
            self.expert,
            config.n_expert_trajectories,
            config.episode_horizon,
            config.lfo,
            expert_stream,
        )

        self.replay = TransitionSet(capacity=config.replay_capacity)
        self.critic: CriticState = init_critic(self.mdp.n_states, self.mdp.n_actions, self.cfg)
        self.policy = policy_improvement(self.critic, self.cfg)
        self.idm = InverseDynamicsModel.empty(self.mdp.n_states, self.mdp.n_actions) if config.lfo else None
        # every (s, a) the learner has taken into a hazard / into a live state
        self.hazard_pairs = np.zeros((self.mdp.n_states, self.mdp.n_actions), dtype=bool)
        self.live_pairs = np.zeros_like(self.hazard_pairs)

        self._state: Optional[int] = None
        self._t = 0

    def _env_step(self) -> Transition:
        if self._state is None:
            self._state = self.mdp.sample_initial_state(self.env_rng)
            self._t = 0
        s = self._state
        a = self.policy.sample(s, self.policy_rng)
        s_next = self.mdp.sample_next_state(s, a, self.env_rng)
        transition = Transition(s, a, s_next, bool(self.mdp.absorbing[s_next]))
        self.replay.add(transition)
        if self.mdp.hazard[s_next]:
            self.hazard_pairs[s, a] = True
        elif not transition.absorbing_next:
            self.live_pairs[s, a] = True

        self._t += 1
        if transition.absorbing_next or self._t >= self.config.episode_horizon:
            self._state = None
        else:
            self._state = s_next
        return transition

    def _collect(self, n_steps: int) -> List[Transition]:
        return [self._env_step() for _ in range(n_steps)]

    def warm_up(self) -> None:
        """Fill the replay buffer (and the IDM) before the first update."""
        transitions = self._collect(max(self.config.warmup, 1))
        if self.idm is not None:
            self.idm = idm_update(self.idm, TransitionBatch.from_transitions(transitions))
        logger.info(f"Warm-up collected {len(transitions)} policy transitions")

    def _batches(self) -> Tuple[TransitionBatch, TransitionBatch]:
        if self.config.full_batch:
            policy_batch, expert_batch = self.replay.as_batch(), self.demos.as_batch()
        else:
            policy_batch = self.replay.sample(self.cfg.batch_size, self.batch_rng)
            expert_batch = self.demos.sample(self.cfg.batch_size, self.batch_rng)
        if self.idm is not None:
            expert_batch = label_confident(self.idm, expert_batch)
        return expert_batch, policy_batch

    def train_step(self) -> float:
        """One iteration; returns the critic loss, NaN when no expert record could be labelled."""
        new_transitions = self._collect(self.config.env_steps_per_iteration)

        expert_batch, policy_batch = self._batches()
        loss = float("nan")
        if len(expert_batch) > 0:
            self.critic, loss = critic_update(
                self.critic, expert_batch, policy_batch, self.policy, self.cfg, self.mdp.initial_dist
            )
            self.critic = auxiliary_critic_step(self.critic, policy_batch, self.policy, self.cfg)
            self.policy = policy_improvement(self.critic, self.cfg)
        else:
            logger.debug("No expert transition has a confident IDM label yet; update skipped")

        if self.idm is not None:
            self.idm = idm_update(self.idm, TransitionBatch.from_transitions(new_transitions))
        return loss

    def q_means(self) -> Tuple[float, float]:
        """Mean Q over every (s, a) the learner has taken into a hazard, and into a live state.

        Pairs stay tracked after their records leave the replay buffer. A mean
        is NaN only while no such pair exists.
        """
        q = self.critic.q
        q_absorbing = float(q[self.hazard_pairs].mean()) if self.hazard_pairs.any() else float("nan")
        q_nonabsorbing = float(q[self.live_pairs].mean()) if self.live_pairs.any() else float("nan")
        return q_absorbing, q_nonabsorbing

    def metrics(self, step: int, losses: List[float]) -> MetricsRow:
        discounted_return, success_rate = evaluate(
            self.mdp, self.policy, self.config.eval_episodes, self.config.episode_horizon, self.eval_seed
        )
        q_absorbing, q_nonabsorbing = self.q_means()
        accuracy = idm_accuracy(self.idm, self.demos.scoring_batch()) if self.idm is not None else None
        row = MetricsRow(
            step=step,
            discounted_return=discounted_return,
            success_rate=success_rate,
            q_mean_absorbing=q_absorbing,
            q_mean_nonabsorbing=q_nonabsorbing,
            loss=_mean_loss(losses),
            idm_accuracy=accuracy,
        )
        logger.info(
            f"step {step}: success={success_rate:.2f} return={discounted_return:.3f} "
            f"q_abs={q_absorbing:.1f} q_nonabs={q_nonabsorbing:.1f} loss={row.loss:.4f}"
        )
        return row

    def run(self) -> List[MetricsRow]:
        """Run ``total_steps`` iterations; metrics every ``eval_every`` steps and at the end."""
        total = self.config.total_steps
        if total == 0:
            return []

        self.warm_up()
        rows: List[MetricsRow] = []
        losses: List[float] = []
        steps = range(1, total + 1)
        for step in tqdm(steps, desc="Training", disable=not self.config.show_progress):
            losses.append(self.train_step())
            if step % self.config.eval_every == 0 or step == total:
                rows.append(self.metrics(step, losses))
                losses = []
        return rows

    def save_checkpoint(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "config": self.config.to_dict(),
            "critic": self.critic.to_dict(),
            "idm": self.idm.to_dict() if self.idm is not None else None,
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f)
        logger.info(f"Checkpoint written to {path}")
        return path


def _mean_loss(losses: List[float]) -> float:
    finite = [loss for loss in losses if np.isfinite(loss)]
    return float(np.mean(finite)) if finite else float("nan")


def train(config: ExperimentConfig) -> List[MetricsRow]:
    return ImitationLearningLoop(config).run()


def run_experiment(config: ExperimentConfig, out_dir) -> Dict:
    """Train, then write ``metrics.csv`` and ``checkpoint.json`` under ``out_dir``."""
    out_dir = Path(out_dir)
    loop = ImitationLearningLoop(config)
    rows = loop.run()
    metrics_path = write_metrics_csv(rows, out_dir / "metrics.csv")
    checkpoint_path = loop.save_checkpoint(out_dir / "checkpoint.json")
    return {
        "rows": rows,
        "metrics_path": metrics_path,
        "checkpoint_path": checkpoint_path,
        "final_success_rate": rows[-1].success_rate if rows else None,
    }
