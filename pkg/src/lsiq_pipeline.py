"""
Imitation Pipeline

Wires environment, expert, demonstrations, training and evaluation together
for the command-line interface.
"""

import json
import logging
import time
from pathlib import Path
from typing import Dict, Optional

from src.errors import ConfigurationError
from src.evaluation.expert import collect_demonstrations, hazard_reach_probability, train_expert
from src.evaluation.learning_loop import ExperimentConfig, ImitationLearningLoop
from src.evaluation.metrics import evaluate, write_metrics_csv
from src.evaluation.verification import VerificationReport, verify
from src.lsiq.agent import policy_improvement
from src.soft_rl.critics import CriticState
from src.soft_rl.policy import Policy

logger = logging.getLogger(__name__)


class ImitationPipeline:
    """End-to-end runs for one experiment configuration."""

    def __init__(self, config, experiment: Optional[ExperimentConfig] = None):
        """
        Args:
            config: Config class with process-level defaults
            experiment: Experiment settings; defaults to ``config.experiment_defaults()``
        """
        self.config = config
        self.experiment = experiment or ExperimentConfig.from_dict(config.experiment_defaults())
        self.mdp = self.experiment.build_environment()
        self._expert: Optional[Policy] = None
        self.last_run: Dict = {}
        logger.info(
            f"Environment ready: {self.mdp.n_states} states, {self.mdp.n_actions} actions, "
            f"{int(self.mdp.goal.sum())} goal / {int(self.mdp.hazard.sum())} hazard cells"
        )

    @classmethod
    def from_json(cls, config, path, **overrides) -> "ImitationPipeline":
        experiment = ExperimentConfig.from_json(path)
        if overrides:
            experiment = experiment.replace(**overrides)
        return cls(config, experiment)

    @property
    def expert(self) -> Policy:
        if self._expert is None:
            self._expert = train_expert(self.mdp, self.experiment.expert_beta)
        return self._expert

    def save_expert(self, out_dir) -> Dict:
        """Train the expert and write its policy table with a greedy score."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        horizon = self.experiment.episode_horizon
        discounted_return, success_rate = evaluate(
            self.mdp, self.expert, self.experiment.eval_episodes, horizon, self.experiment.seed
        )
        path = out_dir / "expert.json"
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"beta": self.experiment.expert_beta, "probs": self.expert.probs.tolist()}, f)
        logger.info(f"Expert saved to {path} (success rate {success_rate:.2f})")
        return {
            "path": path,
            "discounted_return": discounted_return,
            "success_rate": success_rate,
            "hazard_probability": hazard_reach_probability(self.mdp, self.expert, 4 * self.mdp.n_states),
        }

    def collect(self, out_dir) -> Dict:
        """Write expert demonstrations as JSON lines."""
        demos = collect_demonstrations(
            self.mdp,
            self.expert,
            self.experiment.n_expert_trajectories,
            self.experiment.episode_horizon,
            self.experiment.lfo,
            self.experiment.seed,
        )
        path = demos.save_jsonl(Path(out_dir) / "demonstrations.jsonl")
        return {"path": path, "n_transitions": len(demos), "observed_actions": demos.observed_actions}

    def train(self, out_dir) -> Dict:
        """Run the learning loop; writes metrics.csv, checkpoint.json and config.json."""
        out_dir = Path(out_dir)
        start_time = time.time()
        loop = ImitationLearningLoop(self.experiment, self.mdp)
        rows = loop.run()
        metrics_path = write_metrics_csv(rows, out_dir / "metrics.csv")
        checkpoint_path = loop.save_checkpoint(out_dir / "checkpoint.json")
        with open(out_dir / "config.json", "w", encoding="utf-8") as f:
            json.dump(self.experiment.to_dict(), f, indent=2)

        self.last_run = {
            "rows": rows,
            "metrics_path": metrics_path,
            "checkpoint_path": checkpoint_path,
            "training_time_seconds": time.time() - start_time,
        }
        return self.last_run

    def evaluate_checkpoint(self, path) -> Dict:
        """Rebuild the policy from a checkpoint and score it greedily."""
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
        if "critic" not in payload or "config" not in payload:
            raise ConfigurationError(f"{path} is not a training checkpoint")

        experiment = ExperimentConfig.from_dict(payload["config"])
        mdp = experiment.build_environment()
        critic = CriticState.from_dict(payload["critic"])
        if critic.q.shape != (mdp.n_states, mdp.n_actions):
            raise ConfigurationError("checkpoint critic does not match its environment")

        policy = policy_improvement(critic, experiment.lsiq)
        discounted_return, success_rate = evaluate(
            mdp, policy, experiment.eval_episodes, experiment.episode_horizon, experiment.seed
        )
        return {
            "discounted_return": discounted_return,
            "success_rate": success_rate,
            "steps_trained": critic.step_count,
        }

    def verify(self, show_progress: bool = True) -> VerificationReport:
        return verify(seed=self.experiment.seed, show_progress=show_progress)

    def get_stats(self) -> Dict:
        stats = {
            "environment": {
                "states": self.mdp.n_states,
                "actions": self.mdp.n_actions,
                "goal_cells": int(self.mdp.goal.sum()),
                "hazard_cells": int(self.mdp.hazard.sum()),
                "gamma": self.mdp.gamma,
            },
            "lsiq": self.experiment.lsiq.to_dict(),
            "targets": vars(self.experiment.lsiq.targets),
            "lfo": self.experiment.lfo,
        }
        if self.last_run:
            stats["last_run"] = {
                "metrics_path": str(self.last_run["metrics_path"]),
                "training_time_seconds": self.last_run["training_time_seconds"],
            }
        return stats
