"""Expert generation, training loop, evaluation metrics and the property suite."""

from src.evaluation.expert import collect_demonstrations, hazard_reach_probability, train_expert
from src.evaluation.metrics import METRICS_COLUMNS, MetricsRow, evaluate, read_metrics_csv, write_metrics_csv
from src.evaluation.learning_loop import ExperimentConfig, ImitationLearningLoop, run_experiment, train
from src.evaluation.verification import CheckResult, VerificationReport, verify

__all__ = [
    "collect_demonstrations",
    "hazard_reach_probability",
    "train_expert",
    "METRICS_COLUMNS",
    "MetricsRow",
    "evaluate",
    "read_metrics_csv",
    "write_metrics_csv",
    "ExperimentConfig",
    "ImitationLearningLoop",
    "run_experiment",
    "train",
    "CheckResult",
    "VerificationReport",
    "verify",
]
