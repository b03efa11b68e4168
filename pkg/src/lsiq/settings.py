"""Algorithm hyperparameters and the derived reward / Q targets."""

import json
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Dict, Tuple

from src.errors import ConfigurationError, InfiniteTargetError


class Operator(str, Enum):
    IQ_OPERATOR = "iq"
    LSIQ_OPERATOR = "lsiq"


class Algorithm(str, Enum):
    LSIQ = "lsiq"
    SQIL = "sqil"
    IQ = "iq"
    IQV0 = "iqv0"


class ValueTarget(str, Enum):
    POLICY = "policy"  # V^π of the extracted policy
    OPTIMAL = "optimal"  # V* = max_a Q


class TargetUpdateKind(str, Enum):
    HARD = "hard"
    POLYAK = "polyak"


@dataclass(frozen=True)
class TargetUpdate:
    kind: TargetUpdateKind = TargetUpdateKind.POLYAK
    tau: float = 0.005
    period: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", TargetUpdateKind(self.kind))
        if self.kind is TargetUpdateKind.POLYAK and not 0.0 < self.tau <= 1.0:
            raise ConfigurationError(f"polyak tau must lie in (0, 1], got {self.tau}")
        if self.kind is TargetUpdateKind.HARD and self.period < 1:
            raise ConfigurationError(f"hard update period must be positive, got {self.period}")

    @classmethod
    def hard(cls, period: int) -> "TargetUpdate":
        return cls(kind=TargetUpdateKind.HARD, period=period)

    @classmethod
    def polyak(cls, tau: float) -> "TargetUpdate":
        return cls(kind=TargetUpdateKind.POLYAK, tau=tau)

    def to_dict(self) -> Dict:
        if self.kind is TargetUpdateKind.HARD:
            return {"kind": "hard", "period": self.period}
        return {"kind": "polyak", "tau": self.tau}

    @classmethod
    def from_dict(cls, data: Dict) -> "TargetUpdate":
        unknown = set(data) - {"kind", "tau", "period"}
        if unknown:
            raise ConfigurationError(f"unknown target_update keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class RewardTargets:
    r_max: float
    r_min: float
    q_max: float
    q_min: float


def reward_targets(c: float, alpha: float) -> Tuple[float, float]:
    """(r_max, r_min) = (1/(2αc), −1/(2(1−α)c))."""
    if alpha <= 0.0 or alpha >= 1.0:
        raise InfiniteTargetError(f"alpha={alpha} makes a reward target infinite")
    if not c > 0:
        raise ConfigurationError(f"c must be positive, got {c}")
    return 1.0 / (2.0 * alpha * c), -1.0 / (2.0 * (1.0 - alpha) * c)


def q_bounds(r_max: float, r_min: float, gamma: float) -> Tuple[float, float]:
    """(q_max, q_min) = (r_max, r_min)/(1−γ)."""
    if not 0.0 < gamma < 1.0:
        raise ConfigurationError(f"gamma must lie in (0, 1), got {gamma}")
    return r_max / (1.0 - gamma), r_min / (1.0 - gamma)


@dataclass(frozen=True)
class LsIqConfig:
    """Hyperparameters of LS-IQ and its baselines.

    JSON round-trips through ``to_dict``/``from_dict``; unknown keys are rejected.
    """

    c: float = 0.5
    alpha: float = 0.5
    beta: float = 0.1
    gamma: float = 0.99
    operator: Operator = Operator.LSIQ_OPERATOR
    fixed_expert_target: bool = False
    clip_targets: bool = True
    entropy_clip: bool = False
    entropy_clip_decay: float = 0.99
    use_entropy_critic: bool = False
    use_regularization_critic: bool = False
    lr_q: float = 8.0
    lr_g: float = 8.0
    normalized_step: bool = False
    target_update: TargetUpdate = field(default_factory=TargetUpdate)
    batch_size: int = 64
    algorithm: Algorithm = Algorithm.LSIQ
    sqil_symmetric: bool = False
    value_target: ValueTarget = ValueTarget.POLICY
    pessimistic_init: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "operator", Operator(self.operator))
            object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
            object.__setattr__(self, "value_target", ValueTarget(self.value_target))
        except ValueError as e:
            raise ConfigurationError(str(e)) from e
        if isinstance(self.target_update, dict):
            object.__setattr__(self, "target_update", TargetUpdate.from_dict(self.target_update))

        errors = []
        if not self.c > 0:
            errors.append("c must be positive")
        if not 0.0 < self.alpha < 1.0:
            errors.append("alpha must lie in (0, 1)")
        if self.beta < 0:
            errors.append("beta must be nonnegative")
        if not 0.0 < self.gamma < 1.0:
            errors.append("gamma must lie in (0, 1)")
        if self.lr_q < 0 or self.lr_g < 0:
            errors.append("learning rates must be nonnegative")
        if self.normalized_step and self.lr_q > 1.0:
            errors.append("lr_q is a fraction of the per-entry Newton step and must not exceed 1 when normalized_step")
        if self.batch_size < 1:
            errors.append("batch_size must be positive")
        if not 0.0 <= self.entropy_clip_decay < 1.0:
            errors.append("entropy_clip_decay must lie in [0, 1)")
        if errors:
            raise ConfigurationError("Invalid LS-IQ configuration:\n" + "\n".join(f"  - {e}" for e in errors))

    @property
    def r_max(self) -> float:
        return reward_targets(self.c, self.alpha)[0]

    @property
    def r_min(self) -> float:
        return reward_targets(self.c, self.alpha)[1]

    @property
    def q_max(self) -> float:
        return self.r_max / (1.0 - self.gamma)

    @property
    def q_min(self) -> float:
        return self.r_min / (1.0 - self.gamma)

    @property
    def k(self) -> float:
        """Weight of the regularization critic, c(1−α)."""
        return self.c * (1.0 - self.alpha)

    @property
    def targets(self) -> RewardTargets:
        return RewardTargets(self.r_max, self.r_min, self.q_max, self.q_min)

    @property
    def critic_carries_entropy(self) -> bool:
        return self.use_entropy_critic or self.use_regularization_critic

    def to_dict(self) -> Dict:
        data = asdict(self)
        for key in ("operator", "algorithm", "value_target"):
            data[key] = getattr(self, key).value
        data["target_update"] = self.target_update.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "LsIqConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown LS-IQ config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "LsIqConfig":
        with open(Path(path), "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))
