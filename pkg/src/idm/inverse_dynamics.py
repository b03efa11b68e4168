"""Count-based inverse dynamics model for learning from observations.

The model is fit on the learner's own transitions and labels action-free
expert transitions with the most frequent action seen for each (s, s')
pair. Expert data never reaches ``idm_update``.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from src.errors import UntrainedModelError
from src.mdp.transitions import TransitionBatch

logger = logging.getLogger(__name__)


@dataclass
class InverseDynamicsModel:
    counts: np.ndarray  # (S, S, A)
    total_observed: int = 0

    @classmethod
    def empty(cls, n_states: int, n_actions: int) -> "InverseDynamicsModel":
        return cls(np.zeros((n_states, n_states, n_actions), dtype=np.int64))

    def to_dict(self) -> Dict:
        """Sparse ``[s, s_next, a, count]`` triples."""
        nonzero = np.argwhere(self.counts > 0)
        return {
            "shape": list(self.counts.shape),
            "counts": [[int(s), int(sn), int(a), int(self.counts[s, sn, a])] for s, sn, a in nonzero],
            "total_observed": self.total_observed,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "InverseDynamicsModel":
        counts = np.zeros(tuple(data["shape"]), dtype=np.int64)
        for s, s_next, a, count in data["counts"]:
            counts[s, s_next, a] = count
        return cls(counts, int(data["total_observed"]))


def idm_update(model: InverseDynamicsModel, batch: TransitionBatch) -> InverseDynamicsModel:
    """Add one count per policy transition; empty batches leave the model unchanged."""
    if len(batch) == 0:
        return model
    actions = batch.require_actions()
    counts = model.counts.copy()
    np.add.at(counts, (batch.s, batch.s_next, actions), 1)
    return InverseDynamicsModel(counts, model.total_observed + len(batch))


def idm_predict(model: InverseDynamicsModel, s: int, s_next: int) -> Tuple[int, bool]:
    """Return (action, confident).

    Ties go to the lowest action id. An unseen pair falls back to the
    globally most frequent action with ``confident=False``.
    """
    if model.total_observed == 0:
        raise UntrainedModelError("inverse dynamics model has not observed any transition")
    row = model.counts[s, s_next]
    if row.sum() > 0:
        return int(np.argmax(row)), True
    return int(np.argmax(model.counts.sum(axis=(0, 1)))), False


def _predict_all(model: InverseDynamicsModel, batch: TransitionBatch) -> Tuple[np.ndarray, np.ndarray]:
    predictions = [idm_predict(model, int(s), int(sn)) for s, sn in zip(batch.s, batch.s_next)]
    actions = np.array([a for a, _ in predictions], dtype=np.int64)
    confident = np.array([c for _, c in predictions], dtype=bool)
    return actions, confident


def label_batch(model: InverseDynamicsModel, batch: TransitionBatch) -> Tuple[TransitionBatch, float]:
    """Attach predicted actions to a batch; also returns the fallback fraction."""
    actions, confident = _predict_all(model, batch)
    fallback = 1.0 - float(confident.mean()) if len(confident) else 0.0
    if fallback > 0:
        logger.debug(f"IDM fell back to the modal action on {fallback:.1%} of the batch")
    return batch.with_actions(actions), fallback


def idm_accuracy(model: InverseDynamicsModel, scoring_batch: TransitionBatch) -> float:
    """Fraction of transitions whose true action the model recovers."""
    true_actions = scoring_batch.require_actions()
    labelled, _ = label_batch(model, scoring_batch)
    return float(np.mean(labelled.a == true_actions))


def label_confident(model: InverseDynamicsModel, batch: TransitionBatch) -> TransitionBatch:
    """Labelled batch restricted to the (s, s') pairs the model has seen.

    Records with an unseen pair are dropped; they come back once the learner
    has produced that transition itself.
    """
    actions, confident = _predict_all(model, batch)
    return batch.with_actions(actions).subset(confident)
