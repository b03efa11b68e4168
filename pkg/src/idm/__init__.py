"""Inverse dynamics model for learning from observations."""

from src.idm.inverse_dynamics import (
    InverseDynamicsModel,
    idm_accuracy,
    idm_predict,
    idm_update,
    label_batch,
    label_confident,
)

__all__ = ["InverseDynamicsModel", "idm_accuracy", "idm_predict", "idm_update", "label_batch", "label_confident"]
