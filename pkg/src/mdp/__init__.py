"""Finite MDPs, the point-mass grid, transition stores and occupancy measures."""

from src.mdp.tabular import TabularMdp, random_mdp
from src.mdp.transitions import Transition, TransitionBatch, TransitionSet
from src.mdp.pointmass import build_pointmass_grid, default_pointmass_layout, load_environment
from src.mdp.occupancy import (
    StateActionDistribution,
    empirical_occupancy,
    occupancy_measure,
    occupancy_measure_iterative,
    occupancy_to_distribution,
    rollout,
)

__all__ = [
    "TabularMdp",
    "random_mdp",
    "Transition",
    "TransitionBatch",
    "TransitionSet",
    "build_pointmass_grid",
    "default_pointmass_layout",
    "load_environment",
    "StateActionDistribution",
    "empirical_occupancy",
    "occupancy_measure",
    "occupancy_measure_iterative",
    "occupancy_to_distribution",
    "rollout",
]
