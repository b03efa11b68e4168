"""Grid reconstruction of the point-mass task.

The agent spawns in one of the corner cells and has to reach the central goal
cell. A ring of absorbing hazard cells surrounds the goal, with one gap in the
middle of each side. Cells are numbered row-major: ``id = row * size + col``.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List

import numpy as np

from src.errors import InvalidEnvironmentError
from src.mdp.tabular import TabularMdp

logger = logging.getLogger(__name__)

# up, down, left, right as (row, col) offsets
ACTIONS = ((-1, 0), (1, 0), (0, -1), (0, 1))
ACTION_NAMES = ("up", "down", "left", "right")
ENVIRONMENT_KEYS = {"size", "spawn_cells", "goal_cells", "hazard_cells", "gamma", "goal_reward"}
N_SPAWNS = 4


def build_pointmass_grid(
    size: int,
    spawn_cells: Iterable[int],
    goal_cells: Iterable[int],
    hazard_cells: Iterable[int],
    gamma: float,
    goal_reward: float = 1.0,
) -> TabularMdp:
    """Build the deterministic 4-action grid MDP.

    Raises:
        InvalidEnvironmentError: cells out of range, overlapping sets, or a
            spawn list that is not 4 distinct cells on a grid with free cells.
    """
    if size <= 0:
        raise InvalidEnvironmentError("size must be positive")
    if goal_reward <= 0:
        raise InvalidEnvironmentError("goal_reward must be positive")

    n_cells = size * size
    spawns, goals, hazards = list(spawn_cells), set(goal_cells), set(hazard_cells)
    for name, cells in (("spawn", spawns), ("goal", goals), ("hazard", hazards)):
        bad = [c for c in cells if not 0 <= c < n_cells]
        if bad:
            raise InvalidEnvironmentError(f"{name} cells out of range for a {size}x{size} grid: {bad}")

    if goals & hazards:
        raise InvalidEnvironmentError(f"goal and hazard cells overlap: {sorted(goals & hazards)}")
    overlap = set(spawns) & (goals | hazards)
    if overlap:
        raise InvalidEnvironmentError(f"spawn cells inside goal/hazard cells: {sorted(overlap)}")

    absorbing = np.zeros(n_cells, dtype=bool)
    absorbing[list(goals | hazards)] = True
    # a grid without free cells has nowhere to spawn and starts on its absorbing cells
    if not absorbing.all() and (len(spawns) != N_SPAWNS or len(set(spawns)) != N_SPAWNS):
        raise InvalidEnvironmentError(f"expected {N_SPAWNS} distinct spawn cells, got {spawns}")

    transition = np.zeros((n_cells, len(ACTIONS), n_cells))
    for cell in range(n_cells):
        row, col = divmod(cell, size)
        for a, (dr, dc) in enumerate(ACTIONS):
            if absorbing[cell]:
                target = cell
            else:
                r, c = row + dr, col + dc
                target = r * size + c if 0 <= r < size and 0 <= c < size else cell
            transition[cell, a, target] = 1.0

    initial = np.zeros(n_cells)
    if spawns:
        np.add.at(initial, spawns, 1.0)
    else:
        initial[list(goals | hazards)] = 1.0
    initial /= initial.sum()

    goal_flags = np.zeros(n_cells, dtype=bool)
    goal_flags[list(goals)] = True
    reward = np.zeros((n_cells, len(ACTIONS)))
    reward[goal_flags] = goal_reward

    mdp = TabularMdp(
        transition=transition,
        absorbing=absorbing,
        initial_dist=initial,
        gamma=gamma,
        true_reward=reward,
        goal=goal_flags,
    )
    logger.info(
        f"Built {size}x{size} point-mass grid: {len(spawns)} spawns, {len(goals)} goals, {len(hazards)} hazards"
    )
    return mdp


def default_pointmass_layout(size: int = 7) -> Dict:
    """Corner spawns, centre goal and a hazard ring with one gap per side.

    The ring sits at Chebyshev radius ``size // 2 - 1`` around the centre.
    """
    if size < 5 or size % 2 == 0:
        raise InvalidEnvironmentError("default layout needs an odd size of at least 5")

    centre = size // 2
    radius = centre - 1
    hazards: List[int] = []
    for row in range(size):
        for col in range(size):
            if max(abs(row - centre), abs(col - centre)) != radius:
                continue
            if row == centre or col == centre:
                continue
            hazards.append(row * size + col)

    last = size - 1
    return {
        "size": size,
        "spawn_cells": [0, last, last * size, last * size + last],
        "goal_cells": [centre * size + centre],
        "hazard_cells": hazards,
    }


def load_environment(spec: Dict, gamma: float) -> TabularMdp:
    """Build a grid from a JSON-shaped environment dict.

    Missing cell lists are filled from the default layout for ``size``.
    """
    unknown = set(spec) - ENVIRONMENT_KEYS
    if unknown:
        raise InvalidEnvironmentError(f"unknown environment keys: {sorted(unknown)}")
    if "gamma" in spec and spec["gamma"] != gamma:
        raise InvalidEnvironmentError(f"environment gamma {spec['gamma']} differs from algorithm gamma {gamma}")

    size = int(spec.get("size", 7))
    params = {}
    if not {"spawn_cells", "goal_cells", "hazard_cells"} <= set(spec):
        params = default_pointmass_layout(size)
    params.update({k: v for k, v in spec.items() if k != "gamma"})
    return build_pointmass_grid(gamma=gamma, **params)


def load_environment_file(path, gamma: float) -> TabularMdp:
    with open(Path(path), "r", encoding="utf-8") as f:
        return load_environment(json.load(f), gamma)
