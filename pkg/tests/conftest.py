import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.mdp.pointmass import build_pointmass_grid, default_pointmass_layout
from src.mdp.tabular import random_mdp
from src.soft_rl.policy import Policy


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_mdp(rng):
    """6 states, 3 actions, the last state absorbing."""
    return random_mdp(6, 3, 0.9, rng, n_absorbing=1)


@pytest.fixture
def random_policy(rng, small_mdp):
    return Policy(rng.dirichlet(np.ones(small_mdp.n_actions), size=small_mdp.n_states))


@pytest.fixture
def grid():
    return build_pointmass_grid(gamma=0.99, **default_pointmass_layout(7))
