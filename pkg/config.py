"""Configuration Management for the LS-IQ Toolkit

This module provides centralized defaults for every experiment component.
Settings can be overridden via environment variables or a .env file.
"""

import logging
import os
from pathlib import Path
from typing import Dict

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Config:
    """Centralized configuration for experiments"""

    # Project paths
    BASE_DIR = Path(__file__).parent
    CONFIGS_DIR = BASE_DIR / "configs"
    OUTPUT_DIR = Path(os.getenv("OUTPUT_DIR", str(BASE_DIR / "runs")))

    # Environment
    GRID_SIZE = int(os.getenv("GRID_SIZE", "7"))
    GAMMA = float(os.getenv("GAMMA", "0.99"))

    # LS-IQ hyperparameters
    LSIQ_C = float(os.getenv("LSIQ_C", "0.5"))
    LSIQ_ALPHA = float(os.getenv("LSIQ_ALPHA", "0.5"))
    LSIQ_BETA = float(os.getenv("LSIQ_BETA", "0.1"))
    LR_Q = float(os.getenv("LR_Q", "0.5"))
    LR_G = float(os.getenv("LR_G", "8.0"))
    TARGET_TAU = float(os.getenv("TARGET_TAU", "0.05"))
    BATCH_SIZE = int(os.getenv("BATCH_SIZE", "64"))

    # Expert
    EXPERT_BETA = float(os.getenv("EXPERT_BETA", "0.01"))
    N_EXPERT_TRAJECTORIES = int(os.getenv("N_EXPERT_TRAJECTORIES", "4"))

    # Training loop
    TOTAL_STEPS = int(os.getenv("TOTAL_STEPS", "6000"))
    EVAL_EVERY = int(os.getenv("EVAL_EVERY", "500"))
    EVAL_EPISODES = int(os.getenv("EVAL_EPISODES", "100"))
    REPLAY_CAPACITY = int(os.getenv("REPLAY_CAPACITY", "5000"))
    WARMUP_STEPS = int(os.getenv("WARMUP_STEPS", "1000"))
    FULL_BATCH = os.getenv("FULL_BATCH", "true").lower() in ("1", "true", "yes")
    SEED = int(os.getenv("SEED", "0"))

    # Logging Configuration
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE = Path(os.getenv("LOG_FILE", str(BASE_DIR / "lsiq.log")))

    @classmethod
    def validate(cls):
        """Validate critical configuration settings"""
        errors = []

        if cls.GRID_SIZE < 5 or cls.GRID_SIZE % 2 == 0:
            errors.append("GRID_SIZE must be an odd number of at least 5")

        if not 0 < cls.GAMMA < 1:
            errors.append("GAMMA must be between 0 and 1 (exclusive)")

        if cls.LSIQ_C <= 0:
            errors.append("LSIQ_C must be positive")

        if not 0 < cls.LSIQ_ALPHA < 1:
            errors.append("LSIQ_ALPHA must be between 0 and 1 (exclusive)")

        if cls.LSIQ_BETA < 0 or cls.EXPERT_BETA <= 0:
            errors.append("LSIQ_BETA must be nonnegative and EXPERT_BETA positive")

        if not 0 < cls.LR_Q <= 1 or cls.LR_G <= 0:
            errors.append("LR_Q must be in (0, 1] (normalized steps) and LR_G positive")

        if not 0 < cls.TARGET_TAU <= 1:
            errors.append("TARGET_TAU must be in (0, 1]")

        for name in ("BATCH_SIZE", "N_EXPERT_TRAJECTORIES", "EVAL_EVERY", "EVAL_EPISODES", "REPLAY_CAPACITY"):
            if getattr(cls, name) <= 0:
                errors.append(f"{name} must be positive")

        if cls.WARMUP_STEPS < 0:
            errors.append("WARMUP_STEPS must be nonnegative")

        if cls.TOTAL_STEPS < 0:
            errors.append("TOTAL_STEPS must be nonnegative")

        if not isinstance(logging.getLevelName(cls.LOG_LEVEL.upper()), int):
            errors.append(f"LOG_LEVEL '{cls.LOG_LEVEL}' is not a logging level")

        if errors:
            raise ValueError("Configuration validation failed:\n" + "\n".join(f"  - {e}" for e in errors))

        return True

    @classmethod
    def setup_logging(cls, verbose: bool = False):
        """Route toolkit logs to stderr and LOG_FILE"""
        level = logging.DEBUG if verbose else getattr(logging, cls.LOG_LEVEL.upper(), logging.INFO)
        logging.basicConfig(
            level=level,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            handlers=[logging.StreamHandler(), logging.FileHandler(cls.LOG_FILE)],
            force=True,
        )

    @classmethod
    def experiment_defaults(cls) -> Dict:
        """Experiment dict used when no --config file is given"""
        return {
            "environment": {"size": cls.GRID_SIZE},
            "lsiq": {
                "c": cls.LSIQ_C,
                "alpha": cls.LSIQ_ALPHA,
                "beta": cls.LSIQ_BETA,
                "gamma": cls.GAMMA,
                "lr_q": cls.LR_Q,
                "lr_g": cls.LR_G,
                "normalized_step": True,
                "batch_size": cls.BATCH_SIZE,
                "target_update": {"kind": "polyak", "tau": cls.TARGET_TAU, "period": 1},
                "clip_targets": True,
                "pessimistic_init": True,
            },
            "n_expert_trajectories": cls.N_EXPERT_TRAJECTORIES,
            "total_steps": cls.TOTAL_STEPS,
            "eval_every": cls.EVAL_EVERY,
            "eval_episodes": cls.EVAL_EPISODES,
            "replay_capacity": cls.REPLAY_CAPACITY,
            "warmup_steps": cls.WARMUP_STEPS,
            "full_batch": cls.FULL_BATCH,
            "expert_beta": cls.EXPERT_BETA,
            "seed": cls.SEED,
        }

    @classmethod
    def display(cls):
        """Display current configuration"""
        print("=" * 60)
        print("LS-IQ Toolkit Configuration")
        print("=" * 60)
        print(f"Grid Size: {cls.GRID_SIZE}")
        print(f"Discount (gamma): {cls.GAMMA}")
        print(f"Regularizer c: {cls.LSIQ_C}")
        print(f"Mixture alpha: {cls.LSIQ_ALPHA}")
        print(f"Entropy beta: {cls.LSIQ_BETA}")
        print(f"Expert beta: {cls.EXPERT_BETA}")
        print(f"Learning Rates (Q / G): {cls.LR_Q} / {cls.LR_G}")
        print(f"Target Polyak tau: {cls.TARGET_TAU}")
        print(f"Batch Size: {cls.BATCH_SIZE}")
        print(f"Expert Trajectories: {cls.N_EXPERT_TRAJECTORIES}")
        print(f"Total Steps: {cls.TOTAL_STEPS}")
        print(f"Evaluate Every: {cls.EVAL_EVERY} steps ({cls.EVAL_EPISODES} episodes)")
        print(f"Replay Capacity: {cls.REPLAY_CAPACITY}")
        print(f"Warm-up Steps: {cls.WARMUP_STEPS}")
        print(f"Full-batch Updates: {cls.FULL_BATCH}")
        print(f"Seed: {cls.SEED}")
        print(f"Output Dir: {cls.OUTPUT_DIR}")
        print(f"Log Level: {cls.LOG_LEVEL}")
        print("=" * 60)


if __name__ == "__main__":
    # Test configuration
    try:
        Config.validate()
        Config.display()
        print("\n✓ Configuration is valid!")
    except ValueError as e:
        print(f"\n✗ Configuration error:\n{e}")
