"""LS-IQ tabular imitation-learning toolkit."""

__version__ = "0.1.0"
