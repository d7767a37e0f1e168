"""Noncommutative concentration inequalities: evaluators, Monte Carlo checks and experiments."""
from nc_concentration.logger import GLOBAL_LOGGER, CustomLogger

__version__ = "0.1.0"

__all__ = ["GLOBAL_LOGGER", "CustomLogger", "__version__"]
