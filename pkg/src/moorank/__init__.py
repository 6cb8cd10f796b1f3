"""Constrained, dynamic, multi-objective evolutionary optimization with a
grid-search baseline, hypervolume/confidence metrics, and an experiment CLI.
"""

from moorank.core import ObjectiveSense, Solution, canonicalize
from moorank.kernels import active_backend

__version__ = "0.1.0"

__all__ = ["ObjectiveSense", "Solution", "canonicalize", "active_backend", "__version__"]
