"""Genetic-algorithm solvers for multi-robot inspection task allocation
with cooperative (two-robot) tasks."""

from .core import HAVE_NATIVE

__version__ = "0.1.0"

__all__ = ["HAVE_NATIVE", "__version__"]
