"""Symbolic-regression boosting.

Gradient boosting in which every stage is a genetic-programming symbolic
regressor fitted to the previous stages' residuals, plus the machinery to
benchmark it against a single regressor.
"""

__version__ = "0.1.0"

from .boosting import SyrboConfig, SyrboModel, fit, predict  # noqa: E402
from .data import Dataset, kfold, l2_normalize_rows, load_dataset  # noqa: E402
from .gp import GpConfig, GpRegressor, evaluate, evolve  # noqa: E402
from .program import Program, parse_sexpr, to_sexpr  # noqa: E402

__all__ = [
    "Dataset", "GpConfig", "GpRegressor", "Program", "SyrboConfig", "SyrboModel",
    "evaluate", "evolve", "fit", "kfold", "l2_normalize_rows", "load_dataset",
    "parse_sexpr", "predict", "to_sexpr",
]
