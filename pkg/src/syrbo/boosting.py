"""Gradient boosting with symbolic regressors as the boosted learners.

Each stage evolves a GP regressor on the current pseudo-residuals and then
subtracts that regressor's training predictions from the target. The model
predicts the sum of all stage predictions, stage 0 first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .gp import GpConfig, GpRegressor, evaluate, evolve
from .program import parse_sexpr, to_sexpr
from .seeding import derive_seed

FORMAT_VERSION = 1


@dataclass(frozen=True)
class SyrboConfig:
    stages: int
    gp: GpConfig = field(default_factory=GpConfig)

    def __post_init__(self):
        if int(self.stages) != self.stages or self.stages < 1:
            raise ValueError(f"stages must be a positive integer, got {self.stages!r}")


def stage_seed(master: int, stage: int) -> int:
    """Seed for the GP run of boosting stage ``stage``."""
    return derive_seed(master, stage)


@dataclass(frozen=True)
class SyrboModel:
    boosters: tuple
    config: SyrboConfig
    feature_count: int
    #: per-stage training MAE against that stage's target (empty when loaded from disk)
    stage_mae: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.boosters) != self.config.stages:
            raise ValueError(
                f"model has {len(self.boosters)} booster(s) but config says {self.config.stages}")

    def predict(self, X) -> np.ndarray:
        return predict(self, X)


def fit(config: SyrboConfig, X, y, return_residuals: bool = False):
    """Fit ``config.stages`` boosters in sequence to ``(X, y)``.

    :param return_residuals: also return the final pseudo-residual vector.
    :return: a :class:`SyrboModel`, or ``(model, residuals)``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.array(y, dtype=np.float64)  # copy: caller's y stays untouched
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need a 2-D X with at least two rows")
    if y.shape != (X.shape[0],):
        raise ValueError(f"y must be a vector of length {X.shape[0]}")
    boosters = []
    stage_mae = []
    # residuals are taken against the running sum, accumulated in the same
    # order as predict(), so y - predict(model, X) reproduces them bit for bit
    cumulative = np.zeros_like(y)
    residual = y
    for stage in range(config.stages):
        gp_config = config.gp.replace(seed=stage_seed(config.gp.seed, stage))
        gp = evolve(gp_config, X, residual)
        boosters.append(gp)
        stage_mae.append(gp.fitness)
        cumulative = cumulative + gp.predict(X)
        residual = y - cumulative
    model = SyrboModel(tuple(boosters), config, X.shape[1], tuple(stage_mae))
    return (model, residual) if return_residuals else model


def predict(model: SyrboModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.feature_count:
        raise ValueError(
            f"model expects {model.feature_count} feature(s), X has shape {X.shape}")
    prediction = np.zeros(X.shape[0])
    if X.shape[0] == 0:
        return prediction
    for booster in model.boosters:
        prediction = prediction + booster.predict(X)
    return prediction


# ------------------------------------------------------------ model files

def model_to_dict(model: SyrboModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "stages": model.config.stages,
        "gp_config": model.config.gp.to_dict(),
        "feature_count": model.feature_count,
        "boosters": [to_sexpr(b.program) for b in model.boosters],
        "booster_fitness": [b.fitness for b in model.boosters],
    }


def model_from_dict(doc: dict) -> SyrboModel:
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {doc.get('format_version')!r}")
    gp_config = GpConfig.from_dict(doc["gp_config"])
    config = SyrboConfig(int(doc["stages"]), gp_config)
    fitnesses = doc.get("booster_fitness") or [float("nan")] * len(doc["boosters"])
    boosters = tuple(
        GpRegressor(parse_sexpr(text), gp_config.replace(seed=stage_seed(gp_config.seed, s)),
                    float(fit_))
        for s, (text, fit_) in enumerate(zip(doc["boosters"], fitnesses))
    )
    feature_count = int(doc["feature_count"])
    for b in boosters:
        if b.program.max_feature >= feature_count:
            raise ValueError("booster references a feature beyond feature_count")
    return SyrboModel(boosters, config, feature_count)


def dumps_model(model: SyrboModel, header: dict | None = None) -> str:
    doc = model_to_dict(model)
    if header:
        doc = {"provenance": header, **doc}
    return json.dumps(doc, indent=2) + "\n"


def loads_model(text: str) -> SyrboModel:
    return model_from_dict(json.loads(text))


def save_model(model: SyrboModel, path, header: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model, header))


def load_model(path) -> SyrboModel:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
