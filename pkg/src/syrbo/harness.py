"""Replicated k-fold comparison of boosted vs. single-stage symbolic regression."""

from __future__ import annotations

import logging
import math
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import boosting, stats
from .boosting import SyrboConfig
from .data import Dataset, kfold
from .seeding import derive_seed

log = logging.getLogger(__name__)

SYRBO = "syrbo"
BASELINE = "baseline"
ALGORITHMS = (BASELINE, SYRBO)

#: recorded in place of a non-finite test MAE
WORST_MAE = 1e300

# derive_seed path prefixes
_SHUFFLE, _CELL, _PERMUTATION = 0, 1, 2


@dataclass(frozen=True)
class ExperimentConfig:
    syrbo: SyrboConfig
    replicates: int = 30
    folds: int = 5
    master_seed: int = 0

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class ScoreRecord:
    algorithm: str
    replicate: int
    fold: int
    test_mae: float
    fit_seconds: float = field(default=0.0, compare=False)
    dataset: str = ""

    @property
    def key(self):
        return (self.dataset, self.algorithm, self.replicate, self.fold)


def mae(pred, truth) -> float:
    """Mean absolute error."""
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ValueError("mae of empty vectors")
    return float(np.mean(np.abs(pred - truth)))


def shuffle_seed(master_seed: int, replicate: int) -> int:
    return derive_seed(master_seed, _SHUFFLE, replicate)


def cell_seed(master_seed: int, replicate: int, fold: int) -> int:
    """GP seed shared by both algorithms in one (replicate, fold) cell."""
    return derive_seed(master_seed, _CELL, replicate, fold)


def permutation_seed(master_seed: int, dataset_name: str) -> int:
    return derive_seed(master_seed, _PERMUTATION, zlib.crc32(dataset_name.encode("utf-8")))


def splits_for(n_rows: int, config: ExperimentConfig, replicate: int):
    return kfold(n_rows, config.folds, shuffle_seed(config.master_seed, replicate))


def _score(dataset_name, algorithm, replicate, fold, syrbo_config, X, y, train, test):
    start = time.perf_counter()
    model = boosting.fit(syrbo_config, X[train], y[train])
    seconds = time.perf_counter() - start
    score = mae(model.predict(X[test]), y[test])
    if not math.isfinite(score):
        log.warning("%s %s replicate %d fold %d: non-finite test MAE, recording %g",
                    dataset_name, algorithm, replicate, fold, WORST_MAE)
        score = WORST_MAE
    return ScoreRecord(algorithm, replicate, fold, score, seconds, dataset_name)


def _run_cell(dataset, config, replicate, fold, train, test):
    gp = config.syrbo.gp.replace(seed=cell_seed(config.master_seed, replicate, fold))
    X, y = dataset.X, dataset.y
    return [
        _score(dataset.name, SYRBO, replicate, fold,
               SyrboConfig(config.syrbo.stages, gp), X, y, train, test),
        _score(dataset.name, BASELINE, replicate, fold,
               SyrboConfig(1, gp), X, y, train, test),
    ]


def run_experiment(dataset: Dataset, config: ExperimentConfig, jobs: int = 1) -> list:
    """Score both algorithms on every (replicate, fold) cell of ``dataset``.

    The dataset is used as given; normalize it first if wanted. Both
    algorithms see the same splits and the same GP seed in each cell, so the
    baseline equals the first stage of the boosted model. Records come back
    sorted by (algorithm, replicate, fold) whatever ``jobs`` is.
    """
    if dataset.n_rows < config.folds:
        raise ValueError(f"{dataset.name}: {dataset.n_rows} row(s) < {config.folds} folds")
    cells = []
    for r in range(config.replicates):
        for f, split in enumerate(splits_for(dataset.n_rows, config, r)):
            cells.append((r, f, split.train_indices, split.test_indices))
    if jobs == 1:
        results = [_run_cell(dataset, config, *c) for c in cells]
    else:
        from joblib import Parallel, delayed
        results = Parallel(n_jobs=jobs)(delayed(_run_cell)(dataset, config, *c) for c in cells)
    records = [rec for pair in results for rec in pair]
    return sorted(records, key=lambda rec: rec.key)


def scores(records, algorithm: str, dataset: str | None = None) -> np.ndarray:
    return np.array([r.test_mae for r in records
                     if r.algorithm == algorithm and (dataset is None or r.dataset == dataset)])


def median_score(records, algorithm: str, dataset: str | None = None) -> float:
    """Median test MAE of one algorithm (mean of the two middle values for even counts)."""
    values = scores(records, algorithm, dataset)
    if values.size == 0:
        raise ValueError(f"no records for algorithm {algorithm!r}")
    return float(np.median(values))


def median_seconds(records, algorithm: str, dataset: str | None = None) -> float:
    values = [r.fit_seconds for r in records
              if r.algorithm == algorithm and (dataset is None or r.dataset == dataset)]
    return float(np.median(values)) if values else math.nan


def datasets_in(records) -> list:
    """Dataset names in first-seen order."""
    return list(dict.fromkeys(r.dataset for r in records))


def compare(syrbo_records, baseline_records, rounds: int = 10_000,
            master_seed: int = 0) -> list:
    """Per-dataset medians, permutation p-value and outcome label.

    SyRBo scores come from ``syrbo_records`` and baseline scores from
    ``baseline_records``; both usually hold the same experiment. Each
    dataset's permutation stream is seeded from ``master_seed`` and its name,
    so rerunning on stored records reproduces the p-values.
    """
    outcomes = []
    for name in datasets_in(syrbo_records):
        a = scores(syrbo_records, SYRBO, name)
        b = scores(baseline_records, BASELINE, name)
        if a.size == 0 or b.size == 0:
            raise ValueError(f"dataset {name!r}: missing scores for one algorithm")
        p = stats.permutation_test(a, b, rounds, permutation_seed(master_seed, name))
        outcomes.append(stats.ComparisonOutcome(
            name, float(np.median(a)), float(np.median(b)), p))
    return outcomes


# ---------------------------------------------------------------- records I/O

RECORD_COLUMNS = ("dataset", "algorithm", "replicate", "fold", "test_mae")
TIMING_COLUMNS = RECORD_COLUMNS[:4] + ("fit_seconds",)


def _header_lines(header: dict | None):
    return [f"# {k}: {v}\n" for k, v in (header or {}).items()]


def format_records(records, header: dict | None = None, timings: bool = False) -> str:
    """Tab-separated records; ``timings`` writes fit times instead of scores.

    Scores are printed with ``repr`` so they read back bit-identical.
    """
    cols = TIMING_COLUMNS if timings else RECORD_COLUMNS
    lines = _header_lines(header) + ["\t".join(cols) + "\n"]
    for r in records:
        last = r.fit_seconds if timings else r.test_mae
        lines.append(f"{r.dataset}\t{r.algorithm}\t{r.replicate}\t{r.fold}\t{last!r}\n")
    return "".join(lines)


def write_records(path, records, header: dict | None = None, timings: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_records(records, header, timings))


def read_records(path) -> list:
    records = []
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines or tuple(lines[0].split("\t")) != RECORD_COLUMNS:
        raise ValueError(f"{path}: not a records file (expected header {RECORD_COLUMNS})")
    for n, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != len(RECORD_COLUMNS):
            raise ValueError(f"{path}: malformed record on data line {n}")
        name, algorithm, rep, fold, score = parts
        if algorithm not in ALGORITHMS:
            raise ValueError(f"{path}: unknown algorithm {algorithm!r}")
        records.append(ScoreRecord(algorithm, int(rep), int(fold), float(score), 0.0, name))
    return records
