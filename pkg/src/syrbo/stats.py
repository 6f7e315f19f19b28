"""Permutation significance testing and win/loss classification."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

ALPHA = 0.05

SIGNIFICANT_WIN = "significant_win"
INSIGNIFICANT_WIN = "insignificant_win"
SIGNIFICANT_LOSS = "significant_loss"
INSIGNIFICANT_LOSS = "insignificant_loss"
LABELS = (SIGNIFICANT_WIN, INSIGNIFICANT_WIN, SIGNIFICANT_LOSS, INSIGNIFICANT_LOSS)

#: result-table markers: "!" significant win, "=" insignificant loss
MARKERS = {SIGNIFICANT_WIN: "!", INSIGNIFICANT_LOSS: "="}

_CHUNK = 1024


def _statistic(sum_a, total, na, nb):
    return np.abs(sum_a / na - (total - sum_a) / nb)


def n_partitions(na: int, nb: int) -> int:
    return math.comb(na + nb, na)


def permutation_test(a, b, rounds: int = 10_000, rng=None, method: str = "auto") -> float:
    """Two-sided permutation test on the absolute difference of group means.

    :param a: scores of the first group.
    :param b: scores of the second group.
    :param rounds: number of random re-partitions for the Monte-Carlo mode.
    :param rng: ``numpy.random.Generator`` or seed (Monte-Carlo mode only).
    :param method: ``"exact"`` enumerates every split of the pooled scores into
        groups of the original sizes; ``"monte_carlo"`` samples ``rounds`` of
        them; ``"auto"`` is exact whenever that needs at most ``rounds`` splits.
    :return: ``(1 + hits) / (1 + trials)`` where a hit is a split whose
        statistic is at least the observed one. Always in (0, 1].
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if method not in ("auto", "exact", "monte_carlo"):
        raise ValueError(f"unknown method {method!r}")
    na, nb = a.size, b.size
    pooled = np.concatenate([a, b])
    total = pooled.sum()
    observed = _statistic(a.sum(), total, na, nb)
    # slack for summation-order rounding between equal statistics
    tol = 1e-12 * max(1.0, float(np.max(np.abs(pooled))))
    threshold = observed - tol

    if method == "exact" or (method == "auto" and n_partitions(na, nb) <= rounds):
        hits = trials = 0
        combos = itertools.combinations(range(na + nb), na)
        while True:
            chunk = np.array(list(itertools.islice(combos, _CHUNK * 16)), dtype=np.intp)
            if chunk.size == 0:
                break
            stats = _statistic(pooled[chunk].sum(axis=1), total, na, nb)
            hits += int(np.count_nonzero(stats >= threshold))
            trials += len(chunk)
        return (1 + hits) / (1 + trials)

    rng = np.random.default_rng(rng)
    hits = 0
    done = 0
    while done < rounds:
        m = min(_CHUNK, rounds - done)
        perms = rng.permuted(np.broadcast_to(pooled, (m, na + nb)), axis=1)
        stats = _statistic(perms[:, :na].sum(axis=1), total, na, nb)
        hits += int(np.count_nonzero(stats >= threshold))
        done += m
    return (1 + hits) / (1 + rounds)


def classify(median_syrbo: float, median_baseline: float, p_value: float) -> str:
    """Label one dataset's comparison; lower median MAE wins, ties count as losses."""
    if not 0.0 <= p_value <= 1.0:
        raise ValueError(f"p_value must lie in [0, 1], got {p_value}")
    if median_syrbo < median_baseline:
        return SIGNIFICANT_WIN if p_value < ALPHA else INSIGNIFICANT_WIN
    return INSIGNIFICANT_LOSS if p_value >= ALPHA else SIGNIFICANT_LOSS


@dataclass(frozen=True)
class ComparisonOutcome:
    dataset: str
    median_syrbo: float
    median_baseline: float
    p_value: float
    label: str = ""

    def __post_init__(self):
        expected = classify(self.median_syrbo, self.median_baseline, self.p_value)
        if not self.label:
            object.__setattr__(self, "label", expected)
        elif self.label != expected:
            raise ValueError(f"label {self.label!r} inconsistent with medians and p-value")

    @property
    def win(self) -> bool:
        return self.label in (SIGNIFICANT_WIN, INSIGNIFICANT_WIN)

    @property
    def marker(self) -> str:
        return MARKERS.get(self.label, "")

    def to_dict(self) -> dict:
        return {**asdict(self), "marker": self.marker}


class Summary(NamedTuple):
    datasets: int
    wins: int
    significant_wins: int
    losses: int
    insignificant_losses: int


def summarize(outcomes) -> Summary:
    labels = [o.label for o in outcomes]
    return Summary(
        datasets=len(labels),
        wins=labels.count(SIGNIFICANT_WIN) + labels.count(INSIGNIFICANT_WIN),
        significant_wins=labels.count(SIGNIFICANT_WIN),
        losses=labels.count(SIGNIFICANT_LOSS) + labels.count(INSIGNIFICANT_LOSS),
        insignificant_losses=labels.count(INSIGNIFICANT_LOSS),
    )


SUMMARY_HEADER = ("Datasets", "Stages", "Wins", "Significant", "Losses", "Insignificant")


def format_summary_table(rows) -> str:
    """Aligned text table from ``(stages, Summary)`` pairs."""
    body = [
        (s.datasets, stages, s.wins, s.significant_wins, s.losses, s.insignificant_losses)
        for stages, s in rows
    ]
    widths = [max(len(h), *(len(str(r[i])) for r in body)) if body else len(h)
              for i, h in enumerate(SUMMARY_HEADER)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(SUMMARY_HEADER, widths))]
    lines += ["  ".join(str(v).rjust(w) for v, w in zip(r, widths)) for r in body]
    return "\n".join(lines) + "\n"
