"""Published per-dataset results for 2- to 5-stage boosting, as shipped data.

Medians in the table are rounded to two decimals, so some pairs print as
equal even though one algorithm was listed (and counted) as the winner.
:func:`reference_outcomes` restores that ordering by moving the winner's
median down by one ulp, the smallest change that makes it strictly lower.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .stats import ComparisonOutcome

STAGES = (2, 3, 4, 5)

#: (datasets, wins, significant, losses, insignificant) per stage count
PUBLISHED_SUMMARY = {
    2: (98, 78, 48, 20, 16),
    3: (98, 83, 63, 15, 13),
    4: (98, 84, 71, 14, 12),
    5: (98, 87, 70, 11, 9),
}


@dataclass(frozen=True)
class ReferenceRow:
    stages: int
    dataset: str
    syrbo_mae: float
    baseline_mae: float
    p_value: float
    listed_first: str
    marker: str
    syrbo_seconds: float
    baseline_seconds: float


def load_reference_rows(stages: int | None = None) -> list:
    text = resources.files("syrbo.resources").joinpath("benchmark_reference.tsv").read_text()
    body = [ln for ln in io.StringIO(text) if not ln.startswith("#")]
    rows = []
    for rec in csv.DictReader(body, delimiter="\t"):
        row = ReferenceRow(
            int(rec["stages"]), rec["dataset"], float(rec["syrbo_mae"]),
            float(rec["baseline_mae"]), float(rec["p_value"]), rec["listed_first"],
            "" if rec["marker"] == "-" else rec["marker"],
            float(rec["syrbo_seconds"]), float(rec["baseline_seconds"]),
        )
        if stages is None or row.stages == stages:
            rows.append(row)
    return rows


def reference_triple(row: ReferenceRow) -> tuple:
    """``(median_syrbo, median_baseline, p_value)`` with display ties broken
    in favour of the algorithm the table lists first."""
    s, b = row.syrbo_mae, row.baseline_mae
    if s == b:
        if row.listed_first == "syrbo":
            s = float(np.nextafter(s, -np.inf))
        else:
            b = float(np.nextafter(b, -np.inf))
    return s, b, row.p_value


def reference_outcomes(stages: int) -> list:
    return [ComparisonOutcome(r.dataset, *reference_triple(r)) for r in load_reference_rows(stages)]
