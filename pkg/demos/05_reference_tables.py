"""
Re-deriving the published win/loss counts
=========================================

The package ships the published per-dataset medians and p-values for 2 to 5
stages. Classifying each row and counting reproduces the published summary.
"""

from syrbo.reference import PUBLISHED_SUMMARY, STAGES, load_reference_rows, reference_outcomes
from syrbo.stats import format_summary_table, summarize

rows = load_reference_rows(2)
print(rows[0])

table = [(s, summarize(reference_outcomes(s))) for s in STAGES]
print(format_summary_table(table))

for s, summary in table:
    assert tuple(summary) == PUBLISHED_SUMMARY[s]
