"""
Cross-validated comparison against the single-stage baseline
============================================================

The harness scores boosting and a one-stage regressor on identical folds
with identical seeds, then compares the two score samples with a
permutation test.
"""

import numpy as np

from syrbo.boosting import SyrboConfig
from syrbo.data import Dataset
from syrbo.gp import GpConfig
from syrbo.harness import ExperimentConfig, compare, run_experiment
from syrbo.stats import format_summary_table, permutation_test, summarize

rng = np.random.default_rng(100)
X = rng.normal(size=(150, 4))
y = X[:, 0] * X[:, 1] + X[:, 2] + rng.normal(0, 0.1, 150)
ds = Dataset(X, y, ("x0", "x1", "x2", "x3"), "prod_plus").normalized()

config = ExperimentConfig(SyrboConfig(3, GpConfig(population_size=50, generations=15)),
                          replicates=3, folds=5, master_seed=2024)
records = run_experiment(ds, config)
print(len(records), "scores, e.g.", records[0])

outcomes = compare(records, records, rounds=5_000, master_seed=config.master_seed)
for o in outcomes:
    print(o.dataset, o.median_syrbo, o.median_baseline, o.p_value, o.label)
print(format_summary_table([(3, summarize(outcomes))]))

###############################################################################
# The test itself. Small samples are enumerated exactly.

print(permutation_test([0, 0, 0], [10, 10, 10]))   # 3/21
print(permutation_test(rng.normal(size=30), rng.normal(0.8, 1, 30), 10_000, rng))
