"""
Boosting symbolic regressors
============================

Each stage evolves a program against the residual left by the stages before
it. The model's prediction is the sum of the stage outputs, in order.
"""

import numpy as np

from syrbo import boosting
from syrbo.boosting import SyrboConfig
from syrbo.gp import GpConfig

rng = np.random.default_rng(3)
X = rng.normal(size=(300, 4))
y = X[:, 0] ** 2 - X[:, 1] + 0.5 * X[:, 2] * X[:, 3] + rng.normal(0, 0.1, 300)

gp = GpConfig(population_size=100, generations=30, seed=7)
model = boosting.fit(SyrboConfig(stages=3, gp=gp), X, y)

for s, booster in enumerate(model.boosters):
    print(f"stage {s}: {booster.program}")
print("training MAE after each stage:", np.round(model.stage_mae, 4))

# predictions are the ordered sum of the boosters
total = sum(b.predict(X) for b in model.boosters)
assert np.array_equal(model.predict(X), total)

###############################################################################
# Models round-trip through JSON

text = boosting.dumps_model(model, {"note": "demo"})
again = boosting.loads_model(text)
assert np.array_equal(again.predict(X), model.predict(X))
print(text[:300], "...")
