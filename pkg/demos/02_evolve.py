"""
Evolving a single expression
============================

``evolve`` runs tournament selection, subtree crossover and three mutation
operators for a fixed number of generations. It returns the best program
seen in any generation, scored by MAE plus a small per-node penalty.
"""

import numpy as np

from syrbo.gp import GpConfig, evolve

rng = np.random.default_rng(0)
X = rng.uniform(-1, 1, size=(200, 3))
y = X[:, 0] * X[:, 1] + X[:, 2]

config = GpConfig(population_size=200, generations=40, seed=1)
reg = evolve(config, X, y)

print("program:", reg.program)
print("training MAE:", reg.fitness)

# best penalized fitness per generation; never increases
print(np.round(reg.history[::5], 4))

pred = reg.predict(X)
assert np.mean(np.abs(pred - y)) == reg.fitness

# the same config and data always give the same program
assert str(evolve(config, X, y).program) == str(reg.program)
