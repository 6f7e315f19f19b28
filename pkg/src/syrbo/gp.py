"""Tree-based genetic programming symbolic regressor.

Generational GP with tournament selection, subtree crossover and three
mutation operators (subtree, hoist, point). Fitness is mean absolute error
plus a per-node parsimony penalty; the best program ever seen is returned.

Everything random flows through one ``numpy.random.Generator`` per
:func:`evolve` call, consumed in a fixed order: initial population first,
then per generation, per offspring. A run is therefore a pure function of
``(config, X, y)``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .primitives import BY_ARITY, FUNCTION_SET, KERNELS, Primitive
from .program import Program, subtree_end, to_sexpr

#: fitness assigned to programs producing any non-finite prediction
WORST_FITNESS = math.inf


@dataclass(frozen=True)
class GpConfig:
    """Evolution settings. Defaults follow gplearn's ``SymbolicRegressor``
    except population size and generation count, which are 200 each."""

    population_size: int = 200
    generations: int = 200
    tournament_size: int = 20
    crossover_prob: float = 0.9
    subtree_mut_prob: float = 0.01
    hoist_mut_prob: float = 0.01
    point_mut_prob: float = 0.01
    point_replace_prob: float = 0.05
    init_depth_min: int = 2
    init_depth_max: int = 6
    constant_range: tuple = (-1.0, 1.0)
    parsimony_coefficient: float = 0.001
    hard_node_cap: int = 2048
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
        probs = (self.crossover_prob, self.subtree_mut_prob,
                 self.hoist_mut_prob, self.point_mut_prob)
        if any(not 0.0 <= p <= 1.0 for p in probs + (self.point_replace_prob,)):
            raise ValueError("probabilities must lie in [0, 1]")
        if sum(probs) > 1.0 + 1e-12:
            raise ValueError("crossover and mutation probabilities sum to more than 1")
        if not 0 <= self.init_depth_min <= self.init_depth_max:
            raise ValueError("need 0 <= init_depth_min <= init_depth_max")
        lo, hi = self.constant_range
        if not lo <= hi:
            raise ValueError("constant_range must be (low, high) with low <= high")
        if self.parsimony_coefficient < 0:
            raise ValueError("parsimony_coefficient must be non-negative")
        if self.hard_node_cap < 1:
            raise ValueError("hard_node_cap must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "constant_range", (float(lo), float(hi)))

    def replace(self, **changes) -> "GpConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["constant_range"] = list(self.constant_range)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GpConfig":
        d = dict(d)
        if "constant_range" in d:
            d["constant_range"] = tuple(d["constant_range"])
        return cls(**d)


# ---------------------------------------------------------------- creation

def _terminal(n_features, lo, hi, rng):
    if rng.random() < 0.5:
        return int(rng.integers(n_features))
    return float(rng.uniform(lo, hi))


def _build(out, level, target, min_depth, full, n_features, lo, hi, rng):
    if level == target:
        out.append(_terminal(n_features, lo, hi, rng))
        return
    if not full and level >= min_depth:
        # grow: terminal vs. primitive weighted by how many of each exist
        if rng.integers(len(FUNCTION_SET) + n_features + 1) >= len(FUNCTION_SET):
            out.append(_terminal(n_features, lo, hi, rng))
            return
    prim = FUNCTION_SET[rng.integers(len(FUNCTION_SET))]
    out.append(prim)
    for _ in range(prim.arity):
        _build(out, level + 1, target, min_depth, full, n_features, lo, hi, rng)


def _random_nodes(config: GpConfig, n_features: int, rng) -> list:
    target = int(rng.integers(config.init_depth_min, config.init_depth_max + 1))
    full = rng.random() < 0.5
    lo, hi = config.constant_range
    out: list = []
    _build(out, 0, target, config.init_depth_min, full, n_features, lo, hi, rng)
    return out


def random_program(config: GpConfig, n_features: int, rng) -> Program:
    """Ramped half-and-half initialization.

    A target depth is drawn uniformly from the configured range, then the
    tree is built by the "full" or "grow" method with equal probability.
    Grow trees always reach ``init_depth_min``.
    """
    if n_features < 1:
        raise ValueError("n_features must be >= 1")
    return Program(tuple(_random_nodes(config, n_features, rng)))


# -------------------------------------------------------------- evaluation

def _columns(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
    return [np.ascontiguousarray(X[:, j]) for j in range(X.shape[1])], X.shape[0]


def _run(nodes, cols):
    stack = []
    push = stack.append
    for node in reversed(nodes):
        t = type(node)
        if t is int:
            push(cols[node])
        elif t is float:
            push(node)
        else:
            k = node.arity
            if k == 1:
                push(KERNELS[node](stack.pop()))
            elif k == 2:
                a = stack.pop()
                push(KERNELS[node](a, stack.pop()))
            else:
                args = stack[:-k - 1:-1]
                del stack[-k:]
                push(KERNELS[node](*args))
    return stack[0]


def _evaluate_columns(nodes, cols, n_rows):
    with np.errstate(all="ignore"):
        out = _run(nodes, cols)
    out = np.asarray(out, dtype=np.float64)
    if out.ndim == 0:
        out = np.full(n_rows, out, dtype=np.float64)
    return out


def evaluate(program: Program, X) -> np.ndarray:
    """Evaluate ``program`` on every row of ``X``.

    Non-finite results are returned as-is.

    :raises ValueError: if the program uses a feature index outside ``X``.
    """
    if not isinstance(program, Program):
        program = Program(tuple(program))
    cols, n = _columns(X)
    if program.max_feature >= len(cols):
        raise ValueError(
            f"program uses feature x{program.max_feature} but X has {len(cols)} column(s)")
    return _evaluate_columns(program.nodes, cols, n)


def _score(pred, y, n_nodes, parsimony):
    raw = float(np.mean(np.abs(pred - y)))
    if not math.isfinite(raw):
        return WORST_FITNESS, WORST_FITNESS
    return raw, raw + parsimony * n_nodes


def fitness(program: Program, X, y, parsimony_coefficient: float = 0.001):
    """Return ``(raw, penalized)``: MAE, and MAE plus a per-node penalty.

    A program with any non-finite prediction scores ``(inf, inf)``.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0:
        raise ValueError("cannot score on an empty dataset")
    pred = evaluate(program, X)
    if pred.shape != y.shape:
        raise ValueError(f"X has {pred.shape[0]} rows but y has {y.shape[0]}")
    return _score(pred, y, len(program), parsimony_coefficient)


# --------------------------------------------------------------- selection

def tournament_select(population, k: int, rng):
    """Pick the best of ``k`` individuals drawn uniformly with replacement.

    ``population`` is a sequence of ``(program, penalized_fitness)``. Ties go
    to the smaller program, then to the earlier population index.
    """
    if not population:
        raise ValueError("empty population")
    idx = rng.integers(len(population), size=k).tolist()
    best = min(idx, key=lambda i: (population[i][1], len(population[i][0]), i))
    return population[best][0]


def _tournament(keys, k, rng):
    # keys[i] == (penalized, length, i); returns the winning index
    return min(rng.integers(len(keys), size=k).tolist(), key=keys.__getitem__)


# ---------------------------------------------------------------- variation

def _random_subtree(nodes, rng):
    start = int(rng.integers(len(nodes)))
    return start, subtree_end(nodes, start)


def _crossover_nodes(parent, donor, rng, cap):
    start, end = _random_subtree(parent, rng)
    dstart, dend = _random_subtree(donor, rng)
    child = parent[:start] + donor[dstart:dend] + parent[end:]
    return parent if len(child) > cap else child


def _subtree_mutation_nodes(parent, config, n_features, rng):
    start, end = _random_subtree(parent, rng)
    chicken = tuple(_random_nodes(config, n_features, rng))
    child = parent[:start] + chicken + parent[end:]
    return parent if len(child) > config.hard_node_cap else child


def _hoist_nodes(parent, rng):
    start, end = _random_subtree(parent, rng)
    sub = parent[start:end]
    hstart, hend = _random_subtree(sub, rng)
    return parent[:start] + sub[hstart:hend] + parent[end:]


def _point_nodes(parent, config, n_features, rng):
    hits = np.flatnonzero(rng.random(len(parent)) < config.point_replace_prob)
    if hits.size == 0:
        return parent
    lo, hi = config.constant_range
    child = list(parent)
    for i in hits.tolist():
        node = child[i]
        if isinstance(node, Primitive):
            same = BY_ARITY[node.arity]
            child[i] = same[rng.integers(len(same))]
        else:
            child[i] = _terminal(n_features, lo, hi, rng)
    return tuple(child)


def subtree_crossover(parent: Program, donor: Program, rng,
                      hard_node_cap: int = GpConfig.hard_node_cap) -> Program:
    """Swap a uniformly chosen subtree of ``parent`` for one of ``donor``.

    Falls back to an unchanged copy of ``parent`` if the child would exceed
    ``hard_node_cap`` nodes.
    """
    return Program(_crossover_nodes(parent.nodes, donor.nodes, rng, hard_node_cap))


def subtree_mutation(parent: Program, config: GpConfig, n_features: int, rng) -> Program:
    """Replace a random subtree with a freshly initialized random tree."""
    return Program(_subtree_mutation_nodes(parent.nodes, config, n_features, rng))


def hoist_mutation(parent: Program, rng) -> Program:
    """Replace a random subtree with one of its own subtrees."""
    return Program(_hoist_nodes(parent.nodes, rng))


def point_mutation(parent: Program, config: GpConfig, n_features: int, rng) -> Program:
    """Resample each node with probability ``config.point_replace_prob``.

    Primitives are swapped for a primitive of the same arity, terminals for
    a fresh terminal.
    """
    return Program(_point_nodes(parent.nodes, config, n_features, rng))


# ---------------------------------------------------------------- evolution

@dataclass(frozen=True)
class GpRegressor:
    """Best-of-run program together with the configuration that evolved it.

    ``fitness`` is the raw training MAE of ``program``. ``history`` holds the
    best penalized fitness of each population, generation 0 first.
    """

    program: Program
    config: GpConfig
    fitness: float
    history: tuple = field(default=(), compare=False)

    def predict(self, X) -> np.ndarray:
        return evaluate(self.program, X)

    def __str__(self) -> str:
        return to_sexpr(self.program)


def _check_xy(X, y):
    cols, n = _columns(X)
    y = np.asarray(y, dtype=np.float64)
    if n == 0 or not cols:
        raise ValueError("X must have at least one row and one column")
    if y.ndim != 1 or y.shape[0] != n:
        raise ValueError(f"y must be a vector of length {n}")
    return cols, n, y


def evolve(config: GpConfig, X, y) -> GpRegressor:
    """Run generational GP on ``(X, y)`` and return the best program seen.

    ``config.generations`` rounds of breeding follow the random initial
    population, so ``generations=0`` returns the best initial program.
    """
    cols, n, y = _check_xy(X, y)
    nf = len(cols)
    rng = np.random.default_rng(config.seed)
    cap = config.hard_node_cap
    parsimony = config.parsimony_coefficient
    pc = config.crossover_prob
    ps = pc + config.subtree_mut_prob
    ph = ps + config.hoist_mut_prob
    pp = ph + config.point_mut_prob

    def score_all(pop, previous):
        # programs are hashable tuples; copies from the last generation are not re-run
        scores = []
        current = {}
        for nodes in pop:
            s = current.get(nodes)
            if s is None:
                s = previous.get(nodes)
                if s is None:
                    pred = _evaluate_columns(nodes, cols, n)
                    s = _score(pred, y, len(nodes), parsimony)
                current[nodes] = s
            scores.append(s)
        return scores, current

    pop = [tuple(_random_nodes(config, nf, rng)) for _ in range(config.population_size)]
    scores, cache = score_all(pop, {})

    def generation_best(pop, scores):
        i = min(range(len(pop)), key=lambda j: (scores[j][1], len(pop[j]), j))
        return pop[i], scores[i]

    best_nodes, best_score = generation_best(pop, scores)
    history = [best_score[1]]

    for _ in range(config.generations):
        keys = [(s[1], len(p), i) for i, (p, s) in enumerate(zip(pop, scores))]
        k = config.tournament_size
        offspring = []
        for _ in range(config.population_size):
            parent = pop[_tournament(keys, k, rng)]
            r = rng.random()
            if r < pc:
                donor = pop[_tournament(keys, k, rng)]
                child = _crossover_nodes(parent, donor, rng, cap)
            elif r < ps:
                child = _subtree_mutation_nodes(parent, config, nf, rng)
            elif r < ph:
                child = _hoist_nodes(parent, rng)
            elif r < pp:
                child = _point_nodes(parent, config, nf, rng)
            else:
                child = parent
            offspring.append(child)
        pop = offspring
        scores, cache = score_all(pop, cache)
        gen_nodes, gen_score = generation_best(pop, scores)
        history.append(gen_score[1])
        if (gen_score[1], len(gen_nodes)) < (best_score[1], len(best_nodes)):
            best_nodes, best_score = gen_nodes, gen_score

    return GpRegressor(Program(best_nodes), config, best_score[0], tuple(history))
