import numpy as np
import pytest

from syrbo import boosting
from syrbo.boosting import SyrboConfig, SyrboModel, fit, predict, stage_seed
from syrbo.gp import GpConfig, evaluate, evolve
from syrbo.program import to_sexpr

SMALL = GpConfig(population_size=40, generations=6, seed=77)


def _toy(seed=0, n=50):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, (n, 3))
    return X, X[:, 0] * X[:, 1] + np.sin(3 * X[:, 2])


def test_config_validation():
    with pytest.raises(ValueError):
        SyrboConfig(0)
    with pytest.raises(ValueError):
        SyrboConfig(2.5)


def test_single_stage_is_plain_evolve():
    X, y = _toy()
    model = fit(SyrboConfig(1, SMALL), X, y)
    gp = evolve(SMALL.replace(seed=stage_seed(SMALL.seed, 0)), X, y)
    assert model.boosters[0] == gp
    assert np.array_equal(predict(model, X), gp.predict(X))


def test_residual_bookkeeping():
    X, y = _toy(1)
    y_before = y.copy()
    model, final = fit(SyrboConfig(3, SMALL), X, y, return_residuals=True)
    assert np.array_equal(y, y_before)
    b0 = model.boosters[0]
    stage1_target = y - evaluate(b0.program, X)
    again = evolve(SMALL.replace(seed=stage_seed(SMALL.seed, 1)), X, stage1_target)
    assert model.boosters[1] == again
    assert np.array_equal(final, y - predict(model, X))


def test_stage_sum_decomposition():
    X, y = _toy(2)
    model = fit(SyrboConfig(4, SMALL), X, y)
    Xn = np.random.default_rng(9).uniform(-2, 2, (30, 3))
    expected = np.zeros(30)
    for b in model.boosters:
        expected = expected + evaluate(b.program, Xn)
    assert np.array_equal(predict(model, Xn), expected)


def test_stage_seeds_differ():
    assert len({stage_seed(5, s) for s in range(10)}) == 10
    assert stage_seed(5, 0) == stage_seed(5, 0)


def test_boosting_usually_lowers_training_error():
    X, y = _toy(3, n=80)
    better = 0
    for seed in range(20):
        gp = GpConfig(population_size=50, generations=8, seed=seed)
        model = fit(SyrboConfig(3, gp), X, y)
        full = np.mean(np.abs(predict(model, X) - y))
        if full <= model.boosters[0].fitness:
            better += 1
    assert better >= 15


def test_predict_edge_cases():
    X, y = _toy(4)
    model = fit(SyrboConfig(2, SMALL), X, y)
    assert predict(model, np.zeros((0, 3))).shape == (0,)
    with pytest.raises(ValueError):
        predict(model, np.zeros((4, 2)))


def test_fit_preconditions():
    with pytest.raises(ValueError):
        fit(SyrboConfig(1, SMALL), np.zeros((1, 2)), [1.0])
    with pytest.raises(ValueError):
        fit(SyrboConfig(1, SMALL), np.zeros((3, 2)), [1.0, 2.0])


def test_model_file_round_trip(tmp_path):
    X, y = _toy(5)
    model = fit(SyrboConfig(3, SMALL), X, y)
    path = tmp_path / "m.json"
    boosting.save_model(model, path, header={"note": "x"})
    loaded = boosting.load_model(path)
    assert loaded.config == model.config
    assert loaded.feature_count == 3
    assert [to_sexpr(b.program) for b in loaded.boosters] == [
        to_sexpr(b.program) for b in model.boosters]
    assert np.array_equal(predict(loaded, X), predict(model, X))
    # bytes are stable across save/load/save
    again = boosting.dumps_model(loaded, header={"note": "x"})
    assert again == path.read_text()


def test_model_file_rejects_bad_documents():
    X, y = _toy(6)
    doc = boosting.model_to_dict(fit(SyrboConfig(1, SMALL), X, y))
    with pytest.raises(ValueError):
        boosting.model_from_dict({**doc, "format_version": 99})
    with pytest.raises(ValueError):
        boosting.model_from_dict({**doc, "stages": 2})
    with pytest.raises(ValueError):
        boosting.model_from_dict({**doc, "feature_count": 0, "boosters": ["x2"]})


def test_model_booster_count_invariant():
    X, y = _toy(7)
    model = fit(SyrboConfig(2, SMALL), X, y)
    with pytest.raises(ValueError):
        SyrboModel(model.boosters[:1], model.config, 3)
