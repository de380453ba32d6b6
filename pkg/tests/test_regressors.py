import json

import numpy as np
import pytest

from hybridfi.data import Dataset
from hybridfi.errors import ConfigError, MetricError, ModelError
from hybridfi.regressors import (
    PredictionMetrics,
    RegressorSpec,
    predict,
    predict_dataset,
    r2_score,
    rmse,
    train,
)
from hybridfi.regressors.adaboost import fit_adaboost_r2
from hybridfi.regressors.tree import LEAF, build_tree

from conftest import random_dataset


def test_decision_tree_memorizes_distinct_rows():
    d = random_dataset(150, 3, seed=1)
    model = train(RegressorSpec(kind="decision_tree"), d)
    np.testing.assert_array_equal(predict(model, d.values), d.target)
    assert r2_score(d.target, predict(model, d.values)) == 1.0


def test_single_leaf_tree_predicts_mean():
    d = random_dataset(40, 2, seed=2)
    model = train(RegressorSpec(kind="decision_tree", max_depth=0), d)
    assert model.trees[0].node_count == 1
    np.testing.assert_allclose(predict(model, d.values[:5]), d.target.mean())


def test_adaboost_with_one_estimator_is_its_tree():
    d = random_dataset(100, 3, seed=3)
    model = train(RegressorSpec(kind="adaboost", n_estimators=1, seed=4), d)
    assert len(model.trees) == 1
    np.testing.assert_array_equal(predict(model, d.values), model.trees[0].predict(d.values))


def test_forest_of_one_equals_decision_tree():
    d = random_dataset(200, 5, seed=5)
    forest = train(
        RegressorSpec(kind="random_forest", n_estimators=1, bootstrap=False, feature_subsample=1.0, max_depth=6), d
    )
    tree = train(RegressorSpec(kind="decision_tree", max_depth=6), d)
    rows = random_dataset(50, 5, seed=6).values
    np.testing.assert_array_equal(predict(forest, rows), predict(tree, rows))


def test_forest_prediction_is_member_mean():
    d = random_dataset(120, 4, seed=7)
    model = train(RegressorSpec(kind="random_forest", n_estimators=7, seed=1), d)
    rows = random_dataset(10, 4, seed=8).values
    members = np.mean([t.predict(rows) for t in model.trees], axis=0)
    np.testing.assert_allclose(predict(model, rows), members, rtol=0, atol=1e-15)


def test_forest_parallel_equals_sequential():
    d = random_dataset(100, 4, seed=9)
    seq = train(RegressorSpec(kind="random_forest", n_estimators=6, seed=3, n_jobs=1), d)
    par = train(RegressorSpec(kind="random_forest", n_estimators=6, seed=3, n_jobs=2), d)
    np.testing.assert_array_equal(predict(seq, d.values), predict(par, d.values))


@pytest.mark.parametrize("kind", ["decision_tree", "random_forest", "adaboost"])
def test_training_is_deterministic(kind):
    d = random_dataset(120, 3, seed=10)
    spec = RegressorSpec(kind=kind, n_estimators=5, seed=11)
    a = train(spec, d)
    b = train(spec, d)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
    np.testing.assert_array_equal(predict(a, d.values), predict(b, d.values))


def test_leaves_respect_min_samples_leaf():
    d = random_dataset(200, 3, seed=12)
    tree = build_tree(d.values, d.target, min_samples_leaf=7)
    leaves = tree.feature == LEAF
    assert np.all(tree.n_node_samples[leaves] >= 7)


def test_splits_strictly_reduce_error():
    d = random_dataset(80, 2, seed=13)
    tree = build_tree(d.values, d.target, max_depth=4)
    node_rows = {0: np.arange(d.n_rows)}
    for node in range(tree.node_count):
        if tree.feature[node] == LEAF:
            continue
        rows = node_rows[node]
        go_left = d.values[rows, tree.feature[node]] <= tree.threshold[node]
        node_rows[tree.left[node]], node_rows[tree.right[node]] = rows[go_left], rows[~go_left]
        y = d.target
        parent = np.sum((y[rows] - y[rows].mean()) ** 2)
        children = sum(np.sum((y[r] - y[r].mean()) ** 2) for r in (rows[go_left], rows[~go_left]))
        assert children < parent


def test_adaboost_sample_weights_stay_a_distribution():
    d = random_dataset(150, 3, seed=14)
    for loss_shape in ("linear", "square", "exponential"):
        boosted = fit_adaboost_r2(d.values, d.target, 20, 3, 1, loss_shape, seed=0)
        assert all(abs(s - 1.0) <= 1e-12 for s in boosted.weight_sums)


def test_adaboost_zero_variance_target_predicts_constant():
    X = random_dataset(30, 2).values
    d = Dataset.from_arrays(X, np.full(30, 2.5), ["a", "b"])
    model = train(RegressorSpec(kind="adaboost", n_estimators=10), d)
    np.testing.assert_array_equal(predict(model, X), 2.5)


def test_forest_sanity_floor():
    rng = np.random.default_rng(15)
    X = rng.uniform(-1, 1, size=(2000, 1))
    y = 3 * X[:, 0] + rng.normal(0, 0.1, 2000)
    d = Dataset.from_arrays(X, y, ["x1"])
    train_set, test_set = d.take_rows(np.arange(1500)), d.take_rows(np.arange(1500, 2000))
    model = train(RegressorSpec(kind="random_forest", n_estimators=20, min_samples_leaf=5, seed=0), train_set)
    assert r2_score(test_set.target, predict_dataset(model, test_set)) >= 0.9


def test_column_contract():
    d = random_dataset(30, 3)
    model = train(RegressorSpec(kind="decision_tree"), d)
    with pytest.raises(ModelError):
        predict(model, np.zeros((2, 2)))
    renamed = Dataset.from_arrays(d.values, d.target, ["x1", "x3", "x2"])
    with pytest.raises(ModelError):
        predict_dataset(model, renamed)


def test_train_rejects_empty_and_bad_specs():
    empty = Dataset.from_arrays(np.zeros((0, 2)), np.zeros(0), ["a", "b"])
    with pytest.raises(ModelError):
        train(RegressorSpec(kind="decision_tree"), empty)
    with pytest.raises(ConfigError):
        RegressorSpec(kind="gbm")
    with pytest.raises(ConfigError):
        RegressorSpec(n_estimators=0)
    with pytest.raises(ConfigError):
        RegressorSpec(feature_subsample=0.0)
    with pytest.raises(ConfigError):
        RegressorSpec(kind="random_forest", seed=-3)


def test_model_summary_is_json():
    d = random_dataset(40, 2)
    model = train(RegressorSpec(kind="adaboost", n_estimators=3), d)
    summary = json.loads(json.dumps(model.to_dict()))
    assert summary["spec"]["kind"] == "adaboost"
    assert len(summary["trees"]) == len(summary["member_weights"])


def test_r2_score_examples():
    y = np.array([1.0, 2.0, 3.0])
    assert r2_score(y, y) == 1.0
    assert r2_score(y, np.full(3, y.mean())) == 0.0
    assert r2_score(y, [1.0, 2.0, 4.0]) == pytest.approx(0.5)
    with pytest.raises(MetricError):
        r2_score([1.0, 1.0], [1.0, 2.0])


def test_rmse_examples():
    y = np.array([1.0, -2.0, 5.0])
    assert rmse(y, y) == 0.0
    assert rmse(y, y + 3.0) == pytest.approx(3.0)
    assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(np.sqrt(12.5))
    with pytest.raises(MetricError):
        rmse([1.0], [1.0, 2.0])


def test_metric_properties():
    rng = np.random.default_rng(16)
    for _ in range(20):
        a, b, c = rng.normal(size=(3, 25))
        perm = rng.permutation(25)
        assert r2_score(a[perm], b[perm]) == pytest.approx(r2_score(a, b))
        assert rmse(a, c) <= rmse(a, b) + rmse(b, c) + 1e-12
    metrics = PredictionMetrics.evaluate([1.0, 2.0, 3.0], [1.0, 2.0, 4.0])
    assert metrics.to_dict() == {"r2": pytest.approx(0.5), "rmse": pytest.approx(np.sqrt(1 / 3))}
