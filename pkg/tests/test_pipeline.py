import json

import numpy as np
import pytest

from hybridfi.data import Dataset, SplitSpec, apply_reconstruction, remove_features, split
from hybridfi.errors import ConfigError, DatasetError
from hybridfi.lime import GlobalRanking, LimeConfig, PickConfig
from hybridfi.nid import CutoffConfig, InteractionCandidate, MlpConfig
from hybridfi.pipeline import (
    ReconstructionConfig,
    SelectionConfig,
    SweepPoint,
    choose_optimum,
    evaluate,
    improvement_pct,
    reconstruct,
    run,
    selection_sweep,
)
from hybridfi.pipeline import stages
from hybridfi.regressors import PredictionMetrics, RegressorSpec

from conftest import random_dataset

TREE = RegressorSpec(kind="decision_tree", max_depth=3)
LIME = LimeConfig(n_perturbations=100)
PICK = PickConfig(budget=20)
MLP = MlpConfig(hidden_sizes=(8,), epochs=2)
CUT = CutoffConfig(mode="fixed_k", k=2)


def _point(t, r2, rmse):
    return SweepPoint(t=t, removed_features=tuple(f"f{i}" for i in range(t)), r2=r2, rmse=rmse)


def _ascending_ranking(d: Dataset) -> GlobalRanking:
    return GlobalRanking.from_weights(d.feature_names, np.arange(d.n_features, dtype=float))


@pytest.fixture
def fake_stage1(monkeypatch):
    """Ranks features in column order and reports the given interactions."""

    def _install(candidates):
        monkeypatch.setattr(stages, "global_ranking", lambda model, data, lime_cfg, pick_cfg: _ascending_ranking(data))
        monkeypatch.setattr(
            stages,
            "detect_interactions",
            lambda train, mlp_cfg, cut_cfg: [c.with_names(train.feature_names) for c in candidates],
        )

    return _install


def test_removal_count_arithmetic():
    rc = ReconstructionConfig()
    assert rc.n_removed(18) == 2
    assert rc.n_removed(10) == 1
    assert rc.n_removed(3) == 1
    assert ReconstructionConfig(removal_fraction=0.0, min_removed=0).n_removed(18) == 0
    with pytest.raises(ConfigError):
        ReconstructionConfig(removal_fraction=0.5)


def test_reconstruct_eighteen_features_with_eight_interactions(fake_stage1):
    d = random_dataset(60, 18, seed=1)
    pairs = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9)]
    fake_stage1([InteractionCandidate(p, 1.0) for p in pairs])
    split_spec = SplitSpec(train_count=40, seed=0)
    dataset2, stage1 = reconstruct(d, TREE, LIME, PICK, MLP, CUT, ReconstructionConfig(), split_spec)

    assert stage1.spec.removed_raw == ("x1", "x2")
    assert dataset2.n_features == 18 - 2 + 8
    assert "x1" not in dataset2.feature_names
    np.testing.assert_array_equal(dataset2.column("x1*x3"), d.column("x1") * d.column("x3"))
    np.testing.assert_array_equal(apply_reconstruction(d, stage1.spec).values, dataset2.values)


def test_reconstruct_without_interactions(fake_stage1):
    d = random_dataset(50, 5, seed=2)
    fake_stage1([])
    dataset2, stage1 = reconstruct(
        d, TREE, LIME, PICK, MLP, CUT, ReconstructionConfig(), SplitSpec(train_count=30, seed=0)
    )
    expected = remove_features(d, ["x1"])
    assert dataset2.feature_names == expected.feature_names
    np.testing.assert_array_equal(dataset2.values, expected.values)
    assert stage1.interactions == ()


def test_reconstruct_standardizes_with_training_split_stats(fake_stage1):
    d = random_dataset(50, 5, seed=8)
    fake_stage1([InteractionCandidate((0, 1), 1.0)])
    split_spec = SplitSpec(train_count=30, seed=2)
    rc = ReconstructionConfig(standardize_interactions=True)
    dataset2, stage1 = reconstruct(d, TREE, LIME, PICK, MLP, CUT, rc, split_spec)
    train, _ = split(d, split_spec)
    z = [(d.column(n) - train.column(n).mean()) / train.column(n).std() for n in ("x1", "x2")]
    np.testing.assert_allclose(dataset2.column("x1*x2"), z[0] * z[1])
    assert [s[0] for s in stage1.spec.interaction_stats] == ["x1", "x2"]


def test_reconstruct_floor_errors(fake_stage1):
    fake_stage1([])
    split_spec = SplitSpec(train_count=20, seed=0)
    with pytest.raises(DatasetError):
        reconstruct(random_dataset(30, 2), TREE, LIME, PICK, MLP, CUT, ReconstructionConfig(), split_spec)
    with pytest.raises(ConfigError):
        reconstruct(
            random_dataset(30, 3), TREE, LIME, PICK, MLP, CUT, ReconstructionConfig(min_removed=2), split_spec
        )


def test_sweep_with_zero_k_prime_is_the_full_dataset():
    d = random_dataset(80, 4, seed=3)
    split_spec = SplitSpec(train_count=60, seed=1)
    sweep = selection_sweep(d, TREE, LIME, PICK, SelectionConfig(k_prime=0), split_spec, ranking=_ascending_ranking(d))
    _, metrics = evaluate(TREE, *split(d, split_spec))
    assert len(sweep) == 1
    assert sweep[0].t == 0 and sweep[0].metrics == metrics


def test_sweep_removals_are_nested():
    d = random_dataset(80, 6, seed=4)
    sweep = selection_sweep(d, TREE, LIME, PICK, SelectionConfig(k_prime=4), SplitSpec(train_count=60, seed=1))
    assert [p.t for p in sweep] == list(range(5))
    for a, b in zip(sweep, sweep[1:]):
        assert set(a.removed_features) < set(b.removed_features)


@pytest.mark.parametrize("k_prime", [10, 12])
def test_sweep_length(k_prime):
    d = random_dataset(60, 24, seed=5)
    sweep = selection_sweep(
        d, TREE, LIME, PICK, SelectionConfig(k_prime=k_prime), SplitSpec(train_count=45, seed=0),
        ranking=_ascending_ranking(d),
    )
    assert len(sweep) == k_prime + 1


def test_sweep_rejects_large_k_prime():
    d = random_dataset(40, 4)
    with pytest.raises(ConfigError):
        selection_sweep(d, TREE, LIME, PICK, SelectionConfig(k_prime=4), SplitSpec(train_count=30, seed=0))
    assert SelectionConfig(k_prime="auto").resolve_k_prime(7) == 3


def test_choose_optimum_examples():
    single = [_point(0, 0.3, 2.0)]
    assert choose_optimum(single, "combined") is single[0]
    sweep = [_point(0, 0.5, 10.0), _point(1, 0.6, 8.0), _point(2, 0.55, 9.0)]
    for objective in ("r2", "rmse", "combined"):
        assert choose_optimum(sweep, objective).t == 1
    with pytest.raises(ValueError):
        choose_optimum([], "r2")


def test_choose_optimum_ties_prefer_more_deletions():
    flat = [_point(t, 0.7, 1.0) for t in range(4)]
    for objective in ("r2", "rmse", "combined"):
        assert choose_optimum(flat, objective).t == 3


def test_improvement_pct():
    pct = improvement_pct(PredictionMetrics(r2=0.8, rmse=10.0), PredictionMetrics(r2=0.88, rmse=9.0))
    assert pct["r2"] == pytest.approx(10.0)
    assert pct["rmse"] == pytest.approx(10.0)
    assert improvement_pct(PredictionMetrics(r2=0.0, rmse=0.0), PredictionMetrics(r2=0.5, rmse=1.0)) == {
        "r2": None,
        "rmse": None,
    }


def _interaction_dataset(seed: int) -> Dataset:
    return random_dataset(200, 5, seed=seed, target_fn=lambda X: X[:, 0] * X[:, 1] + X[:, 2])


def test_run_is_deterministic_and_consistent():
    d = _interaction_dataset(6)
    spec = RegressorSpec(kind="random_forest", n_estimators=5, seed=0)
    args = (d, spec, LIME, PICK, MLP, CUT, ReconstructionConfig(), SelectionConfig(objective="r2"))
    split_spec = SplitSpec(train_count=150, seed=0)
    report = run(*args, split_spec)
    again = run(*args, split_spec)
    assert json.dumps(report.to_dict(), sort_keys=True) == json.dumps(again.to_dict(), sort_keys=True)

    assert report.k_prime == (5 - 1 + 2) // 2
    assert report.optimized_metrics == report.chosen_point.metrics
    assert report.optimized_metrics.r2 >= report.sweep[0].r2
    assert report.features_deleted == report.chosen_t

    dataset3 = apply_reconstruction(d, report.dataset3_spec)
    _, metrics = evaluate(spec, *split(dataset3, split_spec))
    assert metrics == report.optimized_metrics


def test_reconstruction_recipe_round_trips_through_json():
    d = _interaction_dataset(7)
    report = run(
        d, TREE, LIME, PICK, MLP, CUT, ReconstructionConfig(), SelectionConfig(k_prime=2),
        SplitSpec(train_count=150, seed=1),
    )
    recipe = type(report.dataset3_spec).from_dict(json.loads(json.dumps(report.dataset3_spec.to_dict())))
    assert recipe == report.dataset3_spec
    assert list(recipe.interactions) == [c.names for c in report.interactions]
    assert apply_reconstruction(d, recipe).n_features == 5 - 1 + len(report.interactions) - report.chosen_t
