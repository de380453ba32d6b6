import logging
from dataclasses import asdict, dataclass, field
from typing import Protocol

import numpy as np

from hybridfi.data import Dataset
from hybridfi.errors import ConfigError, ModelError
from hybridfi.regressors.adaboost import LOSS_SHAPES, fit_adaboost_r2, weighted_median_predict
from hybridfi.regressors.forest import fit_forest, predict_forest
from hybridfi.regressors.tree import RegressionTree, build_tree

logger = logging.getLogger(__name__)

REGRESSOR_KINDS = ("decision_tree", "random_forest", "adaboost")
ADABOOST_BASE_DEPTH = 4


class SupportsPredict(Protocol):
    """Anything that maps a (rows, features) matrix to one prediction per row."""

    def predict(self, rows: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class RegressorSpec:
    kind: str = "random_forest"
    n_estimators: int = 100
    max_depth: int | None = None
    min_samples_leaf: int = 1
    feature_subsample: float = 1.0 / 3.0
    bootstrap: bool = True
    loss_shape: str = "linear"
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")
        if self.kind not in REGRESSOR_KINDS:
            raise ConfigError(f"regressor kind must be one of {REGRESSOR_KINDS}, got {self.kind!r}")
        if self.n_estimators < 1:
            raise ConfigError(f"n_estimators must be >= 1, got {self.n_estimators}")
        if self.max_depth is not None and self.max_depth < 0:
            raise ConfigError(f"max_depth must be nonnegative, got {self.max_depth}")
        if self.min_samples_leaf < 1:
            raise ConfigError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if not 0.0 < self.feature_subsample <= 1.0:
            raise ConfigError(f"feature_subsample must lie in (0, 1], got {self.feature_subsample}")
        if self.loss_shape not in LOSS_SHAPES:
            raise ConfigError(f"loss_shape must be one of {LOSS_SHAPES}, got {self.loss_shape!r}")

    @classmethod
    def from_config(cls, cfg, seed: int) -> "RegressorSpec":
        return cls(
            kind=cfg.REGRESSOR.KIND,
            n_estimators=cfg.REGRESSOR.N_ESTIMATORS,
            max_depth=cfg.REGRESSOR.MAX_DEPTH,
            min_samples_leaf=cfg.REGRESSOR.MIN_SAMPLES_LEAF,
            feature_subsample=cfg.REGRESSOR.FEATURE_SUBSAMPLE,
            bootstrap=cfg.REGRESSOR.BOOTSTRAP,
            loss_shape=cfg.REGRESSOR.LOSS,
            seed=seed,
            n_jobs=cfg.NUM_WORKERS,
        )

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("n_jobs")
        return data


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """
    A fitted regressor. `feature_names` is the training-time column contract:
    prediction inputs must have exactly these columns in this order.
    """

    spec: RegressorSpec
    feature_names: tuple[str, ...]
    trees: tuple[RegressionTree, ...]
    member_weights: np.ndarray = field(default_factory=lambda: np.ones(1))
    boost_weight_sums: tuple[float, ...] = ()

    def predict(self, rows) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.ndim != 2 or rows.shape[1] != len(self.feature_names):
            raise ModelError(
                f"model expects {len(self.feature_names)} columns {list(self.feature_names)}, got shape {rows.shape}"
            )
        if self.spec.kind == "adaboost":
            return weighted_median_predict(self.trees, self.member_weights, rows)
        if self.spec.kind == "random_forest":
            return predict_forest(list(self.trees), rows)
        return self.trees[0].predict(rows)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "feature_names": list(self.feature_names),
            "member_weights": np.asarray(self.member_weights).tolist(),
            "trees": [t.to_dict() for t in self.trees],
        }


def train(spec: RegressorSpec, train_set: Dataset) -> TrainedModel:
    """Fit the regressor described by `spec`; deterministic for a fixed seed."""
    if train_set.n_rows == 0:
        raise ModelError("cannot train on an empty dataset")
    X = np.asarray(train_set.values)
    y = np.asarray(train_set.target)
    names = tuple(train_set.feature_names)

    if spec.kind == "decision_tree":
        tree = build_tree(X, y, max_depth=spec.max_depth, min_samples_leaf=spec.min_samples_leaf)
        return TrainedModel(spec, names, (tree,))

    if spec.kind == "random_forest":
        trees = fit_forest(
            X,
            y,
            n_estimators=spec.n_estimators,
            max_depth=spec.max_depth,
            min_samples_leaf=spec.min_samples_leaf,
            feature_subsample=spec.feature_subsample,
            bootstrap=spec.bootstrap,
            seed=spec.seed,
            n_jobs=spec.n_jobs,
        )
        return TrainedModel(spec, names, tuple(trees), np.ones(len(trees)))

    boosted = fit_adaboost_r2(
        X,
        y,
        n_estimators=spec.n_estimators,
        max_depth=spec.max_depth if spec.max_depth is not None else ADABOOST_BASE_DEPTH,
        min_samples_leaf=spec.min_samples_leaf,
        loss_shape=spec.loss_shape,
        seed=spec.seed,
    )
    if len(boosted.trees) < spec.n_estimators:
        logger.info(f"AdaBoost.R2 stopped early with {len(boosted.trees)}/{spec.n_estimators} estimators")
    return TrainedModel(spec, names, boosted.trees, boosted.estimator_weights, boosted.weight_sums)


def predict(model: TrainedModel, rows) -> np.ndarray:
    return model.predict(rows)


def predict_dataset(model: TrainedModel, d: Dataset) -> np.ndarray:
    """Predict on a dataset after checking its columns against the training contract."""
    if tuple(d.feature_names) != model.feature_names:
        raise ModelError(
            f"column contract violated: model trained on {list(model.feature_names)}, got {d.feature_names}"
        )
    return model.predict(d.values)
