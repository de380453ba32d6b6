import numpy as np
from joblib import Parallel, delayed

from hybridfi.regressors.tree import RegressionTree, build_tree


def n_split_features(n_features: int, feature_subsample: float) -> int:
    return min(n_features, max(1, int(np.floor(feature_subsample * n_features + 0.5))))


def _fit_member(X, y, seed_seq, bootstrap, max_depth, min_samples_leaf, max_features) -> RegressionTree:
    rng = np.random.default_rng(seed_seq)
    if bootstrap:
        rows = rng.integers(0, X.shape[0], size=X.shape[0])
        X, y = X[rows], y[rows]
    return build_tree(X, y, max_depth=max_depth, min_samples_leaf=min_samples_leaf, max_features=max_features, rng=rng)


def fit_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_estimators: int,
    max_depth: int | None,
    min_samples_leaf: int,
    feature_subsample: float,
    bootstrap: bool,
    seed: int,
    n_jobs: int = 1,
) -> list[RegressionTree]:
    """
    Bagged CART ensemble with per-split feature subsampling.

    Every member owns an RNG stream spawned from `seed`, so fitting with any
    `n_jobs` gives the sequential result.
    """
    max_features = n_split_features(X.shape[1], feature_subsample)
    streams = np.random.SeedSequence(seed).spawn(n_estimators)
    return Parallel(n_jobs=n_jobs)(
        delayed(_fit_member)(X, y, s, bootstrap, max_depth, min_samples_leaf, max_features) for s in streams
    )


def predict_forest(trees: list[RegressionTree], X: np.ndarray) -> np.ndarray:
    return np.mean([t.predict(X) for t in trees], axis=0)
