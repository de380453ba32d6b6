import logging
from dataclasses import dataclass

import numpy as np

from hybridfi.regressors.tree import RegressionTree, build_tree

logger = logging.getLogger(__name__)

LOSS_SHAPES = ("linear", "square", "exponential")


@dataclass(frozen=True, eq=False)
class BoostedTrees:
    trees: tuple[RegressionTree, ...]
    estimator_weights: np.ndarray
    weight_sums: tuple[float, ...]


def _shaped_loss(abs_err: np.ndarray, loss_shape: str) -> np.ndarray:
    scaled = abs_err / abs_err.max()
    if loss_shape == "linear":
        return scaled
    if loss_shape == "square":
        return scaled**2
    if loss_shape == "exponential":
        return 1.0 - np.exp(-scaled)
    raise ValueError(f"unknown AdaBoost.R2 loss {loss_shape!r}")


def fit_adaboost_r2(
    X: np.ndarray,
    y: np.ndarray,
    n_estimators: int,
    max_depth: int,
    min_samples_leaf: int,
    loss_shape: str,
    seed: int,
) -> BoostedTrees:
    """
    AdaBoost.R2: each round fits a tree on a weighted bootstrap resample, scores the
    shaped, max-normalized absolute error on the full training set, and multiplies
    the sample weights by beta ** (1 - loss).

    Boosting stops early after a perfect fit or when the weighted average loss
    reaches 0.5; the first estimator is always kept.
    """
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    sample_weight = np.full(n, 1.0 / n)
    trees: list[RegressionTree] = []
    weights: list[float] = []
    sums: list[float] = []

    for round_idx in range(n_estimators):
        rows = rng.choice(n, size=n, replace=True, p=sample_weight)
        tree = build_tree(X[rows], y[rows], max_depth=max_depth, min_samples_leaf=min_samples_leaf)
        abs_err = np.abs(tree.predict(X) - y)

        if abs_err.max() == 0.0:
            trees.append(tree)
            weights.append(1.0)
            sums.append(float(sample_weight.sum()))
            logger.debug(f"AdaBoost.R2 round {round_idx}: perfect fit, stopping")
            break

        loss = _shaped_loss(abs_err, loss_shape)
        avg_loss = float(np.dot(sample_weight, loss))
        if avg_loss >= 0.5:
            if not trees:
                trees.append(tree)
                weights.append(1.0)
                sums.append(float(sample_weight.sum()))
            logger.warning(
                f"AdaBoost.R2 stopped early at round {round_idx} of {n_estimators}: average loss {avg_loss:.4f} >= 0.5"
            )
            break

        beta = avg_loss / (1.0 - avg_loss)
        trees.append(tree)
        if beta <= 0.0:
            # all weighted mass sits on perfectly fitted rows
            weights.append(1.0)
            sums.append(float(sample_weight.sum()))
            break
        weights.append(float(np.log(1.0 / beta)))

        sample_weight = sample_weight * np.power(beta, 1.0 - loss)
        sample_weight = sample_weight / sample_weight.sum()
        sums.append(float(sample_weight.sum()))

    return BoostedTrees(trees=tuple(trees), estimator_weights=np.asarray(weights), weight_sums=tuple(sums))


def weighted_median_predict(trees: tuple[RegressionTree, ...], estimator_weights: np.ndarray, X: np.ndarray) -> np.ndarray:
    """
    Per-row weighted median of the member predictions: the smallest prediction whose
    cumulative estimator weight reaches half of the total.
    """
    preds = np.column_stack([t.predict(X) for t in trees])
    order = np.argsort(preds, axis=1, kind="stable")
    cum = np.cumsum(estimator_weights[order], axis=1)
    median_pos = np.argmax(cum >= 0.5 * cum[:, -1:], axis=1)
    median_idx = order[np.arange(X.shape[0]), median_pos]
    return preds[np.arange(X.shape[0]), median_idx]
