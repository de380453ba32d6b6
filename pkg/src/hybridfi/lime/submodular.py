from typing import Sequence

import numpy as np

from hybridfi.errors import ConfigError
from hybridfi.lime.explainer import LocalExplanation


def explanation_matrix(explanations: Sequence[LocalExplanation]) -> np.ndarray:
    return np.vstack([e.coefficients for e in explanations])


def global_importance(W: np.ndarray) -> np.ndarray:
    """I_j = sqrt(sum_v |W_vj|)."""
    return np.sqrt(np.abs(W).sum(axis=0))


def coverage(W: np.ndarray, importance: np.ndarray, picked: Sequence[int]) -> float:
    """c(V) = sum_j I_j * [some picked row has a nonzero weight on feature j]."""
    if len(picked) == 0:
        return 0.0
    covered = np.any(W[list(picked)] != 0, axis=0)
    return float(importance[covered].sum())


def greedy_cover(W: np.ndarray, budget: int) -> list[int]:
    """
    Greedy coverage maximization; returns row positions of W in pick order.
    Ties go to the lowest position.
    """
    touches = W != 0
    importance = global_importance(W)
    covered = np.zeros(W.shape[1], dtype=bool)
    available = np.ones(W.shape[0], dtype=bool)
    picked: list[int] = []
    for _ in range(budget):
        gains = (touches & ~covered) @ importance
        gains = np.where(available, gains, -np.inf)
        best = int(np.argmax(gains))
        picked.append(best)
        available[best] = False
        covered |= touches[best]
    return picked


def submodular_pick(explanations: Sequence[LocalExplanation], budget: int) -> list[int]:
    """
    Pick `budget` explanations whose nonzero features jointly cover the globally
    important features.

    Returns:
        list[int]: the `instance` indices of the picked explanations, in pick order.
    """
    if budget < 1:
        raise ConfigError(f"submodular pick budget must be positive, got {budget}")
    if not explanations:
        raise ConfigError("submodular pick needs at least one explanation")
    if budget > len(explanations):
        raise ConfigError(f"budget {budget} exceeds the {len(explanations)} available explanations")
    positions = greedy_cover(explanation_matrix(explanations), budget)
    return [explanations[p].instance for p in positions]
