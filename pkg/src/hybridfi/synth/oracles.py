from itertools import combinations

import numpy as np
from scipy import linalg

from hybridfi.errors import ConfigError, ModelError
from hybridfi.lime.lasso import weighted_moments
from hybridfi.nid.interactions import InteractionCandidate, aggregate_influence
from hybridfi.nid.mlp import MlpWeights

MAX_GRID_FEATURES = 3
MAX_ORACLE_FEATURES = 12


def _profiled_objective(points: np.ndarray, gram: np.ndarray, corr: np.ndarray, lam: float) -> np.ndarray:
    # lasso objective with the intercept profiled out, up to a constant
    quad = np.einsum("pi,ij,pj->p", points, gram, points)
    return quad - 2.0 * points @ corr + lam * np.abs(points).sum(axis=1)


def _grid_argmin(axes: list[np.ndarray], gram, corr, lam) -> tuple[np.ndarray, float]:
    """Exhaustive search over the product grid, one slice of the first axis at a time."""
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, len(axes) - 1) if len(axes) > 1 else None
    best_point, best_value = None, np.inf
    for a in axes[0]:
        if rest is None:
            points = np.array([[a]])
        else:
            points = np.column_stack([np.full(rest.shape[0], a), rest])
        values = _profiled_objective(points, gram, corr, lam)
        i = int(np.argmin(values))
        if values[i] < best_value:
            best_point, best_value = points[i].copy(), float(values[i])
    return best_point, best_value


def brute_force_lasso(X, y, sample_weight, lam: float, resolution: int = 401) -> tuple[np.ndarray, float]:
    """
    Grid-search oracle for the weighted lasso on at most 3 features.

    The box is +/-(2|b_ols| + 1) per axis with `resolution` points (odd, so 0 is on
    the grid), then a second grid of the same resolution spans two coarse steps
    around the best point.

    Returns:
        (coefficients, intercept)
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    w = np.asarray(sample_weight, dtype=np.float64).ravel()
    if X.ndim != 2 or not 1 <= X.shape[1] <= MAX_GRID_FEATURES:
        raise ConfigError(f"brute-force lasso supports 1..{MAX_GRID_FEATURES} features, got shape {X.shape}")
    if not np.any(w > 0):
        raise ModelError("brute-force lasso needs at least one positive sample weight")
    if resolution < 3:
        raise ConfigError(f"grid resolution must be at least 3, got {resolution}")
    resolution = resolution if resolution % 2 == 1 else resolution + 1

    x_mean, y_mean, gram, corr = weighted_moments(X, y, w)
    sw = np.sqrt(w)
    ols = linalg.lstsq((X - x_mean) * sw[:, None], (y - y_mean) * sw)[0]

    half = 2.0 * np.abs(ols) + 1.0
    axes = [np.linspace(-h, h, resolution) for h in half]
    point, _ = _grid_argmin(axes, gram, corr, lam)

    step = 2.0 * half / (resolution - 1)
    axes = [np.linspace(p - 2.0 * s, p + 2.0 * s, resolution) for p, s in zip(point, step)]
    # the L1 kink at 0 stays on the refined grid
    axes = [np.union1d(a, [0.0]) if a[0] < 0.0 < a[-1] else a for a in axes]
    point, _ = _grid_argmin(axes, gram, corr, lam)
    return point, y_mean - float(x_mean @ point)


def exhaustive_interaction_oracle(weights: MlpWeights, max_order: int | None = None) -> list[InteractionCandidate]:
    """Strength of every feature subset of size 2..max_order, sorted like rank_candidates."""
    d = weights.n_features
    if d > MAX_ORACLE_FEATURES:
        raise ConfigError(f"exhaustive oracle supports at most {MAX_ORACLE_FEATURES} features, got {d}")
    max_order = d if max_order is None else min(max_order, d)
    abs_w1 = np.abs(weights.W[0])
    z1 = aggregate_influence(weights)
    out = []
    for r in range(2, max_order + 1):
        for subset in combinations(range(d), r):
            out.append(InteractionCandidate(subset, float(z1 @ abs_w1[:, list(subset)].min(axis=1))))
    out.sort(key=lambda c: (-c.strength, c.order, c.features))
    return out
