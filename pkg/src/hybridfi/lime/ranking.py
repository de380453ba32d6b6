import logging
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from hybridfi.data import Dataset
from hybridfi.data.io import FLOAT_FORMAT
from hybridfi.errors import ConfigError, DatasetError
from hybridfi.lime.explainer import FeatureStats, LimeConfig, LocalExplanation, explain_local
from hybridfi.lime.submodular import submodular_pick
from hybridfi.regressors import SupportsPredict
from hybridfi.utils.logger import progress_enabled

logger = logging.getLogger(__name__)

PICK_METHODS = ("sampling", "greedy_submodular")


@dataclass(frozen=True)
class PickConfig:
    method: str = "sampling"
    budget: int = 1000
    # candidate pool for greedy_submodular; None means min(rows, 2 * budget)
    pool_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")
        if self.method not in PICK_METHODS:
            raise ConfigError(f"pick method must be one of {PICK_METHODS}, got {self.method!r}")
        if self.budget < 1:
            raise ConfigError(f"pick budget must be positive, got {self.budget}")
        if self.pool_size is not None and self.pool_size < self.budget:
            raise ConfigError(f"pool_size {self.pool_size} is smaller than the budget {self.budget}")

    @classmethod
    def from_config(cls, cfg, seed: int) -> "PickConfig":
        return cls(method=cfg.PICK.METHOD, budget=cfg.PICK.BUDGET, pool_size=cfg.PICK.POOL_SIZE, seed=seed)

    def resolve_pool_size(self, n_rows: int) -> int:
        if self.pool_size is not None:
            return min(self.pool_size, n_rows)
        return min(n_rows, 2 * self.budget)


@dataclass(frozen=True)
class GlobalRanking:
    """(feature, weight) pairs ascending by weight; position 0 (rank 1) is the least important."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        weights = [w for _, w in self.entries]
        if any(w < 0 for w in weights):
            raise ValueError("global importance weights must be nonnegative")
        if any(a > b for a, b in zip(weights, weights[1:])):
            raise ValueError("global ranking must be ascending by weight")

    @classmethod
    def from_weights(cls, names, weights) -> "GlobalRanking":
        weights = np.asarray(weights, dtype=np.float64)
        order = np.argsort(weights, kind="stable")
        return cls(entries=tuple((names[i], float(weights[i])) for i in order))

    @property
    def features(self) -> list[str]:
        return [name for name, _ in self.entries]

    @property
    def weights(self) -> list[float]:
        return [w for _, w in self.entries]

    def least_important(self, t: int) -> list[str]:
        if not 0 <= t <= len(self.entries):
            raise ValueError(f"cannot take {t} features from a ranking of {len(self.entries)}")
        return self.features[:t]

    def most_important(self) -> str:
        return self.entries[-1][0]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"rank": np.arange(1, len(self.entries) + 1), "feature": self.features, "weight": self.weights}
        )

    def to_dict(self) -> list[dict]:
        return [{"rank": i + 1, "feature": n, "weight": w} for i, (n, w) in enumerate(self.entries)]

    def write_csv(self, path: str):
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8", lineterminator="\n")


def explain_rows(
    model: SupportsPredict, data: Dataset, rows, lime_cfg: LimeConfig, stats: FeatureStats
) -> list[LocalExplanation]:
    rows = [int(r) for r in rows]
    bar = tqdm(rows, desc="LIME", leave=False, disable=not progress_enabled(logger))
    return Parallel(n_jobs=lime_cfg.n_jobs)(
        delayed(explain_local)(model, data.values[r], data, lime_cfg, r, stats) for r in bar
    )


def aggregate(explanations: list[LocalExplanation], how: str) -> np.ndarray:
    total = np.sum([np.abs(e.coefficients) for e in explanations], axis=0)
    return total / len(explanations) if how == "mean" else total


def global_ranking(model: SupportsPredict, data: Dataset, lime_cfg: LimeConfig, pick_cfg: PickConfig) -> GlobalRanking:
    """
    Aggregate |local coefficients| over a budget of instances of `data`.

    `sampling` draws the budget uniformly without replacement; `greedy_submodular`
    explains a seeded candidate pool and keeps the submodular pick. Explanations
    use the statistics of `data`, which is expected to be the training split.
    """
    if data.n_rows == 0:
        raise DatasetError("global ranking needs a nonempty dataset")
    if pick_cfg.budget > data.n_rows:
        raise ConfigError(f"pick budget {pick_cfg.budget} exceeds the {data.n_rows} available rows")
    stats = FeatureStats.from_dataset(data)
    rng = np.random.default_rng(pick_cfg.seed)

    if pick_cfg.method == "sampling":
        rows = np.sort(rng.choice(data.n_rows, size=pick_cfg.budget, replace=False))
        picked = explain_rows(model, data, rows, lime_cfg, stats)
    else:
        pool = np.sort(rng.choice(data.n_rows, size=pick_cfg.resolve_pool_size(data.n_rows), replace=False))
        explanations = explain_rows(model, data, pool, lime_cfg, stats)
        by_instance = {e.instance: e for e in explanations}
        picked = [by_instance[i] for i in submodular_pick(explanations, pick_cfg.budget)]

    weights = aggregate(picked, lime_cfg.aggregation)
    ranking = GlobalRanking.from_weights(data.feature_names, weights)
    logger.debug(f"global ranking over {len(picked)} instances, most important: {ranking.most_important()}")
    return ranking
