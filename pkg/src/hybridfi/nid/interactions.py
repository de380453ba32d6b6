import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from hybridfi.data.io import FLOAT_FORMAT
from hybridfi.errors import ConfigError
from hybridfi.nid.mlp import MlpWeights

CUTOFF_MODES = ("largest_gap", "fixed_k")
FEATURE_SET_SEPARATOR = ";"


@dataclass(frozen=True)
class InteractionCandidate:
    features: tuple[int, ...]
    strength: float
    names: tuple[str, ...] = ()

    def __post_init__(self):
        features = tuple(sorted(int(f) for f in self.features))
        if len(set(features)) < 2:
            raise ValueError(f"an interaction needs at least 2 distinct features, got {list(self.features)}")
        if not self.strength >= 0:
            raise ValueError(f"interaction strength must be nonnegative, got {self.strength}")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "strength", float(self.strength))
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def order(self) -> int:
        return len(self.features)

    def label(self) -> str:
        parts = self.names if self.names else [str(f) for f in self.features]
        return FEATURE_SET_SEPARATOR.join(parts)

    def with_names(self, feature_names: Sequence[str]) -> "InteractionCandidate":
        return InteractionCandidate(self.features, self.strength, tuple(feature_names[f] for f in self.features))

    def to_dict(self) -> dict:
        return {"features": list(self.features), "names": list(self.names), "strength": self.strength}


@dataclass(frozen=True)
class CutoffConfig:
    mode: str = "largest_gap"
    k: int | None = None
    max_candidates: int = 20

    def __post_init__(self):
        if self.mode not in CUTOFF_MODES:
            raise ConfigError(f"cutoff mode must be one of {CUTOFF_MODES}, got {self.mode!r}")
        if self.mode == "fixed_k" and self.k is None:
            raise ConfigError("cutoff mode fixed_k requires k")
        if self.k is not None and self.k < 1:
            raise ConfigError(f"cutoff k must be positive, got {self.k}")
        if self.max_candidates < 1:
            raise ConfigError(f"max_candidates must be positive, got {self.max_candidates}")

    @classmethod
    def from_config(cls, cfg) -> "CutoffConfig":
        return cls(mode=cfg.CUTOFF.MODE, k=cfg.CUTOFF.K, max_candidates=cfg.CUTOFF.MAX_CANDIDATES)


def aggregate_influence(weights: MlpWeights) -> np.ndarray:
    """
    z for the first hidden layer: start from |w| at the last hidden layer and
    push it down through the absolute weight matrices.
    """
    z = np.abs(weights.w)
    for W in reversed(weights.W[1:]):
        z = z @ np.abs(W)
    return z


def _strengths(abs_w1: np.ndarray, z1: np.ndarray, features: tuple[int, ...]) -> float:
    return float(z1 @ abs_w1[:, list(features)].min(axis=1))


def interaction_strength(weights: MlpWeights, features: Iterable[int]) -> float:
    """sum_i z1_i * min_{f in features} |W1[i, f]|."""
    features = tuple(sorted({int(f) for f in features}))
    if len(features) < 2:
        raise ValueError(f"interaction strength needs at least 2 distinct features, got {list(features)}")
    if features[0] < 0 or features[-1] >= weights.n_features:
        raise ValueError(f"feature indices {list(features)} out of range for {weights.n_features} features")
    return _strengths(np.abs(weights.W[0]), aggregate_influence(weights), features)


def rank_candidates(weights: MlpWeights) -> list[InteractionCandidate]:
    """
    Greedy candidate generation: at every first-layer unit, for r = 2..d take the
    r inputs with the largest |weight| (ties to the lower index). Duplicate sets
    are scored once over all units.

    Sorted by strength descending, then by order, then by the feature tuple.
    """
    d = weights.n_features
    if d < 2:
        raise ValueError(f"interaction ranking needs at least 2 features, got {d}")
    abs_w1 = np.abs(weights.W[0])
    z1 = aggregate_influence(weights)

    seen: dict[tuple[int, ...], None] = {}
    for row in abs_w1:
        order = np.argsort(-row, kind="stable")
        for r in range(2, d + 1):
            seen.setdefault(tuple(sorted(int(f) for f in order[:r])), None)

    candidates = [InteractionCandidate(s, _strengths(abs_w1, z1, s)) for s in seen]
    candidates.sort(key=lambda c: (-c.strength, c.order, c.features))
    return candidates


def cutoff_topk(ranked: Sequence[InteractionCandidate], cfg: CutoffConfig) -> list[InteractionCandidate]:
    """
    fixed_k keeps the first k. largest_gap drops the zero-strength tail, caps the
    list at max_candidates and truncates after the largest ratio between
    consecutive strengths; without any gap (ratio 1) the capped list is kept.
    """
    ranked = list(ranked)
    if cfg.mode == "fixed_k":
        return ranked[: cfg.k]

    kept = [c for c in ranked if c.strength > 0][: cfg.max_candidates]
    if len(kept) < 2:
        return kept
    s = np.array([c.strength for c in kept])
    ratios = s[:-1] / s[1:]
    cut = int(np.argmax(ratios))
    if ratios[cut] <= 1.0:
        return kept
    return kept[: cut + 1]


def interactions_frame(candidates: Sequence[InteractionCandidate]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "rank": np.arange(1, len(candidates) + 1, dtype=np.int64),
            "feature_set": [c.label() for c in candidates],
            "strength": np.array([c.strength for c in candidates], dtype=np.float64),
        }
    )


def write_interactions_csv(candidates: Sequence[InteractionCandidate], path: str):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    interactions_frame(candidates).to_csv(
        path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8", lineterminator="\n"
    )
