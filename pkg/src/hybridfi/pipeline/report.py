import json
import os
from dataclasses import dataclass

import pandas as pd

from hybridfi.data import ReconstructionSpec
from hybridfi.data.io import FLOAT_FORMAT
from hybridfi.lime import GlobalRanking
from hybridfi.nid import InteractionCandidate
from hybridfi.regressors import PredictionMetrics


@dataclass(frozen=True)
class SweepPoint:
    t: int
    removed_features: tuple[str, ...]
    r2: float
    rmse: float

    def __post_init__(self):
        object.__setattr__(self, "removed_features", tuple(self.removed_features))
        if len(self.removed_features) != self.t:
            raise ValueError(f"sweep point t={self.t} lists {len(self.removed_features)} removed features")

    @property
    def metrics(self) -> PredictionMetrics:
        return PredictionMetrics(r2=self.r2, rmse=self.rmse)

    def to_dict(self) -> dict:
        return {"t": self.t, "removed_features": list(self.removed_features), "r2": self.r2, "rmse": self.rmse}


def improvement_pct(baseline: PredictionMetrics, optimized: PredictionMetrics) -> dict:
    """Signed percentages; positive means better. None where the baseline is 0."""
    r2 = (optimized.r2 - baseline.r2) / abs(baseline.r2) * 100.0 if baseline.r2 != 0 else None
    rmse = (baseline.rmse - optimized.rmse) / baseline.rmse * 100.0 if baseline.rmse != 0 else None
    return {"r2": r2, "rmse": rmse}


@dataclass(frozen=True)
class PipelineReport:
    seed: int
    stage1_ranking: GlobalRanking
    interactions: tuple[InteractionCandidate, ...]
    dataset2_spec: ReconstructionSpec
    stage2_ranking: GlobalRanking
    k_prime: int
    sweep: tuple[SweepPoint, ...]
    chosen_t: int
    dataset3_spec: ReconstructionSpec
    baseline_metrics: PredictionMetrics
    optimized_metrics: PredictionMetrics
    objective: str

    def __post_init__(self):
        if not 0 <= self.chosen_t <= self.k_prime:
            raise ValueError(f"chosen_t {self.chosen_t} outside [0, {self.k_prime}]")
        point = self.chosen_point
        if point.metrics != self.optimized_metrics:
            raise ValueError("optimized metrics must be the chosen sweep point's metrics")

    @property
    def chosen_point(self) -> SweepPoint:
        return next(p for p in self.sweep if p.t == self.chosen_t)

    @property
    def improvement_pct(self) -> dict:
        return improvement_pct(self.baseline_metrics, self.optimized_metrics)

    @property
    def features_deleted(self) -> int:
        return self.chosen_t

    def sweep_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"t": [p.t for p in self.sweep], "r2": [p.r2 for p in self.sweep], "rmse": [p.rmse for p in self.sweep]}
        )

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "stage1_ranking": self.stage1_ranking.to_dict(),
            "interactions": [c.to_dict() for c in self.interactions],
            "dataset2_spec": self.dataset2_spec.to_dict(),
            "stage2_ranking": self.stage2_ranking.to_dict(),
            "k_prime": self.k_prime,
            "objective": self.objective,
            "sweep": [p.to_dict() for p in self.sweep],
            "chosen_t": self.chosen_t,
            "features_deleted": self.features_deleted,
            "dataset3_spec": self.dataset3_spec.to_dict(),
            "baseline_metrics": self.baseline_metrics.to_dict(),
            "optimized_metrics": self.optimized_metrics.to_dict(),
            "improvement_pct": self.improvement_pct,
        }


def write_json(data, path: str):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, sort_keys=True, indent=4)
        f.write("\n")


def write_frame(frame: pd.DataFrame, path: str):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8", lineterminator="\n")
