import logging
from dataclasses import dataclass, replace

import numpy as np
from joblib import Parallel, delayed
from scipy import stats
from tqdm import tqdm

from hybridfi.data import (
    Dataset,
    ReconstructionSpec,
    SplitSpec,
    apply_reconstruction,
    constituent_stats,
    remove_features,
    split,
)
from hybridfi.errors import ConfigError, DatasetError
from hybridfi.lime import GlobalRanking, LimeConfig, PickConfig, global_ranking
from hybridfi.nid import CutoffConfig, InteractionCandidate, MlpConfig, detect_interactions
from hybridfi.pipeline.report import PipelineReport, SweepPoint
from hybridfi.regressors import PredictionMetrics, RegressorSpec, TrainedModel, predict_dataset, train
from hybridfi.utils.logger import create_rows_table, create_small_table, progress_enabled

logger = logging.getLogger(__name__)

OBJECTIVES = ("r2", "rmse", "combined")


@dataclass(frozen=True)
class ReconstructionConfig:
    removal_fraction: float = 0.10
    min_removed: int = 1
    embed_all_interactions: bool = True
    standardize_interactions: bool = False

    def __post_init__(self):
        if not 0.0 <= self.removal_fraction < 0.5:
            raise ConfigError(f"removal_fraction must lie in [0, 0.5), got {self.removal_fraction}")
        if self.min_removed < 0:
            raise ConfigError(f"min_removed must be nonnegative, got {self.min_removed}")

    @classmethod
    def from_config(cls, cfg) -> "ReconstructionConfig":
        return cls(
            removal_fraction=cfg.RECONSTRUCTION.REMOVAL_FRACTION,
            min_removed=cfg.RECONSTRUCTION.MIN_REMOVED,
            embed_all_interactions=cfg.RECONSTRUCTION.EMBED_ALL_INTERACTIONS,
            standardize_interactions=cfg.DATA.STANDARDIZE_INTERACTIONS,
        )

    def n_removed(self, n_features: int) -> int:
        return max(self.min_removed, int(np.floor(self.removal_fraction * n_features + 0.5)))


@dataclass(frozen=True)
class SelectionConfig:
    # None means auto: floor(n_II / 2)
    k_prime: int | None = None
    objective: str = "combined"

    def __post_init__(self):
        if self.k_prime == "auto":
            object.__setattr__(self, "k_prime", None)
        if self.k_prime is not None and self.k_prime < 0:
            raise ConfigError(f"k_prime must be nonnegative, got {self.k_prime}")
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")

    @classmethod
    def from_config(cls, cfg) -> "SelectionConfig":
        return cls(k_prime=cfg.SELECTION.K_PRIME, objective=cfg.SELECTION.OBJECTIVE)

    def resolve_k_prime(self, n_features: int) -> int:
        k_prime = n_features // 2 if self.k_prime is None else self.k_prime
        if k_prime >= n_features:
            raise ConfigError(f"k_prime {k_prime} must be smaller than the {n_features} features of dataset II")
        return k_prime


@dataclass(frozen=True)
class Stage1Artifacts:
    ranking: GlobalRanking
    interactions: tuple[InteractionCandidate, ...]
    spec: ReconstructionSpec


def evaluate(spec: RegressorSpec, train_set: Dataset, test_set: Dataset) -> tuple[TrainedModel, PredictionMetrics]:
    model = train(spec, train_set)
    return model, PredictionMetrics.evaluate(test_set.target, predict_dataset(model, test_set))


def reconstruct(
    dataset1: Dataset,
    spec: RegressorSpec,
    lime_cfg: LimeConfig,
    pick_cfg: PickConfig,
    mlp_cfg: MlpConfig,
    cut_cfg: CutoffConfig,
    rc: ReconstructionConfig,
    split_spec: SplitSpec,
    model: TrainedModel | None = None,
) -> tuple[Dataset, Stage1Artifacts]:
    """
    Stage 1: rank dataset I with LIME and detect interactions with NID, both on
    its training split; drop the lowest-weight features and append one product
    column per kept interaction, formed from the original raw columns.
    """
    n = dataset1.n_features
    if n < 3:
        raise DatasetError(f"reconstruction needs at least 3 features, got {n}")
    n_removed = rc.n_removed(n)
    if n - n_removed < 2:
        raise ConfigError(f"removing {n_removed} of {n} features would leave fewer than 2")

    train1, _ = split(dataset1, split_spec)
    model = model if model is not None else train(spec, train1)
    ranking = global_ranking(model, train1, lime_cfg, pick_cfg)
    interactions = tuple(detect_interactions(train1, mlp_cfg, cut_cfg))

    embedded = tuple(c.names for c in interactions) if rc.embed_all_interactions else ()
    recipe = ReconstructionSpec(
        removed_raw=tuple(ranking.least_important(n_removed)),
        interactions=embedded,
        standardize_interactions=rc.standardize_interactions,
        interaction_stats=constituent_stats(train1, embedded) if rc.standardize_interactions else (),
    )
    dataset2 = apply_reconstruction(dataset1, recipe)
    logger.info(
        f"Stage 1: removed {list(recipe.removed_raw)}, embedded {len(embedded)} interactions, "
        f"dataset II has {dataset2.n_features} features"
    )
    return dataset2, Stage1Artifacts(ranking=ranking, interactions=interactions, spec=recipe)


def stage2_ranking(
    dataset2: Dataset, spec: RegressorSpec, lime_cfg: LimeConfig, pick_cfg: PickConfig, split_spec: SplitSpec
) -> GlobalRanking:
    train2, _ = split(dataset2, split_spec)
    return global_ranking(train(spec, train2), train2, lime_cfg, pick_cfg)


def _sweep_point(spec: RegressorSpec, train2: Dataset, test2: Dataset, removed: list[str]) -> SweepPoint:
    _, metrics = evaluate(spec, remove_features(train2, removed), remove_features(test2, removed))
    return SweepPoint(t=len(removed), removed_features=tuple(removed), r2=metrics.r2, rmse=metrics.rmse)


def selection_sweep(
    dataset2: Dataset,
    spec: RegressorSpec,
    lime_cfg: LimeConfig,
    pick_cfg: PickConfig,
    sc: SelectionConfig,
    split_spec: SplitSpec,
    ranking: GlobalRanking | None = None,
) -> list[SweepPoint]:
    """
    Stage 2: for t = 0..k' drop the t least important features of the stage-2
    ranking, retrain on the fixed training split and score on the test split.
    Every point uses the same model seed.
    """
    k_prime = sc.resolve_k_prime(dataset2.n_features)
    ranking = ranking if ranking is not None else stage2_ranking(dataset2, spec, lime_cfg, pick_cfg, split_spec)
    train2, test2 = split(dataset2, split_spec)

    # points run in parallel, so members are fit sequentially
    point_spec = replace(spec, n_jobs=1) if spec.n_jobs != 1 else spec
    ts = tqdm(range(k_prime + 1), desc="sweep", leave=False, disable=not progress_enabled(logger))
    points = Parallel(n_jobs=spec.n_jobs)(
        delayed(_sweep_point)(point_spec, train2, test2, ranking.least_important(t)) for t in ts
    )
    logger.debug("Stage 2 sweep:\n" + create_rows_table([p.to_dict() for p in points]))
    return list(points)


def choose_optimum(sweep: list[SweepPoint], objective: str) -> SweepPoint:
    """
    r2: max R^2; rmse: min RMSE; combined: max z(R^2) - z(RMSE) over the sweep
    (a constant metric contributes 0). Ties go to the larger t.
    """
    if not sweep:
        raise ValueError("cannot choose from an empty sweep")
    if objective not in OBJECTIVES:
        raise ConfigError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    r2 = np.array([p.r2 for p in sweep])
    rmse = np.array([p.rmse for p in sweep])
    if objective == "r2":
        score = r2
    elif objective == "rmse":
        score = -rmse
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            score = np.nan_to_num(stats.zscore(r2), nan=0.0) - np.nan_to_num(stats.zscore(rmse), nan=0.0)
    best = score.max()
    candidates = [p for p, s in zip(sweep, score) if s == best]
    return max(candidates, key=lambda p: p.t)


def run(
    dataset1: Dataset,
    spec: RegressorSpec,
    lime_cfg: LimeConfig,
    pick_cfg: PickConfig,
    mlp_cfg: MlpConfig,
    cut_cfg: CutoffConfig,
    rc: ReconstructionConfig,
    sc: SelectionConfig,
    split_spec: SplitSpec,
) -> PipelineReport:
    """Baseline on dataset I, stage-1 reconstruction, stage-2 sweep and the chosen dataset III."""
    train1, test1 = split(dataset1, split_spec)
    model, baseline = evaluate(spec, train1, test1)
    logger.info("Baseline (dataset I):\n" + create_small_table(baseline.to_dict()))

    dataset2, stage1 = reconstruct(
        dataset1, spec, lime_cfg, pick_cfg, mlp_cfg, cut_cfg, rc, split_spec, model=model
    )
    ranking2 = stage2_ranking(dataset2, spec, lime_cfg, pick_cfg, split_spec)
    sweep = selection_sweep(dataset2, spec, lime_cfg, pick_cfg, sc, split_spec, ranking=ranking2)
    chosen = choose_optimum(sweep, sc.objective)

    report = PipelineReport(
        seed=spec.seed,
        stage1_ranking=stage1.ranking,
        interactions=stage1.interactions,
        dataset2_spec=stage1.spec,
        stage2_ranking=ranking2,
        k_prime=len(sweep) - 1,
        sweep=tuple(sweep),
        chosen_t=chosen.t,
        dataset3_spec=stage1.spec.with_stage2(chosen.removed_features),
        baseline_metrics=baseline,
        optimized_metrics=chosen.metrics,
        objective=sc.objective,
    )
    pct = report.improvement_pct
    logger.info(
        "Optimized (dataset III):\n"
        + create_small_table(
            {
                "chosen_t": chosen.t,
                "R2": chosen.r2,
                "RMSE": chosen.rmse,
                "R2 %": pct["r2"] if pct["r2"] is not None else float("nan"),
                "RMSE %": pct["rmse"] if pct["rmse"] is not None else float("nan"),
            }
        )
    )
    return report
