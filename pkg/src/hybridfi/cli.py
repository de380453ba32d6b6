import argparse
import logging
import os
import sys

import numpy as np
import pandas as pd
from tqdm import tqdm

from hybridfi import __version__
from hybridfi.config import dump_cfg, setup_cfg
from hybridfi.data import Dataset, SplitSpec, load_csv, split, write_csv
from hybridfi.errors import ConfigError
from hybridfi.lime import LimeConfig, PickConfig, global_ranking
from hybridfi.nid import CutoffConfig, MlpConfig, detect_interactions, write_interactions_csv
from hybridfi.pipeline import (
    PipelineReport,
    ReconstructionConfig,
    SelectionConfig,
    run,
    write_frame,
    write_json,
)
from hybridfi.regressors import RegressorSpec, train
from hybridfi.synth import SyntheticSpec, generate
from hybridfi.utils.logger import create_rows_table, progress_enabled, setup_logger

logger = logging.getLogger("hybridfi.cli")

COMMANDS = ("importance", "interactions", "optimize", "generate")


def get_parser():
    parser = argparse.ArgumentParser(
        prog="run_hybridfi",
        description="Hybrid LIME + NID feature reconstruction and selection for tabular regression",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS, help="what to run")
    parser.add_argument("--config", required=True, metavar="FILE", help="path to a JSON run configuration")
    parser.add_argument("--data", metavar="FILE", help="override DATA.PATH")
    parser.add_argument("--target", help="override DATA.TARGET")
    parser.add_argument("--out", metavar="DIR", help="override OUTPUT_DIR")
    parser.add_argument("--seed", type=int, help="override SEED")
    parser.add_argument(
        "--opts",
        help="Modify config options using the command-line 'KEY VALUE' pairs",
        default=[],
        nargs=argparse.REMAINDER,
    )
    return parser


def load_dataset(cfg) -> Dataset:
    if not cfg.DATA.PATH:
        raise ConfigError("DATA.PATH is not set (use --data or the config file)")
    if not cfg.DATA.TARGET:
        raise ConfigError("DATA.TARGET is not set (use --target or the config file)")
    if not os.path.isfile(cfg.DATA.PATH):
        raise ConfigError(f"DATA.PATH {cfg.DATA.PATH} does not exist")
    d = load_csv(cfg.DATA.PATH, cfg.DATA.TARGET)
    return d


def train_split(cfg, d: Dataset, seed: int) -> SplitSpec:
    return SplitSpec.from_config(cfg, d.n_rows, seed)


def cmd_importance(cfg) -> str:
    d = load_dataset(cfg)
    seed = cfg.SEED
    train_set, _ = split(d, train_split(cfg, d, seed))
    model = train(RegressorSpec.from_config(cfg, seed), train_set)
    ranking = global_ranking(model, train_set, LimeConfig.from_config(cfg, seed), PickConfig.from_config(cfg, seed))
    path = os.path.join(cfg.OUTPUT_DIR, "importance.csv")
    ranking.write_csv(path)
    logger.info("Feature importance (rank 1 = least important):\n" + create_rows_table(ranking.to_dict()))
    return path


def cmd_interactions(cfg) -> str:
    d = load_dataset(cfg)
    seed = cfg.SEED
    train_set, _ = split(d, train_split(cfg, d, seed))
    candidates = detect_interactions(train_set, MlpConfig.from_config(cfg, seed), CutoffConfig.from_config(cfg))
    path = os.path.join(cfg.OUTPUT_DIR, "interactions.csv")
    write_interactions_csv(candidates, path)
    if candidates:
        logger.info(
            "Detected interactions:\n"
            + create_rows_table([{"feature_set": c.label(), "strength": c.strength} for c in candidates])
        )
    else:
        logger.info("No interactions survived the cut-off")
    return path


def run_repetition(cfg, d: Dataset, repetition: int) -> PipelineReport:
    seed = cfg.SEED + repetition
    return run(
        d,
        RegressorSpec.from_config(cfg, seed),
        LimeConfig.from_config(cfg, seed),
        PickConfig.from_config(cfg, seed),
        MlpConfig.from_config(cfg, seed),
        CutoffConfig.from_config(cfg),
        ReconstructionConfig.from_config(cfg),
        SelectionConfig.from_config(cfg),
        train_split(cfg, d, seed),
    )


def _mean_std(values: list[float | None]) -> dict:
    if any(v is None for v in values):
        return {"mean": None, "std": None}
    arr = np.asarray(values, dtype=np.float64)
    return {"mean": float(arr.mean()), "std": float(arr.std(ddof=1)) if arr.shape[0] > 1 else None}


def summarize(reports: list[PipelineReport]) -> dict:
    return {
        "repetitions": len(reports),
        "r2_improvement_pct": _mean_std([r.improvement_pct["r2"] for r in reports]),
        "rmse_improvement_pct": _mean_std([r.improvement_pct["rmse"] for r in reports]),
        "features_deleted": _mean_std([float(r.features_deleted) for r in reports]),
        "baseline_r2": _mean_std([r.baseline_metrics.r2 for r in reports]),
        "baseline_rmse": _mean_std([r.baseline_metrics.rmse for r in reports]),
        "optimized_r2": _mean_std([r.optimized_metrics.r2 for r in reports]),
        "optimized_rmse": _mean_std([r.optimized_metrics.rmse for r in reports]),
    }


def summary_frame(reports: list[PipelineReport], summary: dict) -> pd.DataFrame:
    rows = [
        {
            "repetition": str(i),
            "r2_pct": r.improvement_pct["r2"],
            "rmse_pct": r.improvement_pct["rmse"],
            "features_deleted": float(r.features_deleted),
        }
        for i, r in enumerate(reports)
    ]
    for stat in ("mean", "std"):
        rows.append(
            {
                "repetition": stat,
                "r2_pct": summary["r2_improvement_pct"][stat],
                "rmse_pct": summary["rmse_improvement_pct"][stat],
                "features_deleted": summary["features_deleted"][stat],
            }
        )
    return pd.DataFrame(rows, columns=["repetition", "r2_pct", "rmse_pct", "features_deleted"])


def cmd_optimize(cfg) -> str:
    d = load_dataset(cfg)
    reps = tqdm(range(cfg.REPETITIONS), desc="repetitions", disable=not progress_enabled(logger))
    reports = []
    for r in reps:
        reports.append(run_repetition(cfg, d, r))
        # rewritten after every repetition
        write_frame(_sweep_frame(reports), os.path.join(cfg.OUTPUT_DIR, "sweep.csv"))

    out = cfg.OUTPUT_DIR
    first = reports[0]
    first.stage1_ranking.write_csv(os.path.join(out, "importance_stage1.csv"))
    first.stage2_ranking.write_csv(os.path.join(out, "importance_stage2.csv"))
    write_interactions_csv(first.interactions, os.path.join(out, "interactions.csv"))

    summary = summarize(reports)
    write_frame(summary_frame(reports, summary), os.path.join(out, "summary.csv"))
    path = os.path.join(out, "report.json")
    write_json(
        {
            "target": cfg.DATA.TARGET,
            "regressor": cfg.REGRESSOR.KIND,
            "runs": [r.to_dict() for r in reports],
            "summary": summary,
        },
        path,
    )
    logger.info("Improvements per repetition:\n" + create_rows_table(summary_frame(reports, summary).to_dict("records")))
    return path


def _sweep_frame(reports: list[PipelineReport]) -> pd.DataFrame:
    frames = []
    for i, r in enumerate(reports):
        frame = r.sweep_frame()
        frame.insert(0, "repetition", i)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def cmd_generate(cfg) -> str:
    spec = SyntheticSpec.from_config(cfg, cfg.SEED)
    d, truth = generate(spec)
    path = os.path.join(cfg.OUTPUT_DIR, "synthetic.csv")
    write_csv(d, path)
    write_json({"target": d.target_name, "terms": truth, "noise_sigma": spec.noise_sigma}, os.path.join(cfg.OUTPUT_DIR, "ground_truth.json"))
    logger.info(f"Wrote {d.n_rows} synthetic rows x {d.n_features} features to {path}")
    return path


def main(argv=None) -> int:
    args = get_parser().parse_args(argv)
    try:
        cfg = setup_cfg(args)
        os.makedirs(cfg.OUTPUT_DIR, exist_ok=True)
        setup_logger(cfg.OUTPUT_DIR)
        dump_cfg(cfg, os.path.join(cfg.OUTPUT_DIR, "config.yaml"))
        handler = {
            "importance": cmd_importance,
            "interactions": cmd_interactions,
            "optimize": cmd_optimize,
            "generate": cmd_generate,
        }[args.command]
        path = handler(cfg)
        logger.info(f"Results written to {path}")
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.debug("run failed", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
