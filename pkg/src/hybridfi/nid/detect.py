import logging

from hybridfi.data import Dataset
from hybridfi.nid.interactions import CutoffConfig, InteractionCandidate, cutoff_topk, rank_candidates
from hybridfi.nid.mlp import MlpConfig, train_mlp

logger = logging.getLogger(__name__)


def detect_interactions(train: Dataset, mlp_cfg: MlpConfig, cut_cfg: CutoffConfig) -> list[InteractionCandidate]:
    """Train the MLP, rank greedy candidates, apply the cut-off and attach feature names."""
    weights = train_mlp(train, mlp_cfg)
    ranked = rank_candidates(weights)
    kept = cutoff_topk(ranked, cut_cfg)
    names = train.feature_names
    kept = [c.with_names(names) for c in kept]
    logger.debug(f"NID kept {len(kept)} of {len(ranked)} candidates")
    return kept
