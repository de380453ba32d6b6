from .detect import detect_interactions
from .interactions import (
    CutoffConfig,
    InteractionCandidate,
    aggregate_influence,
    cutoff_topk,
    interaction_strength,
    interactions_frame,
    rank_candidates,
    write_interactions_csv,
)
from .mlp import MlpConfig, MlpWeights, ReluMlp, mlp_forward, penalized_loss, train_mlp
