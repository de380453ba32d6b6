from .base import (
    REGRESSOR_KINDS,
    RegressorSpec,
    SupportsPredict,
    TrainedModel,
    predict,
    predict_dataset,
    train,
)
from .metrics import PredictionMetrics, r2_score, rmse
from .tree import RegressionTree, build_tree
