from dataclasses import dataclass

import numpy as np

from hybridfi.errors import MetricError


def _as_pair(y_true, y_pred) -> tuple[np.ndarray, np.ndarray]:
    y_true = np.asarray(y_true, dtype=np.float64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.float64).ravel()
    if y_true.shape != y_pred.shape:
        raise MetricError(f"length mismatch: y_true has {y_true.shape[0]}, y_pred has {y_pred.shape[0]}")
    if y_true.shape[0] == 0:
        raise MetricError("metrics need at least one value")
    return y_true, y_pred


def r2_score(y_true, y_pred) -> float:
    """Coefficient of determination 1 - SS_res / SS_tot."""
    y_true, y_pred = _as_pair(y_true, y_pred)
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        raise MetricError("R^2 is undefined for a zero-variance y_true")
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    return 1.0 - ss_res / ss_tot


def rmse(y_true, y_pred) -> float:
    y_true, y_pred = _as_pair(y_true, y_pred)
    return float(np.sqrt(np.mean((y_true - y_pred) ** 2)))


@dataclass(frozen=True)
class PredictionMetrics:
    r2: float
    rmse: float

    def __post_init__(self):
        if self.rmse < 0:
            raise MetricError(f"rmse must be nonnegative, got {self.rmse}")
        if self.r2 > 1.0:
            raise MetricError(f"r2 cannot exceed 1, got {self.r2}")

    @classmethod
    def evaluate(cls, y_true, y_pred) -> "PredictionMetrics":
        return cls(r2=r2_score(y_true, y_pred), rmse=rmse(y_true, y_pred))

    def to_dict(self) -> dict:
        return {"r2": self.r2, "rmse": self.rmse}
