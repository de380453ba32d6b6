class HybridfiError(Exception):
    """Base class of every error raised by hybridfi."""


class ConfigError(HybridfiError, ValueError):
    """A configuration value violates its declared invariant."""


class DatasetError(HybridfiError, ValueError):
    """Ingestion or schema violation of a tabular dataset."""


class ModelError(HybridfiError, ValueError):
    """Training or prediction contract violation (empty data, column mismatch)."""


class MetricError(HybridfiError, ValueError):
    """A metric is undefined for the given vectors."""


class TrainingDivergedError(HybridfiError, RuntimeError):
    """The network loss became non-finite during training."""

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"MLP training diverged at epoch {epoch} (loss={loss})")
        self.epoch = epoch
        self.loss = loss
