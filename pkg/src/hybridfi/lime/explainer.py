import logging
from dataclasses import dataclass

import numpy as np

from hybridfi.data import Dataset
from hybridfi.errors import ConfigError, ModelError
from hybridfi.lime.lasso import DEFAULT_TOL, weighted_lasso
from hybridfi.regressors import SupportsPredict

logger = logging.getLogger(__name__)

AGGREGATIONS = ("sum", "mean")


@dataclass(frozen=True)
class LimeConfig:
    n_perturbations: int = 5000
    # None resolves to 0.75 * sqrt(d) for the explained dataset
    kernel_width: float | None = None
    lasso_lambda: float = 0.01
    aggregation: str = "sum"
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")
        if self.n_perturbations < 1:
            raise ConfigError(f"n_perturbations must be positive, got {self.n_perturbations}")
        if self.kernel_width is not None and not self.kernel_width > 0:
            raise ConfigError(f"kernel_width must be positive, got {self.kernel_width}")
        if self.lasso_lambda < 0:
            raise ConfigError(f"lasso_lambda must be nonnegative, got {self.lasso_lambda}")
        if self.aggregation not in AGGREGATIONS:
            raise ConfigError(f"aggregation must be one of {AGGREGATIONS}, got {self.aggregation!r}")

    @classmethod
    def from_config(cls, cfg, seed: int) -> "LimeConfig":
        return cls(
            n_perturbations=cfg.LIME.N_PERTURBATIONS,
            kernel_width=cfg.LIME.KERNEL_WIDTH,
            lasso_lambda=cfg.LIME.LASSO_LAMBDA,
            aggregation=cfg.LIME.AGGREGATION,
            seed=seed,
            n_jobs=cfg.NUM_WORKERS,
        )

    def resolve_kernel_width(self, n_features: int) -> float:
        if self.kernel_width is not None:
            return float(self.kernel_width)
        return 0.75 * float(np.sqrt(n_features))


@dataclass(frozen=True, eq=False)
class FeatureStats:
    """Per-feature mean and (population) std of the training split; zero std is clamped to 1."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def from_dataset(cls, train: Dataset) -> "FeatureStats":
        if train.n_rows == 0:
            raise ModelError("feature statistics need a nonempty training set")
        mean = np.asarray(train.values).mean(axis=0)
        std = np.asarray(train.values).std(axis=0)
        if np.any(std == 0):
            constant = [n for n, s in zip(train.feature_names, std) if s == 0]
            logger.warning(f"constant features {constant}: perturbation std clamped to 1")
        std = np.where(std > 0, std, 1.0)
        return cls(mean=mean, std=std)

    def standardize(self, rows: np.ndarray) -> np.ndarray:
        return (rows - self.mean) / self.std


@dataclass(frozen=True, eq=False)
class LocalExplanation:
    instance: int
    coefficients: np.ndarray
    intercept: float
    local_fit_r2: float

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "coefficients": self.coefficients.tolist(),
            "intercept": self.intercept,
            "local_fit_r2": self.local_fit_r2,
        }


def perturb(
    x: np.ndarray, stats: FeatureStats, cfg: LimeConfig, instance_index: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """
    Draw `cfg.n_perturbations` rows: row 0 is `x` itself, the rest are independent
    Gaussians per feature with the training mean/std.

    The RNG stream is derived from (cfg.seed, instance_index) so explanations of
    distinct instances can run in any order.

    Returns:
        (samples in raw units, Euclidean distances to x in standardized units)
    """
    if cfg.n_perturbations < 2:
        raise ConfigError(f"perturbation needs at least 2 samples, got {cfg.n_perturbations}")
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != stats.mean.shape[0]:
        raise ModelError(f"instance has {x.shape[0]} features, statistics have {stats.mean.shape[0]}")
    rng = np.random.default_rng([cfg.seed, instance_index])
    z = rng.standard_normal((cfg.n_perturbations, x.shape[0]))
    samples = stats.mean + z * stats.std
    samples[0] = x
    scaled = stats.standardize(samples)
    distances = np.linalg.norm(scaled - scaled[0], axis=1)
    return samples, distances


def kernel_weight(distance, width: float):
    """Exponential smoothing kernel exp(-d^2 / width^2)."""
    return np.exp(-(np.asarray(distance, dtype=np.float64) ** 2) / width**2)


def _weighted_r2(y: np.ndarray, y_hat: np.ndarray, w: np.ndarray) -> float:
    y_bar = np.dot(w, y) / w.sum()
    ss_tot = float(np.dot(w, (y - y_bar) ** 2))
    if ss_tot == 0.0:
        return 1.0
    return 1.0 - float(np.dot(w, (y - y_hat) ** 2)) / ss_tot


def explain_local(
    model: SupportsPredict,
    x,
    train: Dataset,
    cfg: LimeConfig,
    instance_index: int = 0,
    stats: FeatureStats | None = None,
    tol: float = DEFAULT_TOL,
) -> LocalExplanation:
    """
    Fit the sparse linear surrogate of `model` around `x`.

    Perturbed samples are scored by the model in raw units, weighted by the
    kernel on standardized distance, and regressed by weighted lasso on
    standardized coordinates; coefficients are therefore per standard deviation
    of each training column.
    """
    stats = stats if stats is not None else FeatureStats.from_dataset(train)
    samples, distances = perturb(x, stats, cfg, instance_index)
    y = np.asarray(model.predict(samples), dtype=np.float64)
    weights = kernel_weight(distances, cfg.resolve_kernel_width(train.n_features))
    Z = stats.standardize(samples)
    coef, intercept = weighted_lasso(Z, y, weights, cfg.lasso_lambda, tol=tol)
    fit_r2 = _weighted_r2(y, Z @ coef + intercept, weights)
    return LocalExplanation(instance=instance_index, coefficients=coef, intercept=intercept, local_fit_r2=fit_r2)
