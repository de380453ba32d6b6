import logging
from dataclasses import dataclass

import numpy as np

from hybridfi.data import Dataset
from hybridfi.errors import ConfigError

logger = logging.getLogger(__name__)

DISTRIBUTIONS = ("uniform", "normal")


def synthetic_feature_names(n_features: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n_features)]


@dataclass(frozen=True)
class SyntheticSpec:
    """
    y = sum_k coef_k * prod_{f in set_k} x_f + N(0, noise_sigma^2).

    Feature indices are 0-based; feature i is named x{i+1}. Singleton sets are
    linear terms, larger sets are products.
    """

    n_rows: int
    n_features: int
    terms: tuple[tuple[float, tuple[int, ...]], ...]
    noise_sigma: float = 0.0
    distribution: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")
        terms = tuple((float(c), tuple(int(i) for i in idx)) for c, idx in self.terms)
        object.__setattr__(self, "terms", terms)
        if self.n_rows < 1 or self.n_features < 1:
            raise ConfigError(f"need positive n_rows and n_features, got {self.n_rows}, {self.n_features}")
        if not terms:
            raise ConfigError("a synthetic spec needs at least one term")
        for _, idx in terms:
            if not idx or len(set(idx)) != len(idx) or min(idx) < 0 or max(idx) >= self.n_features:
                raise ConfigError(f"invalid term feature set {list(idx)} for {self.n_features} features")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be nonnegative, got {self.noise_sigma}")
        if self.distribution not in DISTRIBUTIONS:
            raise ConfigError(f"distribution must be one of {DISTRIBUTIONS}, got {self.distribution!r}")

    @classmethod
    def from_config(cls, cfg, seed: int) -> "SyntheticSpec":
        return cls(
            n_rows=cfg.SYNTH.N_ROWS,
            n_features=cfg.SYNTH.N_FEATURES,
            terms=tuple((c, tuple(idx)) for c, idx in cfg.SYNTH.TERMS),
            noise_sigma=cfg.SYNTH.NOISE_SIGMA,
            distribution=cfg.SYNTH.DISTRIBUTION,
            seed=seed,
        )

    def ground_truth(self) -> list[dict]:
        names = synthetic_feature_names(self.n_features)
        return [
            {"coefficient": c, "features": list(idx), "names": [names[i] for i in idx]} for c, idx in self.terms
        ]

    def interaction_sets(self) -> list[tuple[int, ...]]:
        return [tuple(sorted(idx)) for _, idx in self.terms if len(idx) >= 2]


def generate(spec: SyntheticSpec) -> tuple[Dataset, list[dict]]:
    """Draw the feature matrix, then the noise, from one generator seeded with `spec.seed`."""
    rng = np.random.default_rng(spec.seed)
    shape = (spec.n_rows, spec.n_features)
    X = rng.uniform(-1.0, 1.0, size=shape) if spec.distribution == "uniform" else rng.standard_normal(shape)
    y = np.zeros(spec.n_rows)
    for coef, idx in spec.terms:
        y = y + coef * np.prod(X[:, list(idx)], axis=1)
    if spec.noise_sigma > 0:
        y = y + rng.normal(0.0, spec.noise_sigma, size=spec.n_rows)
    d = Dataset.from_arrays(X, y, synthetic_feature_names(spec.n_features), target_name="y")
    return d, spec.ground_truth()
