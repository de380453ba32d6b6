from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from hybridfi.errors import ConfigError, DatasetError

INTERACTION_SEPARATOR = "*"


@dataclass(frozen=True)
class FeatureDescriptor:
    """
    One named column of a dataset.

    `constituents` is empty for raw features; for interaction features it lists the
    raw feature names whose element-wise product forms the column.
    """

    name: str
    unit: str | None = None
    constituents: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise DatasetError("feature name must be non-empty")
        if self.constituents and len(self.constituents) < 2:
            raise DatasetError(
                f"interaction feature {self.name!r} needs at least 2 constituents, got {list(self.constituents)}"
            )

    @property
    def origin(self) -> str:
        return "interaction" if self.constituents else "raw"

    @property
    def is_interaction(self) -> bool:
        return bool(self.constituents)

    def to_dict(self) -> dict:
        return {"name": self.name, "unit": self.unit, "origin": self.origin, "constituents": list(self.constituents)}


def _frozen_array(a, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise DatasetError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Immutable numeric table: feature matrix (rows = instances) plus one target column.
    """

    features: tuple[FeatureDescriptor, ...]
    values: np.ndarray
    target_name: str
    target: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        values = _frozen_array(self.values, 2)
        target = _frozen_array(self.target, 1)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "target", target)

        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise DatasetError(f"duplicate feature names: {dup}")
        if self.target_name in names:
            raise DatasetError(f"target {self.target_name!r} is also a feature column")
        if values.shape[1] != len(self.features):
            raise DatasetError(
                f"column count {values.shape[1]} does not match descriptor count {len(self.features)}"
            )
        if values.shape[0] != target.shape[0]:
            raise DatasetError(f"row count mismatch: values {values.shape[0]} vs target {target.shape[0]}")
        if not np.all(np.isfinite(values)) or not np.all(np.isfinite(target)):
            raise DatasetError("dataset values must all be finite")

    @classmethod
    def from_arrays(
        cls,
        values,
        target,
        feature_names: Sequence[str],
        target_name: str = "y",
        units: Sequence[str | None] | None = None,
    ) -> "Dataset":
        units = units if units is not None else [None] * len(feature_names)
        features = tuple(FeatureDescriptor(name=n, unit=u) for n, u in zip(feature_names, units))
        return cls(features=features, values=values, target_name=target_name, target=target)

    @property
    def feature_names(self) -> list[str]:
        return [f.name for f in self.features]

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def index_of(self, name: str) -> int:
        for i, f in enumerate(self.features):
            if f.name == name:
                return i
        raise DatasetError(f"unknown feature {name!r}")

    def descriptor(self, name: str) -> FeatureDescriptor:
        return self.features[self.index_of(name)]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.index_of(name)]

    def take_rows(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.features, self.values[rows], self.target_name, self.target[rows])


@dataclass(frozen=True)
class SplitSpec:
    train_count: int
    seed: int = 0

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")
        if isinstance(self.train_count, bool) or int(self.train_count) != self.train_count or self.train_count < 1:
            raise ConfigError(f"train_count must be a positive integer, got {self.train_count!r}")

    @classmethod
    def from_fraction(cls, n_rows: int, fraction: float, seed: int = 0) -> "SplitSpec":
        if not 0.0 < fraction < 1.0:
            raise ConfigError(f"train fraction must lie in (0, 1), got {fraction}")
        count = int(np.floor(fraction * n_rows + 0.5))
        return cls(train_count=min(max(count, 1), max(n_rows - 1, 1)), seed=seed)

    @classmethod
    def from_config(cls, cfg, n_rows: int, seed: int) -> "SplitSpec":
        if cfg.DATA.TRAIN_COUNT:
            return cls(train_count=cfg.DATA.TRAIN_COUNT, seed=seed)
        return cls.from_fraction(n_rows, cfg.DATA.TRAIN_FRACTION, seed=seed)


def split(d: Dataset, s: SplitSpec) -> tuple[Dataset, Dataset]:
    """
    Uniform random permutation split; both parts keep the original row order.
    """
    if s.train_count >= d.n_rows:
        raise DatasetError(f"train_count {s.train_count} must be smaller than the row count {d.n_rows}")
    perm = np.random.default_rng(s.seed).permutation(d.n_rows)
    train_rows = np.sort(perm[: s.train_count])
    test_rows = np.sort(perm[s.train_count :])
    return d.take_rows(train_rows), d.take_rows(test_rows)


def interaction_name(constituents: Iterable[str]) -> str:
    return INTERACTION_SEPARATOR.join(constituents)


def column_stats(col: np.ndarray) -> tuple[float, float]:
    """Mean and standard deviation of a column; a zero std is reported as 1."""
    std = float(col.std())
    return float(col.mean()), (std if std > 0 else 1.0)


def interaction_column(
    d: Dataset,
    constituents: Sequence[str],
    standardize: bool = False,
    stats: Mapping[str, tuple[float, float]] | None = None,
) -> tuple[tuple[str, ...], np.ndarray]:
    """
    Element-wise product of the constituent columns.

    Returns the constituents in dataset column order (the canonical order used for
    naming) and the product column. With `standardize`, each constituent is
    z-scored first, using `stats[name]` (mean, std) when given and the column's
    own moments otherwise.
    """
    names = list(dict.fromkeys(constituents))
    if len(names) != len(constituents):
        raise DatasetError(f"interaction constituents must be distinct, got {list(constituents)}")
    if len(names) < 2:
        raise DatasetError(f"an interaction needs at least 2 constituents, got {list(constituents)}")
    indices = sorted(d.index_of(n) for n in names)
    ordered = tuple(d.features[i].name for i in indices)
    product = np.ones(d.n_rows, dtype=np.float64)
    for i in indices:
        col = d.values[:, i]
        if standardize:
            mean, std = stats[d.features[i].name] if stats and d.features[i].name in stats else column_stats(col)
            col = (col - mean) / std
        product = product * col
    return ordered, product


def append_feature(d: Dataset, descriptor: FeatureDescriptor, column: np.ndarray) -> Dataset:
    column = np.asarray(column, dtype=np.float64)
    if column.shape != (d.n_rows,):
        raise DatasetError(f"appended column has shape {column.shape}, expected ({d.n_rows},)")
    values = np.column_stack([d.values, column])
    return Dataset(d.features + (descriptor,), values, d.target_name, d.target)


def encode_interaction(d: Dataset, constituents: Sequence[str], standardize: bool = False) -> Dataset:
    """
    Append one column equal to F_1 ⊙ F_2 ⊙ ... ⊙ F_t of the named constituent columns.
    """
    ordered, product = interaction_column(d, constituents, standardize=standardize)
    descriptor = FeatureDescriptor(name=interaction_name(ordered), constituents=ordered)
    return append_feature(d, descriptor, product)


def remove_features(d: Dataset, names: Sequence[str]) -> Dataset:
    drop = set(names)
    unknown = sorted(drop - set(d.feature_names))
    if unknown:
        raise DatasetError(f"cannot remove unknown features {unknown}")
    keep = [i for i, f in enumerate(d.features) if f.name not in drop]
    if not keep:
        raise DatasetError("removal would leave the dataset without features")
    if len(keep) == d.n_features:
        return d
    return Dataset(tuple(d.features[i] for i in keep), d.values[:, keep], d.target_name, d.target)


@dataclass(frozen=True)
class ReconstructionSpec:
    """
    Recipe that rebuilds a reconstructed dataset from the original one:
    drop `removed_raw`, append one product column per entry of `interactions`
    (always computed from the original raw columns), then drop `removed_stage2`.

    `interaction_stats` holds (name, mean, std) of each raw constituent, taken
    on the training split, for standardized interactions.
    """

    removed_raw: tuple[str, ...] = ()
    interactions: tuple[tuple[str, ...], ...] = ()
    removed_stage2: tuple[str, ...] = ()
    standardize_interactions: bool = False
    interaction_stats: tuple[tuple[str, float, float], ...] = ()

    def with_stage2(self, removed: Sequence[str]) -> "ReconstructionSpec":
        return replace(self, removed_stage2=tuple(removed))

    def stats_by_name(self) -> dict[str, tuple[float, float]]:
        return {name: (mean, std) for name, mean, std in self.interaction_stats}

    def to_dict(self) -> dict:
        return {
            "removed_raw": list(self.removed_raw),
            "interactions": [list(c) for c in self.interactions],
            "removed_stage2": list(self.removed_stage2),
            "standardize_interactions": self.standardize_interactions,
            "interaction_stats": [
                {"feature": name, "mean": mean, "std": std} for name, mean, std in self.interaction_stats
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReconstructionSpec":
        return cls(
            removed_raw=tuple(data.get("removed_raw", ())),
            interactions=tuple(tuple(c) for c in data.get("interactions", ())),
            removed_stage2=tuple(data.get("removed_stage2", ())),
            standardize_interactions=bool(data.get("standardize_interactions", False)),
            interaction_stats=tuple(
                (s["feature"], float(s["mean"]), float(s["std"])) for s in data.get("interaction_stats", ())
            ),
        )


def constituent_stats(train: Dataset, interactions: Iterable[Sequence[str]]) -> tuple[tuple[str, float, float], ...]:
    """(name, mean, std) of every raw column used by `interactions`, in column order."""
    used = {name for constituents in interactions for name in constituents}
    return tuple(
        (f.name, *column_stats(train.values[:, i])) for i, f in enumerate(train.features) if f.name in used
    )


def apply_reconstruction(original: Dataset, spec: ReconstructionSpec) -> Dataset:
    d = remove_features(original, spec.removed_raw)
    stats = spec.stats_by_name()
    seen: set[frozenset[str]] = set()
    for constituents in spec.interactions:
        key = frozenset(constituents)
        if key in seen:
            continue
        seen.add(key)
        ordered, product = interaction_column(
            original, constituents, standardize=spec.standardize_interactions, stats=stats
        )
        name = interaction_name(ordered)
        if name in d.feature_names:
            raise DatasetError(f"interaction column {name!r} collides with an existing feature name")
        d = append_feature(d, FeatureDescriptor(name=name, constituents=ordered), product)
    return remove_features(d, spec.removed_stage2)
