import json

import numpy as np
import pytest

from hybridfi.data import Dataset


class LinearModel:
    """Exact linear map, usable wherever a trained model is expected."""

    def __init__(self, coef, intercept=0.0):
        self.coef = np.asarray(coef, dtype=np.float64)
        self.intercept = float(intercept)

    def predict(self, rows):
        return np.asarray(rows, dtype=np.float64) @ self.coef + self.intercept


class ConstantModel:
    def __init__(self, value: float):
        self.value = float(value)

    def predict(self, rows):
        return np.full(np.asarray(rows).shape[0], self.value)


def random_dataset(n_rows: int, n_features: int, seed: int = 0, target_fn=None) -> Dataset:
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(n_rows, n_features))
    y = target_fn(X) if target_fn is not None else X @ rng.normal(size=n_features) + 0.1 * rng.standard_normal(n_rows)
    return Dataset.from_arrays(X, y, [f"x{i + 1}" for i in range(n_features)])


@pytest.fixture
def small_dataset() -> Dataset:
    return random_dataset(120, 4, seed=7)


@pytest.fixture
def write_config(tmp_path):
    def _write(data: dict, name: str = "config.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _write
