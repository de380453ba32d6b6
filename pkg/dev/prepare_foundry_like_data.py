import argparse
import os

import numpy as np

from hybridfi.data import Dataset, write_csv

QUANTITIES = [f"FurnaceQuantity{i}" for i in range(1, 9)]
TEMPERATURES = [f"FurnaceTemperature{i}" for i in range(1, 8)]
FEATURES = ["TemperatureAct", "FurnaceWeight", "FurnaceIsolationResistance"] + QUANTITIES + TEMPERATURES
UNITS = ["°C", "kg", "MΩ"] + ["ton"] * len(QUANTITIES) + ["°C"] * len(TEMPERATURES)
TARGETS = {"FurnaceVoltage": "V", "FurnaceCurrent": "A"}


def sample_inputs(n_rows: int, rng: np.random.Generator) -> np.ndarray:
    """Plausible ranges for the 18 casting-process inputs."""
    temperature_act = rng.normal(1450.0, 25.0, n_rows)
    weight = rng.uniform(2000.0, 6000.0, n_rows)
    isolation = rng.lognormal(mean=2.0, sigma=0.3, size=n_rows)
    quantities = rng.gamma(shape=2.0, scale=0.75, size=(n_rows, len(QUANTITIES)))
    temperatures = temperature_act[:, None] + rng.normal(0.0, 15.0, size=(n_rows, len(TEMPERATURES)))
    return np.column_stack([temperature_act, weight, isolation, quantities, temperatures])


def voltage(X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    q = X[:, 3:11]
    t = X[:, 11:18]
    return (
        380.0
        + 12.0 * q[:, 1]
        + 1.5 * q[:, 0] * q[:, 2]
        + 0.8 * q[:, 4] * q[:, 5] * q[:, 6]
        + 0.02 * (t[:, 0] - 1450.0)
        + rng.normal(0.0, 2.0, X.shape[0])
    )


def current(X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    q = X[:, 3:11]
    weight = X[:, 1]
    return (
        900.0
        + 0.05 * weight
        + 40.0 * q[:, 3]
        + 6.0 * q[:, 1] * q[:, 7]
        - 2.0 * X[:, 2]
        + rng.normal(0.0, 10.0, X.shape[0])
    )


def prepare(n_rows: int, seed: int, output_dir: str):
    rng = np.random.default_rng(seed)
    X = sample_inputs(n_rows, rng)
    for target, y in (("FurnaceVoltage", voltage(X, rng)), ("FurnaceCurrent", current(X, rng))):
        d = Dataset.from_arrays(X, y, FEATURES, target_name=target, units=UNITS)
        path = os.path.join(output_dir, f"foundry_like_{target.removeprefix('Furnace').lower()}.csv")
        write_csv(d, path)
        print(f"Wrote {d.n_rows} rows x {d.n_features} features ({target} [{TARGETS[target]}]) to {path}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Write an 18-feature surrogate of the foundry dataset")
    parser.add_argument("--rows", type=int, default=57601)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output_dir", default="datasets")
    args = parser.parse_args()

    prepare(args.rows, args.seed, args.output_dir)
