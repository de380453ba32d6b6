import logging
import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn
from tqdm import tqdm

from hybridfi.data import Dataset
from hybridfi.errors import ConfigError, ModelError, TrainingDivergedError
from hybridfi.utils.logger import progress_enabled

logger = logging.getLogger(__name__)

DTYPE = torch.float64


@dataclass(frozen=True)
class MlpConfig:
    hidden_sizes: tuple[int, ...] = (64, 32, 16)
    l1_lambda: float = 5e-5
    learning_rate: float = 1e-3
    epochs: int = 200
    batch_size: int = 128
    seed: int = 0

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if not self.hidden_sizes:
            raise ConfigError("the MLP needs at least one hidden layer")
        if any(h < 1 for h in self.hidden_sizes):
            raise ConfigError(f"hidden sizes must be positive, got {list(self.hidden_sizes)}")
        if self.l1_lambda < 0:
            raise ConfigError(f"l1_lambda must be nonnegative, got {self.l1_lambda}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        # 0 epochs returns the initialization
        if self.epochs < 0:
            raise ConfigError(f"epochs must be nonnegative, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be positive, got {self.batch_size}")

    @classmethod
    def from_config(cls, cfg, seed: int) -> "MlpConfig":
        return cls(
            hidden_sizes=tuple(cfg.MLP.HIDDEN_SIZES),
            l1_lambda=cfg.MLP.L1_LAMBDA,
            learning_rate=cfg.MLP.LEARNING_RATE,
            epochs=cfg.MLP.EPOCHS,
            batch_size=cfg.MLP.BATCH_SIZE,
            seed=seed,
        )


def mlp_forward(x: torch.Tensor, weights: list[torch.Tensor], biases: list[torch.Tensor]) -> torch.Tensor:
    """ReLU after every layer but the last; weights are (out, in)."""
    h = x
    for W, b in zip(weights[:-1], biases[:-1]):
        h = torch.relu(h @ W.T + b)
    return (h @ weights[-1].T + biases[-1]).squeeze(-1)


class ReluMlp(nn.Module):
    """
    Fully connected regression network: `len(hidden_sizes)` ReLU layers and a
    linear scalar output.
    """

    def __init__(self, n_features: int, hidden_sizes: tuple[int, ...], generator: torch.Generator | None = None):
        super().__init__()
        sizes = (n_features,) + tuple(hidden_sizes) + (1,)
        self.layers = nn.ModuleList(
            nn.Linear(fan_in, fan_out, dtype=DTYPE) for fan_in, fan_out in zip(sizes[:-1], sizes[1:])
        )
        self.reset_parameters(generator)

    @torch.no_grad()
    def reset_parameters(self, generator: torch.Generator | None = None):
        # uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) from an explicit generator
        for layer in self.layers:
            bound = 1.0 / math.sqrt(layer.in_features)
            layer.weight.uniform_(-bound, bound, generator=generator)
            layer.bias.uniform_(-bound, bound, generator=generator)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return mlp_forward(x, [l.weight for l in self.layers], [l.bias for l in self.layers])

    def weight_l1(self) -> torch.Tensor:
        return sum(l.weight.abs().sum() for l in self.layers)


def penalized_loss(model: ReluMlp, x: torch.Tensor, y: torch.Tensor, l1_lambda: float) -> torch.Tensor:
    """Mean squared error plus l1_lambda times the L1 norm of every weight matrix (biases excluded)."""
    return torch.mean((model(x) - y) ** 2) + l1_lambda * model.weight_l1()


@dataclass(frozen=True, eq=False)
class MlpWeights:
    """
    Trained weights in standardized-input space.

    W[l] has one row per unit of hidden layer l+1 and one column per input of
    that layer; `w` holds the output coefficients of the last hidden layer.
    """

    W: tuple[np.ndarray, ...]
    b: tuple[np.ndarray, ...]
    w: np.ndarray
    output_bias: float = 0.0

    def __post_init__(self):
        W = tuple(np.asarray(m, dtype=np.float64) for m in self.W)
        w = np.asarray(self.w, dtype=np.float64).ravel()
        b = tuple(np.asarray(v, dtype=np.float64).ravel() for v in self.b) if self.b else tuple(np.zeros(m.shape[0]) for m in W)
        if not W:
            raise ModelError("MLP weights need at least one hidden layer")
        for lower, upper in zip(W[:-1], W[1:]):
            if upper.shape[1] != lower.shape[0]:
                raise ModelError(f"inconsistent layer shapes {lower.shape} -> {upper.shape}")
        if w.shape[0] != W[-1].shape[0]:
            raise ModelError(f"output vector has {w.shape[0]} entries, last hidden layer has {W[-1].shape[0]} units")
        if len(b) != len(W) or any(v.shape[0] != m.shape[0] for v, m in zip(b, W)):
            raise ModelError("bias vectors do not match the hidden layer sizes")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_module(cls, model: ReluMlp) -> "MlpWeights":
        layers = [(l.weight.detach().cpu().numpy().copy(), l.bias.detach().cpu().numpy().copy()) for l in model.layers]
        hidden, (out_w, out_b) = layers[:-1], layers[-1]
        return cls(
            W=tuple(W for W, _ in hidden),
            b=tuple(b for _, b in hidden),
            w=out_w[0],
            output_bias=float(out_b[0]),
        )

    @property
    def n_features(self) -> int:
        return self.W[0].shape[1]

    @property
    def n_units(self) -> int:
        return self.W[0].shape[0]

    def to_dict(self) -> dict:
        return {
            "W": [m.tolist() for m in self.W],
            "b": [v.tolist() for v in self.b],
            "w": self.w.tolist(),
            "output_bias": self.output_bias,
        }


def _standardized_tensors(train: Dataset) -> tuple[torch.Tensor, torch.Tensor]:
    X = np.asarray(train.values)
    y = np.asarray(train.target)
    x_std = X.std(axis=0)
    y_std = y.std()
    X = (X - X.mean(axis=0)) / np.where(x_std > 0, x_std, 1.0)
    y = (y - y.mean()) / (y_std if y_std > 0 else 1.0)
    return torch.as_tensor(X, dtype=DTYPE), torch.as_tensor(y, dtype=DTYPE)


def train_mlp(train: Dataset, cfg: MlpConfig) -> MlpWeights:
    """
    Mini-batch Adam on standardized inputs and target.

    Initialization and batch order come from one torch.Generator seeded with
    `cfg.seed`, so reruns are bitwise identical.
    """
    if train.n_rows == 0:
        raise ModelError("cannot train the MLP on an empty dataset")
    X, y = _standardized_tensors(train)
    generator = torch.Generator().manual_seed(cfg.seed)
    model = ReluMlp(train.n_features, cfg.hidden_sizes, generator=generator)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)

    n = X.shape[0]
    model.train()
    epochs = tqdm(range(cfg.epochs), desc="NID MLP", leave=False, disable=not progress_enabled(logger))
    for epoch in epochs:
        perm = torch.randperm(n, generator=generator)
        running = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            optimizer.zero_grad()
            loss = penalized_loss(model, X[idx], y[idx], cfg.l1_lambda)
            value = loss.item()
            if not math.isfinite(value):
                raise TrainingDivergedError(epoch, value)
            loss.backward()
            optimizer.step()
            running += value * idx.shape[0]
        if epoch % 50 == 0 or epoch == cfg.epochs - 1:
            logger.debug(f"MLP epoch {epoch}: loss {running / n:.6f}")

    return MlpWeights.from_module(model)
