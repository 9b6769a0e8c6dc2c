"""Minibatch training with validation tracking and early stopping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Model, backward, build_model, mse_loss
from .optim import AdamState, adam_step, sgd_step

__all__ = ["TrainConfig", "train"]


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training run.

    ``optimizer`` selects between minibatch Adam (default) and plain
    gradient descent (useful for descent-property checks).
    """

    learning_rate: float = 1e-3
    weight_decay_lambda: float = 1e-5
    batch_size: int = 32
    max_epochs: int = 400
    early_stop_patience: int = 40
    seed: int = 0
    optimizer: str = "adam"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.weight_decay_lambda < 0:
            raise ValueError("weight_decay_lambda must be nonnegative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError("optimizer must be 'adam' or 'sgd'")


def train(
    features: np.ndarray,
    targets: np.ndarray,
    split: dict,
    config: TrainConfig,
    model: Model | None = None,
    output_grid: np.ndarray | None = None,
    clamp_max: float | None = None,
):
    """Train an inversion network on paired (spectrum features, profiles).

    Parameters
    ----------
    features : (N, n_in) array
        Raw (unstandardized) feature vectors for the full dataset.
    targets : (N, n_out) array
        Depth profiles aligned with ``features``.
    split : mapping with "train" and "validation" index arrays
        As produced by ``evaluate.split_dataset``; test indices are ignored.
    config : TrainConfig
    model : Model, optional
        A freshly built default model (seeded by ``config.seed``) when omitted.
    output_grid : array, optional
        Spatial grid attached to the model for prediction.
    clamp_max : float, optional
        Prediction-time depth ceiling stored on the model.

    Returns
    -------
    (model, history) where history has per-epoch "train_mse" and "val_mse"
    lists, the selected "best_epoch", and "best_val_mse".  The returned
    model carries the parameters of the best validation epoch and the
    training-set standardization statistics.

    Raises
    ------
    RuntimeError
        If the loss becomes non-finite ("divergence"), reporting the epoch.
    """
    features = np.asarray(features, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if features.ndim != 2 or targets.ndim != 2 or features.shape[0] != targets.shape[0]:
        raise ValueError("features and targets must be 2-D with equal sample counts")
    train_idx = np.asarray(split["train"], dtype=int)
    val_idx = np.asarray(split["validation"], dtype=int)
    if train_idx.size == 0 or val_idx.size == 0:
        raise ValueError("empty training or validation split")
    if np.intersect1d(train_idx, val_idx).size:
        raise ValueError("train and validation splits overlap")

    if model is None:
        model = build_model(config.seed, n_in=features.shape[1], n_out=targets.shape[1])
    mean = features[train_idx].mean(axis=0)
    scale = np.maximum(features[train_idx].std(axis=0), 1e-8)
    model.input_mean = mean
    model.input_scale = scale
    if output_grid is not None:
        model.output_grid = np.asarray(output_grid, dtype=float)
    if clamp_max is not None:
        model.clamp_max = float(clamp_max)

    x_train = (features[train_idx] - mean) / scale
    y_train = targets[train_idx]
    x_val = (features[val_idx] - mean) / scale
    y_val = targets[val_idx]

    rng = np.random.default_rng(config.seed)
    state = AdamState.for_parameters(model.parameters())
    history = {"train_mse": [], "val_mse": []}
    best_val = np.inf
    best_epoch = -1
    best_params = [p.copy() for p in model.parameters()]
    stall = 0

    n = x_train.shape[0]
    for epoch in range(config.max_epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            loss, grads = backward(
                model, x_train[batch], y_train[batch], config.weight_decay_lambda
            )
            if not np.isfinite(loss):
                raise RuntimeError(f"training diverged (non-finite loss) at epoch {epoch}")
            if config.optimizer == "adam":
                adam_step(model.parameters(), grads, state, config.learning_rate)
            else:
                sgd_step(model.parameters(), grads, config.learning_rate)

        train_mse = mse_loss(model.forward(x_train), y_train)
        val_mse = mse_loss(model.forward(x_val), y_val)
        if not (np.isfinite(train_mse) and np.isfinite(val_mse)):
            raise RuntimeError(f"training diverged (non-finite loss) at epoch {epoch}")
        history["train_mse"].append(train_mse)
        history["val_mse"].append(val_mse)

        if val_mse < best_val:
            best_val = val_mse
            best_epoch = epoch
            best_params = [p.copy() for p in model.parameters()]
            stall = 0
        else:
            stall += 1
            if stall > config.early_stop_patience:
                break

    model.set_parameters(best_params)
    history["best_epoch"] = best_epoch
    history["best_val_mse"] = float(best_val)
    return model, history
