"""Learned inversion: a small convolutional network mapping reflection
spectra to depth profiles, implemented from scratch on float64 arrays with
exact reverse-mode gradients and Adam training.

Tensors are plain numpy arrays throughout (row-major, finite values).
"""

from .layers import Conv1D, Dense, ReLU, Reshape
from .model import (
    Model,
    backward,
    build_model,
    features_from_coefficients,
    model_forward,
    mse_loss,
    predict,
)
from .optim import AdamState, adam_step, sgd_step
from .train import TrainConfig, train

__all__ = [
    "Conv1D",
    "Dense",
    "ReLU",
    "Reshape",
    "Model",
    "build_model",
    "model_forward",
    "mse_loss",
    "backward",
    "predict",
    "features_from_coefficients",
    "AdamState",
    "adam_step",
    "sgd_step",
    "TrainConfig",
    "train",
]
