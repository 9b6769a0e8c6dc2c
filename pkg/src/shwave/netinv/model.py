"""Model container, loss, exact backward pass, and prediction.

The default inversion network maps the 2M = 128 real features of a
reflection spectrum (concatenated real and imaginary parts) to a P = 128
point depth profile:

    dense 128 -> 256, relu,
    reshape to (16 channels x 16),
    conv1d(k=5, 16 -> 32), relu,
    conv1d(k=5, 32 -> 32), relu,
    flatten,
    dense 512 -> 128 (linear output).

Input features are standardized per feature with training-set statistics,
which are stored on the model and travel with its checkpoint.  Predicted
depths are clamped to the physical range [0, 0.8 * plate depth] at
prediction time only; training sees raw outputs.
"""

from __future__ import annotations

import numpy as np

from ..defect import DepthProfile
from ..forward import ReflectionSpectrum
from .layers import Conv1D, Dense, ReLU, Reshape

__all__ = [
    "Model",
    "build_model",
    "build_from_descriptor",
    "model_forward",
    "mse_loss",
    "backward",
    "predict",
    "features_from_coefficients",
]

DEFAULT_CLAMP_MAX = 0.8


class Model:
    """An ordered stack of layers plus the artifacts needed for prediction.

    Attributes set by training (or checkpoint loading): ``input_mean`` and
    ``input_scale`` (per-feature standardization), ``output_grid`` (the
    spatial grid of predicted profiles), ``clamp_max`` (prediction-time
    depth ceiling).
    """

    def __init__(self, layers, n_in: int, n_out: int):
        self.layers = list(layers)
        self.n_in = int(n_in)
        self.n_out = int(n_out)
        self.input_mean: np.ndarray | None = None
        self.input_scale: np.ndarray | None = None
        self.output_grid: np.ndarray | None = None
        self.clamp_max: float = DEFAULT_CLAMP_MAX
        self._validate_shapes()

    def _validate_shapes(self):
        """Dry-run a two-sample batch so incompatible layers fail at build time."""
        x = np.zeros((2, self.n_in))
        for layer in self.layers:
            try:
                x = layer.forward(x)
            except ValueError as exc:
                raise ValueError(f"incompatible layer stack at {layer.describe()}: {exc}") from exc
        if x.shape != (2, self.n_out):
            raise ValueError(
                f"model output shape {x.shape[1:]} does not match expected ({self.n_out},)"
            )

    def forward(self, x: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward_pass(self, grad_out: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad_out = layer.backward(grad_out)
        return grad_out

    def parameters(self) -> list[np.ndarray]:
        """Flat list of parameter arrays in a fixed traversal order."""
        return [layer.params[k] for layer in self.layers for k in sorted(layer.params)]

    def gradients(self) -> list[np.ndarray]:
        return [layer.grads[k] for layer in self.layers for k in sorted(layer.grads)]

    def set_parameters(self, values: list[np.ndarray]):
        current = self.parameters()
        if len(values) != len(current):
            raise ValueError("parameter list length mismatch")
        i = 0
        for layer in self.layers:
            for k in sorted(layer.params):
                if layer.params[k].shape != values[i].shape:
                    raise ValueError("parameter shape mismatch")
                layer.params[k] = values[i].copy()
                i += 1

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def describe(self) -> dict:
        return {
            "n_in": self.n_in,
            "n_out": self.n_out,
            "layers": [layer.describe() for layer in self.layers],
        }


def build_model(seed: int, n_in: int = 128, n_out: int = 128) -> Model:
    """Default convolutional inversion network with seeded initialization."""
    if n_in % 8 != 0:
        raise ValueError("n_in must be divisible by 8 to reshape into 16-wide channels")
    rng = np.random.default_rng(seed)
    hidden = 2 * n_in
    channels = 16
    width = hidden // channels
    layers = [
        Dense(n_in, hidden, rng),
        ReLU(),
        Reshape((channels, width)),
        Conv1D(channels, 32, 5, rng),
        ReLU(),
        Conv1D(32, 32, 5, rng),
        ReLU(),
        Reshape((32 * width,)),
        Dense(32 * width, n_out, rng),
    ]
    return Model(layers, n_in, n_out)


def build_from_descriptor(desc: dict) -> Model:
    """Rebuild a model (zero parameters) from its architecture descriptor."""
    layers = []
    for spec in desc["layers"]:
        kind = spec["kind"]
        if kind == "dense":
            layers.append(Dense(spec["n_in"], spec["n_out"]))
        elif kind == "relu":
            layers.append(ReLU())
        elif kind == "reshape":
            layers.append(Reshape(tuple(spec["shape"])))
        elif kind == "conv1d":
            layers.append(Conv1D(spec["c_in"], spec["c_out"], spec["kernel"]))
        else:
            raise ValueError(f"unknown layer kind {kind!r}")
    return Model(layers, desc["n_in"], desc["n_out"])


def model_forward(model: Model, x: np.ndarray) -> np.ndarray:
    """Evaluate the network on a (batch, n_in) array."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return model.forward(x[None, :])[0]
    return model.forward(x)


def mse_loss(prediction: np.ndarray, target: np.ndarray) -> float:
    """Mean of squared elementwise differences."""
    prediction = np.asarray(prediction, dtype=float)
    target = np.asarray(target, dtype=float)
    if prediction.shape != target.shape:
        raise ValueError(f"shape mismatch {prediction.shape} vs {target.shape}")
    diff = prediction - target
    return float(np.mean(diff * diff))


def backward(model: Model, x: np.ndarray, target: np.ndarray, lam: float = 0.0):
    """Gradients of mse_loss(model(x), target) + lam * ||theta||^2.

    Returns (loss, gradient list) with gradients ordered like
    ``model.parameters()``.  The regularizer sums lam * theta^2 over every
    parameter entry (weights and biases alike).
    """
    x = np.asarray(x, dtype=float)
    target = np.asarray(target, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
        target = target[None, :]
    pred = model.forward(x)
    if pred.shape != target.shape:
        raise ValueError(f"target shape {target.shape} does not match output {pred.shape}")
    diff = pred - target
    data_loss = float(np.mean(diff * diff))
    model.backward_pass(2.0 * diff / diff.size)
    params = model.parameters()
    grads = [g.copy() for g in model.gradients()]
    reg = 0.0
    if lam != 0.0:
        for p, g in zip(params, grads):
            g += 2.0 * lam * p
            reg += lam * float(np.sum(p * p))
    return data_loss + reg, grads


def features_from_coefficients(coefficients: np.ndarray) -> np.ndarray:
    """Stack Re and Im parts of complex spectra into real feature vectors."""
    c = np.asarray(coefficients)
    return np.concatenate([c.real, c.imag], axis=-1).astype(float)


def standardize(model: Model, features: np.ndarray) -> np.ndarray:
    if model.input_mean is None or model.input_scale is None:
        raise ValueError("model has no input statistics; train it or load a checkpoint")
    return (features - model.input_mean) / model.input_scale


def predict(model: Model, spectrum: ReflectionSpectrum) -> DepthProfile:
    """Reconstruct a depth profile from one reflection spectrum.

    Applies the stored standardization, evaluates the network, and clamps
    the output to [0, clamp_max].  Pure function of (model, spectrum).
    """
    feats = features_from_coefficients(spectrum.coefficients)
    z = standardize(model, feats[None, :])
    if model.output_grid is None:
        raise ValueError("model has no output grid; train it or load a checkpoint")
    raw = model.forward(z)[0]
    clamped = np.clip(raw, 0.0, model.clamp_max)
    return DepthProfile(grid_x=model.output_grid, depths=clamped)
