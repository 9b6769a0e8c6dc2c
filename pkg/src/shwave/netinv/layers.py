"""Network layers with forward passes and exact reverse-mode gradients.

Every layer consumes and produces float64 arrays whose leading axis is the
batch.  ``forward`` caches whatever ``backward`` needs; ``backward`` takes
the gradient with respect to the layer output, accumulates parameter
gradients into ``.grads``, and returns the gradient with respect to the
layer input.  Parameter gradients are overwritten (not summed) on each
backward call.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Dense", "ReLU", "Reshape", "Conv1D"]


class Layer:
    """Common interface; stateless layers keep empty param dicts."""

    def __init__(self):
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class Dense(Layer):
    """Affine map y = x W + b with W of shape (n_in, n_out)."""

    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator | None = None):
        super().__init__()
        self.n_in = n_in
        self.n_out = n_out
        limit = np.sqrt(6.0 / (n_in + n_out))
        if rng is None:
            weight = np.zeros((n_in, n_out))
        else:
            weight = rng.uniform(-limit, limit, size=(n_in, n_out))
        self.params = {"W": weight, "b": np.zeros(n_out)}
        self.grads = {"W": np.zeros_like(weight), "b": np.zeros(n_out)}

    def forward(self, x):
        if x.ndim != 2 or x.shape[1] != self.n_in:
            raise ValueError(f"dense layer expects (batch, {self.n_in}), got {x.shape}")
        self._cache = x
        return x @ self.params["W"] + self.params["b"]

    def backward(self, grad_out):
        x = self._cache
        self.grads["W"] = x.T @ grad_out
        self.grads["b"] = grad_out.sum(axis=0)
        return grad_out @ self.params["W"].T

    def describe(self):
        return {"kind": "dense", "n_in": self.n_in, "n_out": self.n_out}


class ReLU(Layer):
    """Elementwise max(x, 0)."""

    def forward(self, x):
        self._cache = x > 0
        return np.where(self._cache, x, 0.0)

    def backward(self, grad_out):
        return np.where(self._cache, grad_out, 0.0)

    def describe(self):
        return {"kind": "relu"}


class Reshape(Layer):
    """Reshape the per-sample trailing axes; the batch axis is untouched."""

    def __init__(self, shape: tuple[int, ...]):
        super().__init__()
        self.shape = tuple(int(s) for s in shape)

    def forward(self, x):
        self._cache = x.shape
        return x.reshape((x.shape[0],) + self.shape)

    def backward(self, grad_out):
        return grad_out.reshape(self._cache)

    def describe(self):
        return {"kind": "reshape", "shape": list(self.shape)}


class Conv1D(Layer):
    """1-D convolution, stride 1, zero padding preserving the length.

    Input (batch, c_in, length) -> output (batch, c_out, length).  The kernel
    width must be odd so "same" padding is symmetric.  Implemented as a
    gather into column form followed by one batched matrix product.
    """

    def __init__(self, c_in: int, c_out: int, kernel: int, rng: np.random.Generator | None = None):
        super().__init__()
        if kernel % 2 != 1:
            raise ValueError("kernel width must be odd")
        self.c_in = c_in
        self.c_out = c_out
        self.kernel = kernel
        fan_in = c_in * kernel
        fan_out = c_out * kernel
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        if rng is None:
            weight = np.zeros((c_out, c_in, kernel))
        else:
            weight = rng.uniform(-limit, limit, size=(c_out, c_in, kernel))
        self.params = {"W": weight, "b": np.zeros(c_out)}
        self.grads = {"W": np.zeros_like(weight), "b": np.zeros(c_out)}

    def _columns(self, padded: np.ndarray, length: int) -> np.ndarray:
        # (batch, c_in, kernel, length) view of all sliding windows
        return np.stack([padded[:, :, i : i + length] for i in range(self.kernel)], axis=2)

    def forward(self, x):
        if x.ndim != 3 or x.shape[1] != self.c_in:
            raise ValueError(f"conv1d expects (batch, {self.c_in}, length), got {x.shape}")
        batch, _, length = x.shape
        pad = self.kernel // 2
        padded = np.pad(x, ((0, 0), (0, 0), (pad, pad)))
        cols = self._columns(padded, length).reshape(batch, self.c_in * self.kernel, length)
        self._cache = (cols, x.shape)
        w = self.params["W"].reshape(self.c_out, self.c_in * self.kernel)
        return w @ cols + self.params["b"][None, :, None]

    def backward(self, grad_out):
        cols, x_shape = self._cache
        batch, _, length = x_shape
        pad = self.kernel // 2
        w = self.params["W"].reshape(self.c_out, self.c_in * self.kernel)
        self.grads["W"] = np.einsum("bol,bkl->ok", grad_out, cols).reshape(self.params["W"].shape)
        self.grads["b"] = grad_out.sum(axis=(0, 2))
        grad_cols = (w.T @ grad_out).reshape(batch, self.c_in, self.kernel, length)
        grad_padded = np.zeros((batch, self.c_in, length + 2 * pad))
        for i in range(self.kernel):
            grad_padded[:, :, i : i + length] += grad_cols[:, :, i, :]
        return grad_padded[:, :, pad : pad + length]

    def describe(self):
        return {"kind": "conv1d", "c_in": self.c_in, "c_out": self.c_out, "kernel": self.kernel}
