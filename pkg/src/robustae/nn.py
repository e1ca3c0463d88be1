"""Fully-connected autoencoder with hand-written backprop and Adam updates.

One network class serves every learned transformation in the package: the
reconstruction autoencoders and the input/output-width-preserving smoothing
networks. Layers are symmetric around a bottleneck; the final layer is
linear so reconstructions are unbounded reals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NumericalError, ParameterError
from .linalg import make_rng

__all__ = [
    "AutoencoderConfig",
    "AutoencoderModel",
    "gradient_check",
    "default_layer_dims",
]


def _tanh(z):
    return np.tanh(z)


def _tanh_grad(z, a):
    return 1.0 - a * a


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _sigmoid_grad(z, a):
    return a * (1.0 - a)


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z, a):
    return (z > 0.0).astype(np.float64)


def _linear(z):
    return z


def _linear_grad(z, a):
    return np.ones_like(z)


_ACTIVATIONS = {
    "tanh": (_tanh, _tanh_grad),
    "sigmoid": (_sigmoid, _sigmoid_grad),
    "relu": (_relu, _relu_grad),
    "linear": (_linear, _linear_grad),
}

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def default_layer_dims(input_dim: int) -> tuple[int, ...]:
    """Symmetric three-hidden-layer shape with a quarter-width bottleneck."""
    wide = max(3, round(0.75 * input_dim))
    narrow = max(2, round(0.25 * input_dim))
    return (wide, narrow, wide)


@dataclass(frozen=True)
class AutoencoderConfig:
    """Shape and training hyperparameters of one network.

    ``layer_dims`` lists the hidden widths from first to last; the middle
    entry is the bottleneck and must be narrower than ``input_dim``.
    ``inner_epochs`` is the number of full-batch gradient steps taken per
    alternation step of the surrounding trainers.
    """

    input_dim: int
    layer_dims: tuple[int, ...]
    activation: str = "tanh"
    learning_rate: float = 1e-3
    inner_epochs: int = 20
    weight_init_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "layer_dims", tuple(int(d) for d in self.layer_dims))
        if self.input_dim < 1:
            raise ParameterError(f"input_dim must be positive, got {self.input_dim}")
        if not self.layer_dims:
            raise ParameterError("layer_dims must be nonempty")
        if any(d < 1 for d in self.layer_dims):
            raise ParameterError(f"layer widths must be positive, got {self.layer_dims}")
        if self.activation not in _ACTIVATIONS:
            raise ParameterError(
                f"activation must be one of {sorted(_ACTIVATIONS)}, got {self.activation!r}"
            )
        if not self.learning_rate > 0:
            raise ParameterError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.inner_epochs < 1:
            raise ParameterError(f"inner_epochs must be >= 1, got {self.inner_epochs}")
        if not self.weight_init_scale > 0:
            raise ParameterError(
                f"weight_init_scale must be positive, got {self.weight_init_scale}"
            )
        if self.bottleneck_dim >= self.input_dim:
            raise ParameterError(
                f"bottleneck width {self.bottleneck_dim} must be smaller than "
                f"input_dim {self.input_dim}"
            )

    @property
    def bottleneck_dim(self) -> int:
        return self.layer_dims[(len(self.layer_dims) - 1) // 2]

    @property
    def all_dims(self) -> tuple[int, ...]:
        return (self.input_dim, *self.layer_dims, self.input_dim)


@dataclass
class AutoencoderModel:
    """Network parameters plus Adam state; built from a config.

    Weights are stored per layer as (fan_in, fan_out) matrices applied to
    row-sample batches. Hidden layers use the configured activation, the
    output layer is linear.
    """

    config: AutoencoderConfig
    weights: list[np.ndarray] = field(default_factory=list, repr=False)
    biases: list[np.ndarray] = field(default_factory=list, repr=False)
    _m_w: list[np.ndarray] = field(default_factory=list, repr=False)
    _v_w: list[np.ndarray] = field(default_factory=list, repr=False)
    _m_b: list[np.ndarray] = field(default_factory=list, repr=False)
    _v_b: list[np.ndarray] = field(default_factory=list, repr=False)
    step_count: int = 0

    def __post_init__(self):
        dims = self.config.all_dims
        if not self.weights:
            rng = make_rng(self.config.seed)
            for fan_in, fan_out in zip(dims[:-1], dims[1:]):
                s = self.config.weight_init_scale / np.sqrt(fan_in)
                self.weights.append(rng.uniform(-s, s, size=(fan_in, fan_out)))
                self.biases.append(np.zeros(fan_out))
        else:
            expected = list(zip(dims[:-1], dims[1:]))
            got = [w.shape for w in self.weights]
            if got != expected:
                raise DimensionError(f"weight shapes {got} do not chain as {expected}")
        if not self._m_w:
            self._m_w = [np.zeros_like(w) for w in self.weights]
            self._v_w = [np.zeros_like(w) for w in self.weights]
            self._m_b = [np.zeros_like(b) for b in self.biases]
            self._v_b = [np.zeros_like(b) for b in self.biases]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def _check_batch(self, batch: np.ndarray) -> np.ndarray:
        batch = np.asarray(batch, dtype=np.float64)
        if batch.ndim != 2 or batch.shape[1] != self.config.input_dim:
            raise DimensionError(
                f"batch must be (n, {self.config.input_dim}), got {batch.shape}"
            )
        return batch

    def _forward_cached(self, batch: np.ndarray):
        act, _ = _ACTIVATIONS[self.config.activation]
        pre = []
        activations = [batch]
        a = batch
        last = self.n_layers - 1
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            pre.append(z)
            a = z if layer == last else act(z)
            activations.append(a)
        return pre, activations

    def forward(self, batch) -> np.ndarray:
        """Reconstruct a batch of row samples (n, input_dim) -> (n, input_dim)."""
        batch = self._check_batch(batch)
        _, activations = self._forward_cached(batch)
        out = activations[-1]
        if not np.all(np.isfinite(out)):
            raise NumericalError("forward pass produced non-finite values")
        return out

    def loss(self, batch, target) -> float:
        """Mean squared reconstruction error of the current parameters."""
        batch = self._check_batch(batch)
        target = self._check_batch(target)
        d = self.forward(batch) - target
        return float(np.mean(d * d))

    def gradients(self, batch, target):
        """Mean-squared-error gradients for every weight and bias."""
        batch = self._check_batch(batch)
        target = self._check_batch(target)
        if batch.shape != target.shape:
            raise DimensionError(
                f"batch shape {batch.shape} != target shape {target.shape}"
            )
        _, grad_fn = _ACTIVATIONS[self.config.activation]
        pre, activations = self._forward_cached(batch)
        out = activations[-1]
        loss = float(np.mean((out - target) ** 2))
        delta = 2.0 * (out - target) / out.size
        grads_w = [None] * self.n_layers
        grads_b = [None] * self.n_layers
        for layer in range(self.n_layers - 1, -1, -1):
            grads_w[layer] = activations[layer].T @ delta
            grads_b[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ self.weights[layer].T) * grad_fn(
                    pre[layer - 1], activations[layer]
                )
        return loss, grads_w, grads_b

    def train_step(self, batch, target) -> float:
        """One full-batch Adam step toward ``target``; returns the pre-step loss."""
        loss, grads_w, grads_b = self.gradients(batch, target)
        for g in grads_w + grads_b:
            if not np.all(np.isfinite(g)):
                raise NumericalError("non-finite gradient; reduce the learning rate")
        self.step_count += 1
        t = self.step_count
        lr = self.config.learning_rate
        corr1 = 1.0 - ADAM_BETA1**t
        corr2 = 1.0 - ADAM_BETA2**t
        for i in range(self.n_layers):
            for param, grad, m, v in (
                (self.weights[i], grads_w[i], self._m_w[i], self._v_w[i]),
                (self.biases[i], grads_b[i], self._m_b[i], self._v_b[i]),
            ):
                m *= ADAM_BETA1
                m += (1.0 - ADAM_BETA1) * grad
                v *= ADAM_BETA2
                v += (1.0 - ADAM_BETA2) * grad * grad
                param -= lr * (m / corr1) / (np.sqrt(v / corr2) + ADAM_EPS)
        for p in self.weights + self.biases:
            if not np.all(np.isfinite(p)):
                raise NumericalError("parameters became non-finite during update")
        return loss

    def train(self, batch, target, steps: int | None = None) -> list[float]:
        """Run ``steps`` (default config.inner_epochs) full-batch Adam steps."""
        steps = self.config.inner_epochs if steps is None else int(steps)
        return [self.train_step(batch, target) for _ in range(steps)]


def gradient_check(model: AutoencoderModel, batch, target, h: float = 1e-5) -> float:
    """Max relative error of analytic vs central-difference gradients.

    Perturbs every weight and bias entry by +-h; 0/0 comparisons count
    as zero error.
    """
    if not 1e-7 <= h <= 1e-3:
        raise ParameterError(f"step h must lie in [1e-7, 1e-3], got {h}")
    _, grads_w, grads_b = model.gradients(batch, target)
    params = list(model.weights) + list(model.biases)
    grads = list(grads_w) + list(grads_b)
    # entries far below the dominant gradient are compared against that
    # scale, so central-difference rounding noise on near-zero entries does
    # not register as error
    gscale = max((float(np.max(np.abs(g))) for g in grads), default=0.0)
    floor = 1e-3 * gscale
    worst = 0.0
    for param, grad in zip(params, grads):
        flat = param.ravel()
        gflat = grad.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = model.loss(batch, target)
            flat[i] = orig - h
            down = model.loss(batch, target)
            flat[i] = orig
            numeric = (up - down) / (2.0 * h)
            denom = max(abs(numeric), abs(gflat[i]), floor)
            if denom > 0.0:
                worst = max(worst, abs(numeric - gflat[i]) / denom)
    return worst
