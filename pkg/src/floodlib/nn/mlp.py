"""Dense ReLU network with an explicit forward/backward contract.

Weights are stored as (d_in, d_out) matrices so a batch ``X`` of shape
(B, d_in) maps to ``X @ W + b``. Classification heads apply a softmax;
regression heads are the identity with a single output unit.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.special import log_softmax, softmax

from ..errors import ConfigError, NumericError, ShapeError
from ..seeding import make_rng

Head = Literal["softmax", "identity"]


@dataclass
class MlpModel:
    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    head: Head
    seed: int = 0

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    def num_parameters(self) -> int:
        return sum((d_in + 1) * d_out for d_in, d_out in zip(self.layer_dims[:-1], self.layer_dims[1:]))

    def copy(self) -> "MlpModel":
        return copy.deepcopy(self)

    def flat_parameters(self) -> np.ndarray:
        """All parameters, layer by layer (weights row-major, then biases)."""
        parts: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts) if parts else np.zeros(0)

    def set_flat_parameters(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != self.num_parameters():
            raise ShapeError(f"expected {self.num_parameters()} parameters, got {flat.size}")
        offset = 0
        for layer, (d_in, d_out) in enumerate(zip(self.layer_dims[:-1], self.layer_dims[1:])):
            self.weights[layer] = flat[offset:offset + d_in * d_out].reshape(d_in, d_out).copy()
            offset += d_in * d_out
            self.biases[layer] = flat[offset:offset + d_out].copy()
            offset += d_out


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def flat(self) -> np.ndarray:
        parts: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts)


@dataclass
class ForwardCache:
    inputs: list[np.ndarray] = field(default_factory=list)
    pre_activations: list[np.ndarray] = field(default_factory=list)
    output: Optional[np.ndarray] = None
    logits: Optional[np.ndarray] = None


def init_layer(d_in: int, d_out: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """He-style uniform fan-in initialization; biases start at zero."""
    limit = np.sqrt(6.0 / d_in)
    return rng.uniform(-limit, limit, size=(d_in, d_out)), np.zeros(d_out)


def init_mlp(layer_dims: Sequence[int], head: Head, seed: int) -> MlpModel:
    dims = [int(d) for d in layer_dims]
    if len(dims) < 2 or any(d <= 0 for d in dims):
        raise ConfigError(f"layer_dims must list at least input and output sizes, all positive: {dims}")
    if head == "identity" and dims[-1] != 1:
        raise ConfigError("regression models have a single output unit")
    rng = make_rng(seed, 0)
    weights, biases = [], []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        w, b = init_layer(d_in, d_out, rng)
        weights.append(w)
        biases.append(b)
    return MlpModel(layer_dims=dims, weights=weights, biases=biases, head=head, seed=seed)


def _check_batch(model: MlpModel, batch: np.ndarray) -> np.ndarray:
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise ShapeError(f"batch has shape {x.shape}, model expects (*, {model.input_dim})")
    return x


def _forward_cached(model: MlpModel, x: np.ndarray) -> ForwardCache:
    cache = ForwardCache()
    a = x
    last = model.num_layers - 1
    for layer, (w, b) in enumerate(zip(model.weights, model.biases)):
        cache.inputs.append(a)
        z = a @ w + b
        cache.pre_activations.append(z)
        a = np.maximum(z, 0.0) if layer < last else z
    if model.head == "softmax":
        cache.logits = a
        cache.output = softmax(a, axis=1)
    else:
        cache.output = a
    return cache


def forward(model: MlpModel, batch: np.ndarray) -> np.ndarray:
    """Evaluate the network: (B, K) probabilities or (B, 1) predictions."""
    return _forward_cached(model, _check_batch(model, batch)).output


def hidden_features(model: MlpModel, batch: np.ndarray, upto: int) -> np.ndarray:
    """Post-ReLU activations feeding layer ``upto`` (0 returns the inputs)."""
    a = _check_batch(model, batch)
    for w, b in zip(model.weights[:upto], model.biases[:upto]):
        a = np.maximum(a @ w + b, 0.0)
    return a


def _per_sample_from_cache(model: MlpModel, cache: ForwardCache, labels: np.ndarray) -> np.ndarray:
    if model.head == "softmax":
        idx = np.asarray(labels, dtype=np.int64)
        logp = log_softmax(cache.logits, axis=1)
        return -logp[np.arange(idx.size), idx]
    preds = cache.output[:, 0]
    return (preds - np.asarray(labels, dtype=np.float64)) ** 2


def per_sample_loss(model: MlpModel, batch: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Cross-entropy (classification) or squared error (regression) per sample."""
    x = _check_batch(model, batch)
    if len(labels) != x.shape[0]:
        raise ShapeError(f"{x.shape[0]} rows but {len(labels)} labels")
    return _per_sample_from_cache(model, _forward_cached(model, x), labels)


def l2_penalty(model: MlpModel, l2_weight: float) -> float:
    """(l2_weight / 2) * sum of squared weights; biases are not penalized."""
    if l2_weight == 0.0:
        return 0.0
    return 0.5 * l2_weight * float(sum(np.sum(w * w) for w in model.weights))


def loss_and_backward(
    model: MlpModel,
    batch: np.ndarray,
    labels: np.ndarray,
    upstream_fn,
    *,
    l2_weight: float = 0.0,
) -> tuple[np.ndarray, float, np.ndarray, Gradients]:
    """One forward pass, objective evaluation, and backward pass.

    ``upstream_fn(losses) -> (objective, upstream)`` lets the objective see the
    per-sample losses before gradients are formed, so training needs a single
    forward pass per mini-batch.
    """
    x = _check_batch(model, batch)
    cache = _forward_cached(model, x)
    losses = _per_sample_from_cache(model, cache, labels)
    objective, upstream = upstream_fn(losses)
    grads = _backward_from_cache(model, cache, labels, upstream, l2_weight=l2_weight)
    return losses, float(objective), np.asarray(upstream), grads


def backward(
    model: MlpModel,
    batch: np.ndarray,
    labels: np.ndarray,
    per_sample_upstream: np.ndarray,
    *,
    l2_weight: float = 0.0,
) -> Gradients:
    """Gradients of sum_i upstream_i * loss_i (+ L2 penalty) w.r.t. all parameters."""
    x = _check_batch(model, batch)
    if len(labels) != x.shape[0]:
        raise ShapeError(f"{x.shape[0]} rows but {len(labels)} labels")
    cache = _forward_cached(model, x)
    return _backward_from_cache(model, cache, labels, per_sample_upstream, l2_weight=l2_weight)


def _backward_from_cache(
    model: MlpModel,
    cache: ForwardCache,
    labels: np.ndarray,
    per_sample_upstream: np.ndarray,
    *,
    l2_weight: float,
) -> Gradients:
    up = np.asarray(per_sample_upstream, dtype=np.float64).reshape(-1)
    n = cache.output.shape[0]
    if up.size != n:
        raise ShapeError(f"upstream has {up.size} entries for a batch of {n}")
    if not np.all(np.isfinite(up)):
        raise NumericError("non-finite upstream gradient")

    if model.head == "softmax":
        delta = cache.output.copy()
        delta[np.arange(n), np.asarray(labels, dtype=np.int64)] -= 1.0
        delta *= up[:, None]
    else:
        residual = cache.output[:, 0] - np.asarray(labels, dtype=np.float64)
        delta = (2.0 * residual * up)[:, None]

    grad_w = [np.zeros_like(w) for w in model.weights]
    grad_b = [np.zeros_like(b) for b in model.biases]
    for layer in range(model.num_layers - 1, -1, -1):
        grad_w[layer] = cache.inputs[layer].T @ delta
        grad_b[layer] = delta.sum(axis=0)
        if l2_weight:
            grad_w[layer] = grad_w[layer] + l2_weight * model.weights[layer]
        if layer > 0:
            delta = (delta @ model.weights[layer].T) * (cache.pre_activations[layer - 1] > 0)
    return Gradients(weights=grad_w, biases=grad_b)
