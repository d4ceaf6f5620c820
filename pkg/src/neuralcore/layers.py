"""Affine layers and multilayer perceptrons with hand-derived backpropagation."""

from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

import numpy as np
from scipy.special import expit

from src.neuralcore.errors import MissingForwardError, ShapeMismatchError
from src.neuralcore.matrix import Matrix, Vector, as_matrix, ensure_finite

DEFAULT_LEAKY_SLOPE = 0.2


class RandomSource(Protocol):
    """Anything that can draw standard normal arrays."""

    def standard_normal(self, size: tuple[int, ...]) -> Matrix: ...


class Activation(str, Enum):
    """Elementwise activation applied after the affine map."""

    RELU = "relu"
    LEAKY_RELU = "leaky_relu"
    SIGMOID = "sigmoid"
    TANH = "tanh"
    IDENTITY = "identity"

    @property
    def relu_family(self) -> bool:
        return self in (Activation.RELU, Activation.LEAKY_RELU)


def _activate(kind: Activation, pre: Matrix, slope: float) -> Matrix:
    if kind is Activation.RELU:
        return np.maximum(pre, 0.0)
    if kind is Activation.LEAKY_RELU:
        return np.where(pre > 0.0, pre, slope * pre)
    if kind is Activation.SIGMOID:
        return expit(pre)
    if kind is Activation.TANH:
        return np.tanh(pre)
    return pre


def _activation_grad(kind: Activation, pre: Matrix, out: Matrix, slope: float) -> Matrix:
    """Derivative of the activation evaluated at the cached pre-activation."""
    if kind is Activation.RELU:
        return (pre > 0.0).astype(np.float64)
    if kind is Activation.LEAKY_RELU:
        return np.where(pre > 0.0, 1.0, slope)
    if kind is Activation.SIGMOID:
        return out * (1.0 - out)
    if kind is Activation.TANH:
        return 1.0 - out * out
    return np.ones_like(pre)


@dataclass
class AffineLayer:
    """y = act(x W^T + b) with gradient buffers and a single-use forward cache."""

    weight: Matrix
    bias: Vector
    activation: Activation = Activation.IDENTITY
    slope: float = DEFAULT_LEAKY_SLOPE
    weight_grad: Matrix = field(init=False)
    bias_grad: Vector = field(init=False)
    _input: Matrix | None = field(default=None, init=False, repr=False)
    _pre: Matrix | None = field(default=None, init=False, repr=False)
    _out: Matrix | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64).reshape(-1)
        if self.weight.ndim != 2 or self.weight.shape[0] != self.bias.shape[0]:
            raise ShapeMismatchError(
                f"weight {self.weight.shape} incompatible with bias {self.bias.shape}"
            )
        self.activation = Activation(self.activation)
        self.weight_grad = np.zeros_like(self.weight)
        self.bias_grad = np.zeros_like(self.bias)

    @property
    def in_features(self) -> int:
        return int(self.weight.shape[1])

    @property
    def out_features(self) -> int:
        return int(self.weight.shape[0])

    def predict(self, x: Matrix) -> Matrix:
        pre = x @ self.weight.T + self.bias
        return _activate(self.activation, pre, self.slope)

    def forward(self, x: Matrix) -> Matrix:
        pre = x @ self.weight.T + self.bias
        out = _activate(self.activation, pre, self.slope)
        self._input, self._pre, self._out = x, pre, out
        return out

    def backward(self, grad_out: Matrix, accumulate: bool = True) -> Matrix:
        if self._input is None or self._pre is None or self._out is None:
            raise MissingForwardError("backward called without a prior forward")
        if grad_out.shape != self._pre.shape:
            raise ShapeMismatchError(
                f"output gradient {grad_out.shape} does not match forward output {self._pre.shape}"
            )
        grad_pre = grad_out * _activation_grad(self.activation, self._pre, self._out, self.slope)
        if accumulate:
            self.weight_grad += grad_pre.T @ self._input
            self.bias_grad += grad_pre.sum(axis=0)
        grad_in = grad_pre @ self.weight
        self._input = self._pre = self._out = None
        return grad_in

    def zero_grad(self) -> None:
        self.weight_grad.fill(0.0)
        self.bias_grad.fill(0.0)


@dataclass
class Mlp:
    """Ordered stack of affine layers."""

    layers: list[AffineLayer]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ShapeMismatchError("an Mlp needs at least one layer")
        for k, (a, b) in enumerate(zip(self.layers, self.layers[1:])):
            if a.out_features != b.in_features:
                raise ShapeMismatchError(
                    f"layer {k} outputs {a.out_features} but layer {k + 1} expects {b.in_features}"
                )

    @property
    def in_features(self) -> int:
        return self.layers[0].in_features

    @property
    def out_features(self) -> int:
        return self.layers[-1].out_features

    @property
    def layer_sizes(self) -> list[int]:
        return [self.in_features] + [layer.out_features for layer in self.layers]

    def forward(self, x: Matrix) -> Matrix:
        """Evaluate the network and cache activations for the next backward."""
        h = as_matrix(x, cols=self.in_features, name="network input")
        for layer in self.layers:
            h = layer.forward(h)
        ensure_finite(h, "forward output")
        return h

    def predict(self, x: Matrix) -> Matrix:
        """Evaluate the network without touching the backward caches."""
        h = as_matrix(x, cols=self.in_features, name="network input")
        for layer in self.layers:
            h = layer.predict(h)
        ensure_finite(h, "forward output")
        return h

    def backward(self, output_grad: Matrix, accumulate: bool = True) -> Matrix:
        """Backpropagate ``output_grad``; returns the gradient w.r.t. the input.

        Parameter gradients are added to the layer buffers unless
        ``accumulate`` is False.
        """
        g = np.asarray(output_grad, dtype=np.float64)
        ensure_finite(g, "output gradient")
        for layer in reversed(self.layers):
            g = layer.backward(g, accumulate=accumulate)
        return g

    def zero_grad(self) -> None:
        for layer in self.layers:
            layer.zero_grad()

    def parameters(self) -> Iterator[tuple[Matrix, Matrix]]:
        """Yield (parameter, gradient) pairs in a fixed order."""
        for layer in self.layers:
            yield layer.weight, layer.weight_grad
            yield layer.bias, layer.bias_grad

    def parameter_count(self) -> int:
        return sum(p.size for p, _ in self.parameters())


def mlp_new(
    layer_sizes: Sequence[int],
    activations: Sequence[Activation | str],
    rng: RandomSource,
    *,
    slope: float = DEFAULT_LEAKY_SLOPE,
    init_scale: float = 1.0,
) -> Mlp:
    """Build an Mlp with He (ReLU family) or Xavier initial weights and zero biases."""
    if len(layer_sizes) < 2:
        raise ShapeMismatchError("layer_sizes needs at least an input and an output size")
    if len(activations) != len(layer_sizes) - 1:
        raise ShapeMismatchError(
            f"{len(layer_sizes) - 1} layers need as many activations, got {len(activations)}"
        )
    if any(int(size) <= 0 for size in layer_sizes):
        raise ShapeMismatchError(f"layer sizes must be positive: {list(layer_sizes)}")

    layers = []
    for fan_in, fan_out, act in zip(layer_sizes, layer_sizes[1:], activations):
        kind = Activation(act)
        variance = (2.0 if kind.relu_family else 1.0) / fan_in
        weight = init_scale * np.sqrt(variance) * rng.standard_normal((int(fan_out), int(fan_in)))
        layers.append(AffineLayer(weight, np.zeros(int(fan_out)), kind, slope))
    return Mlp(layers)


def forward(net: Mlp, x: Matrix) -> Matrix:
    return net.forward(x)


def backward(net: Mlp, output_grad: Matrix) -> Matrix:
    return net.backward(output_grad)
