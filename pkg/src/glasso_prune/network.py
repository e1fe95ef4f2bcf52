"""Sigmoid MLP with a linear logit layer: parameters, forward pass, backprop.

Layer l of the network maps z^(l-1) to a^l = W^l z^(l-1) + b^l. Hidden
layers apply the logistic sigmoid, the last layer emits raw logits and the
cross-entropy loss applies softmax. Layer indices follow the convention
that layers[0] holds W^1/b^1 (input -> first hidden).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ShapeMismatchError


@dataclass
class LayerParams:
    weights: np.ndarray  # (n_out, n_in)
    bias: np.ndarray  # (n_out,)

    def __post_init__(self):
        self.weights = linalg.as_matrix(self.weights)
        self.bias = linalg.as_vector(self.bias)
        if self.weights.shape[0] != self.bias.shape[0]:
            raise ShapeMismatchError(
                f"layer weights {self.weights.shape} do not match "
                f"bias length {self.bias.shape[0]}"
            )

    @property
    def n_out(self) -> int:
        return self.weights.shape[0]

    @property
    def n_in(self) -> int:
        return self.weights.shape[1]

    def copy(self) -> "LayerParams":
        return LayerParams(self.weights.copy(), self.bias.copy())


@dataclass
class MlpNetwork:
    layers: list[LayerParams]

    def __post_init__(self):
        if len(self.layers) < 2:
            raise ShapeMismatchError(
                f"network needs at least 2 layers (one hidden), got {len(self.layers)}"
            )
        for l in range(1, len(self.layers)):
            lo, hi = self.layers[l - 1], self.layers[l]
            if hi.n_in != lo.n_out:
                raise ShapeMismatchError(
                    f"layer {l + 1} expects input of size {hi.n_in} but "
                    f"layer {l} produces {lo.n_out}"
                )

    @property
    def num_layers(self) -> int:
        """L: the number of weight layers (hidden layers plus the output)."""
        return len(self.layers)

    @property
    def layer_sizes(self) -> list[int]:
        """Node counts N_0 .. N_L, input layer included."""
        return [self.layers[0].n_in] + [p.n_out for p in self.layers]

    @property
    def hidden_sizes(self) -> list[int]:
        return [p.n_out for p in self.layers[:-1]]

    def copy(self) -> "MlpNetwork":
        return MlpNetwork([p.copy() for p in self.layers])


@dataclass
class ForwardTrace:
    """Per-layer values kept for backpropagation.

    outputs[0] is the input vector, outputs[l] is z^l for hidden layers and
    the raw logits for l == L. activations[l-1] is a^l.
    """

    activations: list[np.ndarray]
    outputs: list[np.ndarray]

    @property
    def logits(self) -> np.ndarray:
        return self.outputs[-1]


@dataclass
class GradientSet:
    """Per-layer parameter gradients, shape-mirroring a network."""

    d_weights: list[np.ndarray]
    d_biases: list[np.ndarray]

    @classmethod
    def zeros_like(cls, net: MlpNetwork) -> "GradientSet":
        return cls(
            [np.zeros_like(p.weights) for p in net.layers],
            [np.zeros_like(p.bias) for p in net.layers],
        )

    def add_(self, other: "GradientSet") -> "GradientSet":
        """In-place accumulation; returns self."""
        for dw, ow in zip(self.d_weights, other.d_weights):
            dw += ow
        for db, ob in zip(self.d_biases, other.d_biases):
            db += ob
        return self


def init_network(layer_sizes: list[int], seed: int) -> MlpNetwork:
    """Seeded uniform initialization, scale sqrt(6 / (n_in + n_out)).

    Biases start at zero. Two calls with the same sizes and seed produce
    bitwise-identical networks.
    """
    if len(layer_sizes) < 3:
        raise ValueError(
            f"need at least [input, hidden, output] sizes, got {layer_sizes}"
        )
    if any(n < 1 for n in layer_sizes):
        raise ValueError(f"all layer sizes must be >= 1, got {layer_sizes}")
    rng = np.random.default_rng(seed)
    layers = []
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        s = np.sqrt(6.0 / (n_in + n_out))
        weights = rng.uniform(-s, s, size=(n_out, n_in))
        layers.append(LayerParams(weights, np.zeros(n_out)))
    return MlpNetwork(layers)


def forward(net: MlpNetwork, x: np.ndarray) -> ForwardTrace:
    """Run one input through the network, keeping all intermediates."""
    x = linalg.as_vector(x)
    if x.shape[0] != net.layers[0].n_in:
        raise ShapeMismatchError(
            f"input has dim {x.shape[0]}, network expects {net.layers[0].n_in}"
        )
    activations = []
    outputs = [x]
    z = x
    last = net.num_layers - 1
    for l, p in enumerate(net.layers):
        a = linalg.matvec(p.weights, z) + p.bias
        activations.append(a)
        z = a if l == last else linalg.sigmoid(a)
        outputs.append(z)
    return ForwardTrace(activations, outputs)


def forward_batch(net: MlpNetwork, xs: np.ndarray) -> list[np.ndarray]:
    """Forward pass over a (n, dim) batch.

    Returns [Z^0 .. Z^L] where row i of Z^l corresponds to sample i; the
    last entry holds raw logits.
    """
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != net.layers[0].n_in:
        raise ShapeMismatchError(
            f"batch shape {xs.shape} does not match input dim {net.layers[0].n_in}"
        )
    zs = [xs]
    last = net.num_layers - 1
    for l, p in enumerate(net.layers):
        a = zs[-1] @ p.weights.T + p.bias
        zs.append(a if l == last else linalg.sigmoid(a))
    return zs


def predict(net: MlpNetwork, x: np.ndarray) -> int:
    """Class with the highest logit; ties go to the lowest index."""
    return int(np.argmax(forward(net, x).logits))


def backward(net: MlpNetwork, trace: ForwardTrace, target: int) -> GradientSet:
    """Gradients of the softmax cross-entropy loss for one sample."""
    n_out = net.layers[-1].n_out
    if not 0 <= target < n_out:
        raise IndexError(f"target {target} out of range for {n_out} classes")
    d_weights = [None] * net.num_layers
    d_biases = [None] * net.num_layers
    _, delta = linalg.softmax_cross_entropy(trace.logits, target)
    for l in range(net.num_layers - 1, -1, -1):
        d_weights[l] = np.outer(delta, trace.outputs[l])
        d_biases[l] = delta
        if l > 0:
            z = trace.outputs[l]
            delta = (net.layers[l].weights.T @ delta) * z * (1.0 - z)
    return GradientSet(d_weights, d_biases)
