"""Group-lasso and L2 penalty terms and their gradients.

Three configurations:

  GLASSO_OUT  group norm of hidden node j in layer l is the Euclidean norm
              of column j of W^(l+1) (its outgoing weights); the group
              penalty spans W^2..W^L and the input weights W^1 plus all
              biases get a plain L2 term.
  GLASSO_IN   the group is row j of W^l (incoming weights); the penalty
              spans W^1..W^(L-1) and the L2 term covers W^L plus biases.
  L2_ALL      no grouping, L2 on every weight matrix and bias vector.

The group penalty per node is alpha * ||w||, so its gradient is the unit
vector alpha * w / ||w||: a constant-magnitude pull that drives unneeded
groups to near-zero norm during training. At exactly zero norm the pull is
defined as zero (subgradient choice, guarded by epsilon_norm).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .linalg import column_norms, row_norms
from .network import GradientSet, MlpNetwork


class Mode(enum.Enum):
    GLASSO_OUT = "glasso_out"
    GLASSO_IN = "glasso_in"
    L2_ALL = "l2"

    @classmethod
    def from_string(cls, name: str) -> "Mode":
        for mode in cls:
            if mode.value == name:
                return mode
        raise ValueError(
            f"unknown mode {name!r}, expected one of "
            f"{[m.value for m in cls]}"
        )

    @property
    def grouped(self) -> bool:
        return self is not Mode.L2_ALL


@dataclass(frozen=True)
class RegularizerSpec:
    mode: Mode
    alpha: float = 0.0
    beta: float = 0.0
    epsilon_norm: float = 1e-12

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError(
                f"alpha and beta must be nonnegative, got {self.alpha}, {self.beta}"
            )
        if self.epsilon_norm <= 0:
            raise ValueError(f"epsilon_norm must be positive, got {self.epsilon_norm}")
        if self.mode is Mode.L2_ALL and self.alpha != 0:
            raise ValueError("alpha must be 0 in L2_ALL mode (no grouped penalty)")


def group_norms(net: MlpNetwork, mode: Mode) -> list[np.ndarray]:
    """Per-hidden-layer group norms, one entry per node of layers 1..L-1."""
    if not mode.grouped:
        raise ValueError("group norms are undefined for L2_ALL (no grouping)")
    big_l = net.num_layers
    if mode is Mode.GLASSO_OUT:
        # hidden layer l's nodes own the columns of W^(l+1) = layers[l]
        return [column_norms(net.layers[l].weights) for l in range(1, big_l)]
    # hidden layer l's nodes own the rows of W^l = layers[l-1]
    return [row_norms(net.layers[l - 1].weights) for l in range(1, big_l)]


def regularizer_value(net: MlpNetwork, spec: RegularizerSpec) -> float:
    """Total penalty: alpha * sum of group norms + beta * L2 terms."""
    l2 = 0.0
    glasso = 0.0
    if spec.mode is Mode.L2_ALL:
        for p in net.layers:
            l2 += 0.5 * float(np.sum(p.weights**2)) + 0.5 * float(np.sum(p.bias**2))
    else:
        for norms in group_norms(net, spec.mode):
            glasso += float(np.sum(norms))
        ungrouped = net.layers[0] if spec.mode is Mode.GLASSO_OUT else net.layers[-1]
        l2 += 0.5 * float(np.sum(ungrouped.weights**2))
        for p in net.layers:
            l2 += 0.5 * float(np.sum(p.bias**2))
    return spec.alpha * glasso + spec.beta * l2


def regularizer_gradient(net: MlpNetwork, spec: RegularizerSpec) -> GradientSet:
    """Gradient of regularizer_value with the safeguarded group term.

    Each grouped vector contributes alpha * w / max(||w||, epsilon_norm),
    which is exactly zero for an exactly-zero group.
    """
    grad = GradientSet.zeros_like(net)
    big_l = net.num_layers
    if spec.mode is Mode.L2_ALL:
        for l, p in enumerate(net.layers):
            grad.d_weights[l] += spec.beta * p.weights
    else:
        if spec.mode is Mode.GLASSO_OUT:
            for l in range(1, big_l):
                w = net.layers[l].weights
                scale = spec.alpha / np.maximum(column_norms(w), spec.epsilon_norm)
                grad.d_weights[l] += w * scale[np.newaxis, :]
            grad.d_weights[0] += spec.beta * net.layers[0].weights
        else:
            for l in range(1, big_l):
                w = net.layers[l - 1].weights
                scale = spec.alpha / np.maximum(row_norms(w), spec.epsilon_norm)
                grad.d_weights[l - 1] += w * scale[:, np.newaxis]
            grad.d_weights[-1] += spec.beta * net.layers[-1].weights
    for l, p in enumerate(net.layers):
        grad.d_biases[l] += spec.beta * p.bias
    return grad
