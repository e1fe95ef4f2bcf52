"""Minibatch SGD with momentum on the regularized cross-entropy loss.

Per update: v <- momentum * v - lr * (mean CE gradient + regularizer
gradient), params <- params + v. The CE gradient is averaged over the
minibatch while the regularizer gradient enters once at full strength.
Epoch shuffles come from a counter-based RNG keyed on (seed, epoch), so a
run is fully reproducible from its config.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import linalg
from .datasets import Dataset
from .errors import ShapeMismatchError, TrainingDiverged
from .network import GradientSet, MlpNetwork, forward_batch
from .regularization import Mode, RegularizerSpec, group_norms, regularizer_gradient, regularizer_value

DISPOSABLE_THRESHOLD = 1e-2  # group norm below this marks a node disposable


@dataclass
class TrainConfig:
    spec: RegularizerSpec
    epochs: int = 20
    batch_size: int = 128
    learning_rate: float = 0.1
    momentum: float = 0.9
    lr_decay: float = 1.0
    seed: int = 0
    beta_coupling: bool = False

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError(
                f"epochs and batch_size must be >= 1, got {self.epochs}, {self.batch_size}"
            )
        # zero is allowed so a no-op schedule stays expressible
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if not 0 < self.lr_decay <= 1:
            raise ValueError(f"lr_decay must be in (0, 1], got {self.lr_decay}")
        if self.beta_coupling:
            self.spec = replace(self.spec, beta=0.1 * self.spec.alpha)


@dataclass
class EpochReport:
    epoch: int
    train_loss: float
    train_accuracy: float
    val_accuracy: float
    disposable_per_layer: list[int] = field(default_factory=list)

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "epoch": self.epoch,
                "train_loss": self.train_loss,
                "train_acc": self.train_accuracy,
                "val_acc": self.val_accuracy,
                "disposable": self.disposable_per_layer,
            }
        )

    @classmethod
    def from_json_line(cls, line: str) -> "EpochReport":
        doc = json.loads(line)
        return cls(
            epoch=int(doc["epoch"]),
            train_loss=float(doc["train_loss"]),
            train_accuracy=float(doc["train_acc"]),
            val_accuracy=float(doc["val_acc"]),
            disposable_per_layer=[int(c) for c in doc["disposable"]],
        )


@dataclass
class TrainResult:
    best_network: MlpNetwork
    best_epoch: int
    history: list[EpochReport]


def load_history(path) -> list[EpochReport]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [EpochReport.from_json_line(line) for line in lines if line.strip()]


def disposable_counts(net: MlpNetwork, mode: Mode, threshold: float = DISPOSABLE_THRESHOLD) -> list[int]:
    """Hidden nodes per layer whose group norm falls below the threshold."""
    return [int(np.sum(norms < threshold)) for norms in group_norms(net, mode)]


def evaluate(net: MlpNetwork, dataset: Dataset, batch_size: int = 512) -> float:
    """Fraction of samples whose argmax logit matches the label."""
    if dataset.n == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    _check_shapes(net, dataset)
    hits = 0
    for start in range(0, dataset.n, batch_size):
        stop = min(start + batch_size, dataset.n)
        logits = forward_batch(net, dataset.features[start:stop])[-1]
        hits += int(np.sum(np.argmax(logits, axis=1) == dataset.labels[start:stop]))
    return hits / dataset.n


def mean_loss(net: MlpNetwork, dataset: Dataset, batch_size: int = 512) -> float:
    """Mean cross-entropy over a dataset (no regularizer term)."""
    total = 0.0
    for start in range(0, dataset.n, batch_size):
        stop = min(start + batch_size, dataset.n)
        logits = forward_batch(net, dataset.features[start:stop])[-1]
        total += float(np.sum(_batch_ce(logits, dataset.labels[start:stop])))
    return total / dataset.n


def _check_shapes(net: MlpNetwork, dataset: Dataset) -> None:
    if dataset.dim != net.layers[0].n_in:
        raise ShapeMismatchError(
            f"dataset dim {dataset.dim} does not match network input "
            f"{net.layers[0].n_in}"
        )
    if dataset.n and int(dataset.labels.max()) >= net.layers[-1].n_out:
        raise ShapeMismatchError(
            f"label {int(dataset.labels.max())} out of range for "
            f"{net.layers[-1].n_out} output nodes"
        )


def _batch_ce(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    return log_norm - shifted[np.arange(len(labels)), labels]


def _batch_gradients(
    net: MlpNetwork, xs: np.ndarray, labels: np.ndarray
) -> tuple[float, GradientSet]:
    """Mean CE loss and mean CE gradient over one minibatch."""
    zs = forward_batch(net, xs)
    losses = _batch_ce(zs[-1], labels)
    loss = float(losses.mean())
    n = len(labels)
    shifted = zs[-1] - zs[-1].max(axis=1, keepdims=True)
    probs = np.exp(shifted)
    probs /= probs.sum(axis=1, keepdims=True)
    delta = probs
    delta[np.arange(n), labels] -= 1.0
    delta /= n
    d_weights = [None] * net.num_layers
    d_biases = [None] * net.num_layers
    for l in range(net.num_layers - 1, -1, -1):
        d_weights[l] = delta.T @ zs[l]
        d_biases[l] = delta.sum(axis=0)
        if l > 0:
            z = zs[l]
            delta = (delta @ net.layers[l].weights) * z * (1.0 - z)
    return loss, GradientSet(d_weights, d_biases)


def _epoch_rng(seed: int, epoch: int) -> np.random.Generator:
    # Philox is counter-based; keying on (seed, epoch) decouples the
    # shuffle sequence from everything else in the run.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, epoch])))


def train(
    net: MlpNetwork,
    train_set: Dataset,
    val_set: Dataset,
    cfg: TrainConfig,
    log_path=None,
) -> TrainResult:
    """Run the full training schedule and return the best-validation snapshot.

    The input network is left untouched; training operates on a copy. When
    log_path is given, one EpochReport JSON line is appended per epoch.
    """
    _check_shapes(net, train_set)
    _check_shapes(net, val_set)
    net = net.copy()
    velocity = GradientSet.zeros_like(net)
    history: list[EpochReport] = []
    best_net = net.copy()
    best_epoch = 0
    best_val = -1.0
    lr = cfg.learning_rate
    log_file = open(log_path, "w", encoding="utf-8", newline="") if log_path else None
    try:
        for epoch in range(1, cfg.epochs + 1):
            perm = _epoch_rng(cfg.seed, epoch).permutation(train_set.n)
            for batch_no, start in enumerate(range(0, train_set.n, cfg.batch_size)):
                idx = perm[start : start + cfg.batch_size]
                loss, grads = _batch_gradients(
                    net, train_set.features[idx], train_set.labels[idx]
                )
                if not np.isfinite(loss):
                    raise TrainingDiverged(
                        f"non-finite loss at epoch {epoch}, batch {batch_no}"
                    )
                grads.add_(regularizer_gradient(net, cfg.spec))
                for l, p in enumerate(net.layers):
                    vw, vb = velocity.d_weights[l], velocity.d_biases[l]
                    vw *= cfg.momentum
                    vw -= lr * grads.d_weights[l]
                    vb *= cfg.momentum
                    vb -= lr * grads.d_biases[l]
                    p.weights += vw
                    p.bias += vb
            report = EpochReport(
                epoch=epoch,
                train_loss=mean_loss(net, train_set) + regularizer_value(net, cfg.spec),
                train_accuracy=evaluate(net, train_set),
                val_accuracy=evaluate(net, val_set),
                disposable_per_layer=(
                    disposable_counts(net, cfg.spec.mode) if cfg.spec.mode.grouped else []
                ),
            )
            history.append(report)
            if log_file:
                log_file.write(report.to_json_line() + "\n")
                log_file.flush()
            # >= so ties go to the latest epoch: with equal validation
            # accuracy the later snapshot has had more time to shrink
            # group norms, which is the model worth keeping.
            if report.val_accuracy >= best_val:
                best_val = report.val_accuracy
                best_epoch = epoch
                best_net = net.copy()
            lr *= cfg.lr_decay
    finally:
        if log_file:
            log_file.close()
    return TrainResult(best_network=best_net, best_epoch=best_epoch, history=history)
