"""Experiment configuration: a flat, typed key=value file or JSON object.

Grammar: one `key = value` pair per line; blank lines and lines starting
with '#' are skipped. Lists (layer_sizes, split_fractions) are comma
separated. A file whose first non-space character is '{' is parsed as a
JSON object with the same keys instead. Unknown keys are rejected, and all
nested invariants are checked at parse time so a bad config never reaches
the trainer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import json

from .datasets import Dataset, load_csv, load_idx, split, synth_gaussians
from .errors import ConfigError
from .regularization import Mode, RegularizerSpec
from .trainer import TrainConfig


def _to_bool(s):
    if isinstance(s, bool):
        return s
    if s in ("true", "1", "yes"):
        return True
    if s in ("false", "0", "no"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _to_int_list(s):
    if isinstance(s, list):
        return [int(x) for x in s]
    return [int(x) for x in s.split(",") if x.strip()]


def _to_float_list(s):
    if isinstance(s, list):
        return [float(x) for x in s]
    return [float(x) for x in s.split(",") if x.strip()]


_CONVERTERS = {
    "dataset": str,
    "synth_classes": int,
    "synth_dim": int,
    "synth_per_class": int,
    "synth_separation": float,
    "idx_images": str,
    "idx_labels": str,
    "standardize": _to_bool,
    "csv_path": str,
    "csv_label_column": str,
    "data_seed": int,
    "split_fractions": _to_float_list,
    "layer_sizes": _to_int_list,
    "mode": str,
    "alpha": float,
    "beta": float,
    "beta_coupling": _to_bool,
    "epsilon_norm": float,
    "epochs": int,
    "batch_size": int,
    "learning_rate": float,
    "momentum": float,
    "lr_decay": float,
    "seed": int,
    "theta": float,
    "output_dir": str,
    "emit_history": _to_bool,
    "emit_model": _to_bool,
    "emit_bundle": _to_bool,
}


@dataclass
class ExperimentConfig:
    dataset: str
    layer_sizes: list[int]
    mode: str
    synth_classes: int = 10
    synth_dim: int = 64
    synth_per_class: int = 300
    synth_separation: float = 4.0
    idx_images: str = ""
    idx_labels: str = ""
    standardize: bool = False
    csv_path: str = ""
    csv_label_column: str = ""
    data_seed: int = 42
    split_fractions: list[float] = field(default_factory=lambda: [0.8, 0.1, 0.1])
    alpha: float = 0.0
    beta: float = 0.0
    beta_coupling: bool = False
    epsilon_norm: float = 1e-12
    epochs: int = 20
    batch_size: int = 128
    learning_rate: float = 0.1
    momentum: float = 0.9
    lr_decay: float = 1.0
    seed: int = 0
    theta: float = 1e-2
    output_dir: str = ""
    emit_history: bool = True
    emit_model: bool = True
    emit_bundle: bool = False

    def __post_init__(self):
        if self.dataset not in ("synth", "idx", "csv"):
            raise ConfigError(
                f"key 'dataset' must be one of synth/idx/csv, got {self.dataset!r}"
            )
        if self.dataset == "idx" and not (self.idx_images and self.idx_labels):
            raise ConfigError("dataset idx requires keys 'idx_images' and 'idx_labels'")
        if self.dataset == "csv" and not (self.csv_path and self.csv_label_column):
            raise ConfigError("dataset csv requires keys 'csv_path' and 'csv_label_column'")
        if len(self.layer_sizes) < 3:
            raise ConfigError(
                f"key 'layer_sizes' needs at least input,hidden,output, got {self.layer_sizes}"
            )
        if self.theta <= 0:
            raise ConfigError(f"key 'theta' must be positive, got {self.theta}")
        if self.alpha < 0:
            raise ConfigError(f"key 'alpha' must be nonnegative, got {self.alpha}")
        if self.beta < 0:
            raise ConfigError(f"key 'beta' must be nonnegative, got {self.beta}")
        try:
            Mode.from_string(self.mode)
        except ValueError as e:
            raise ConfigError(f"key 'mode': {e}") from None
        if len(self.split_fractions) != 3:
            raise ConfigError(
                f"key 'split_fractions' needs exactly three values, got {self.split_fractions}"
            )
        # surface RegularizerSpec/TrainConfig invariant violations now,
        # pointing at the offending keys
        try:
            self.train_config()
        except ValueError as e:
            raise ConfigError(
                f"keys 'alpha'/'beta'/'mode'/training parameters: {e}"
            ) from None

    def regularizer_spec(self) -> RegularizerSpec:
        return RegularizerSpec(
            mode=Mode.from_string(self.mode),
            alpha=self.alpha,
            beta=self.beta,
            epsilon_norm=self.epsilon_norm,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            spec=self.regularizer_spec(),
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            lr_decay=self.lr_decay,
            seed=self.seed,
            beta_coupling=self.beta_coupling,
        )

    def load_splits(self) -> tuple[Dataset, Dataset, Dataset]:
        if self.dataset == "synth":
            full = synth_gaussians(
                self.synth_classes,
                self.synth_dim,
                self.synth_per_class,
                self.synth_separation,
                self.data_seed,
            )
        elif self.dataset == "idx":
            full = load_idx(self.idx_images, self.idx_labels, self.standardize)
        else:
            full = load_csv(self.csv_path, self.csv_label_column)
        return split(full, tuple(self.split_fractions), self.data_seed)

    def to_dict(self) -> dict:
        """Complete resolved key set; echoing this reproduces the run."""
        return {
            key: getattr(self, key)
            for key in _CONVERTERS
        }


def _parse_kv_lines(text: str, name: str) -> dict:
    raw = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{name}:{line_no}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in raw:
            raise ConfigError(f"{name}:{line_no}: duplicate key {key!r}")
        raw[key] = value.strip()
    return raw


def parse_config_text(text: str, name: str = "<config>") -> ExperimentConfig:
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{name}: invalid JSON: {e}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{name}: JSON config must be an object")
    else:
        raw = _parse_kv_lines(text, name)

    values = {}
    for key, value in raw.items():
        if key not in _CONVERTERS:
            raise ConfigError(f"{name}: unknown key {key!r}")
        try:
            values[key] = _CONVERTERS[key](value)
        except (ValueError, TypeError) as e:
            raise ConfigError(f"{name}: key {key!r}: {e}") from None
    for required in ("dataset", "layer_sizes", "mode"):
        if required not in values:
            raise ConfigError(f"{name}: missing required key {required!r}")
    try:
        return ExperimentConfig(**values)
    except ConfigError as e:
        raise ConfigError(f"{name}: {e}") from None


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return parse_config_text(text, str(path))


def write_config(cfg: ExperimentConfig, path) -> None:
    """Write a config in the key=value grammar (used by sweep runs)."""
    lines = []
    for key, value in cfg.to_dict().items():
        if isinstance(value, list):
            value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
