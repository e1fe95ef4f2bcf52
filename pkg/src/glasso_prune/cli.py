"""Command line front end: train, prune, analyze, sweep.

Exit codes: 0 on success, 2 for configuration or usage errors, 3 when
training diverges, 4 for I/O and file-format errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .analysis import AnalysisBundle, bimodality_gap, norm_histogram, write_bundle
from .config import ExperimentConfig, parse_config
from .datasets import Dataset
from .errors import (
    ConfigError,
    DataFormatError,
    ModelFormatError,
    ShapeMismatchError,
    TrainingDiverged,
)
from .model_io import MAGIC, load_model, save_model
from .network import MlpNetwork, init_network
from .pruning import apply_mask, forced_removal_curve, make_mask, match_count_prune
from .regularization import Mode
from .trainer import TrainResult, disposable_counts, evaluate, load_history, train


def _fmt(x) -> str:
    return repr(float(x))


def _cli_mode(name: str) -> Mode:
    return Mode.GLASSO_OUT if name == "out" else Mode.GLASSO_IN


def _inspection_mode(cfg: ExperimentConfig) -> Mode:
    """Group direction used for norm diagnostics of a trained network.

    L2 training has no grouping of its own, so its networks are inspected
    with outgoing groups, the direction used when comparing against it.
    """
    mode = Mode.from_string(cfg.mode)
    return Mode.GLASSO_OUT if mode is Mode.L2_ALL else mode


def run_training(
    cfg: ExperimentConfig, out_dir: Path
) -> tuple[TrainResult, tuple[Dataset, Dataset, Dataset], float]:
    """Train per cfg, write the requested files, return result and splits."""
    splits = cfg.load_splits()
    train_set, val_set, test_set = splits
    net = init_network(cfg.layer_sizes, cfg.seed)

    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / "history.jsonl" if cfg.emit_history else None
    result = train(net, train_set, val_set, cfg.train_config(), log_path=log_path)

    if cfg.emit_model:
        save_model(result.best_network, out_dir / "model.glnn")

    test_acc = evaluate(result.best_network, test_set)
    last = result.history[-1]
    best_val = max(r.val_accuracy for r in result.history)
    manifest = {
        "config": cfg.to_dict(),
        "best_epoch": result.best_epoch,
        "best_val_acc": float(best_val),
        "final": {
            "train_loss": float(last.train_loss),
            "train_acc": float(last.train_accuracy),
            "val_acc": float(last.val_accuracy),
            "disposable": last.disposable_per_layer,
        },
        "test_acc": float(test_acc),
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="") as f:
        f.write(json.dumps(manifest, indent=2) + "\n")

    if cfg.emit_bundle:
        mode = _inspection_mode(cfg)
        mask = make_mask(result.best_network, mode, cfg.theta)
        retained = [
            (l, int(k.sum()), int(k.size))
            for l, k in enumerate(mask.keep, start=1)
        ]
        bundle = AnalysisBundle(
            histogram=norm_histogram(result.best_network, mode),
            history=result.history,
            retained_profile=retained,
            gap_report=_gap_report(result.best_network, mode),
        )
        write_bundle(bundle, out_dir)

    return result, splits, float(test_acc)


def _gap_report(net: MlpNetwork, mode: Mode, band_lo=1e-2, band_hi=1e-1) -> dict:
    return {
        "mode": mode.value,
        "band_lo": float(band_lo),
        "band_hi": float(band_hi),
        "gap_fraction": float(bimodality_gap(net, mode, band_lo, band_hi)),
        "hidden_nodes": int(sum(net.hidden_sizes)),
    }


def cmd_train(args) -> int:
    cfg = parse_config(args.config)
    if not cfg.output_dir:
        raise ConfigError("key 'output_dir' is required for train")
    result, _, test_acc = run_training(cfg, Path(cfg.output_dir))
    best_val = max(r.val_accuracy for r in result.history)
    print(
        f"trained {cfg.epochs} epochs; best val acc {_fmt(best_val)} "
        f"at epoch {result.best_epoch}; test acc {_fmt(test_acc)}"
    )
    print(f"wrote {cfg.output_dir}")
    return 0


def cmd_prune(args) -> int:
    net = load_model(args.model)
    mode = _cli_mode(args.mode)
    cfg = parse_config(args.data)
    _, _, test_set = cfg.load_splits()

    before = evaluate(net, test_set)
    if args.match_count is not None:
        if args.match_count < 0:
            raise ConfigError(f"--match-count must be non-negative, got {args.match_count}")
        outcome = match_count_prune(net, mode, args.match_count, eval_set=test_set)
    else:
        outcome = apply_mask(net, make_mask(net, mode, args.theta))
        outcome.accuracy = evaluate(outcome.pruned_network, test_set)

    out_dir = Path(args.out) if args.out else Path(args.model).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    save_model(outcome.pruned_network, out_dir / "pruned_model.glnn")

    doc = outcome.to_json_dict()
    doc["model"] = str(args.model)
    doc["before_accuracy"] = float(before)
    doc["after_accuracy"] = float(outcome.accuracy)
    doc["layer_sizes_before"] = net.layer_sizes
    doc["layer_sizes_after"] = outcome.pruned_network.layer_sizes
    with open(out_dir / "prune.json", "w", encoding="utf-8", newline="") as f:
        f.write(json.dumps(doc, indent=2) + "\n")

    print(
        f"removed {outcome.total_removed} of {sum(net.hidden_sizes)} hidden nodes; "
        f"test acc {_fmt(before)} -> {_fmt(outcome.accuracy)}"
    )
    print(f"wrote {out_dir / 'pruned_model.glnn'}")
    return 0


def _is_model_file(path: Path) -> bool:
    try:
        with open(path, "rb") as f:
            return f.read(len(MAGIC)) == MAGIC
    except OSError:
        return False


def cmd_analyze(args) -> int:
    target = Path(args.target)
    if not target.exists():
        raise ConfigError(f"no such file: {target}")
    is_model = _is_model_file(target)

    wants = {
        "histogram": args.histogram,
        "curve": args.curve,
        "gap": args.gap,
        "disposable": args.disposable,
        "retained": args.retained,
    }
    if not any(wants.values()):
        # default: everything derivable from the given file alone
        if is_model:
            wants.update(histogram=True, gap=True, retained=True)
            wants["curve"] = args.data is not None
        else:
            wants["disposable"] = True

    bundle = AnalysisBundle()
    if is_model:
        net = load_model(target)
        mode = _cli_mode(args.mode)
        if wants["disposable"]:
            raise ConfigError("--disposable needs a history.jsonl file, not a model")
        if wants["histogram"]:
            bundle.histogram = norm_histogram(net, mode)
        if wants["gap"]:
            bundle.gap_report = _gap_report(net, mode)
        if wants["retained"]:
            mask = make_mask(net, mode, args.theta)
            bundle.retained_profile = [
                (l, int(k.sum()), int(k.size))
                for l, k in enumerate(mask.keep, start=1)
            ]
        if wants["curve"]:
            if args.data is None:
                raise ConfigError("--curve needs --data to evaluate accuracy")
            cfg = parse_config(args.data)
            _, _, test_set = cfg.load_splits()
            bundle.pruning_curve = forced_removal_curve(
                net, mode, test_set, step=args.step
            )
    else:
        if any(wants[k] for k in ("histogram", "curve", "gap", "retained")):
            raise ConfigError(
                "histogram/curve/gap/retained need a model file, not a history"
            )
        bundle.history = load_history(target)

    out_dir = Path(args.out) if args.out else target.parent
    written = write_bundle(bundle, out_dir)
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    if not cfg.output_dir:
        raise ConfigError("key 'output_dir' is required for sweep")
    alphas = [a.strip() for a in args.alphas.split(",") if a.strip()]
    if not alphas:
        raise ConfigError("--alphas needs at least one value")
    try:
        alphas = [float(a) for a in alphas]
    except ValueError as e:
        raise ConfigError(f"--alphas: {e}") from None

    base_mode = Mode.from_string(cfg.mode)
    out_root = Path(cfg.output_dir)
    rows = ["alpha,best_val_acc,disposable_total,post_prune_acc"]
    for a in alphas:
        if a < 0:
            raise ConfigError(f"--alphas values must be non-negative, got {a}")
        sub = out_root / f"alpha_{_fmt(a)}"
        if base_mode is Mode.L2_ALL:
            run_cfg = dataclasses.replace(
                cfg, alpha=0.0, beta=0.1 * a, beta_coupling=False, output_dir=str(sub)
            )
        else:
            run_cfg = dataclasses.replace(
                cfg, alpha=a, beta=0.1 * a, beta_coupling=False, output_dir=str(sub)
            )
        result, splits, _ = run_training(run_cfg, sub)
        _, _, test_set = splits

        mode = _inspection_mode(run_cfg)
        best_val = max(r.val_accuracy for r in result.history)
        disposable = sum(disposable_counts(result.best_network, mode))
        outcome = apply_mask(
            result.best_network, make_mask(result.best_network, mode, cfg.theta)
        )
        post_acc = evaluate(outcome.pruned_network, test_set)
        rows.append(f"{_fmt(a)},{_fmt(best_val)},{disposable},{_fmt(post_acc)}")
        print(
            f"alpha {_fmt(a)}: best val acc {_fmt(best_val)}, "
            f"{disposable} disposable, post-prune acc {_fmt(post_acc)}"
        )

    out_root.mkdir(parents=True, exist_ok=True)
    with open(out_root / "summary.csv", "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(rows) + "\n")
    print(f"wrote {out_root / 'summary.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glasso-prune",
        description="Train sigmoid MLPs with group-sparsity pressure, then "
        "prune near-zero hidden nodes without retraining.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a network from a config file")
    p.add_argument("config", help="experiment config (key=value or JSON)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("prune", help="threshold-prune a saved model")
    p.add_argument("model", help="path to a .glnn model")
    p.add_argument("--mode", choices=("out", "in"), required=True,
                   help="group direction: outgoing or incoming weight vectors")
    p.add_argument("--theta", type=float, default=1e-2,
                   help="group-norm removal threshold (default 1e-2)")
    p.add_argument("--match-count", type=int, default=None, metavar="N",
                   help="ignore theta and remove exactly the N smallest groups")
    p.add_argument("--data", required=True,
                   help="config whose dataset supplies the evaluation split")
    p.add_argument("--out", default=None, help="output directory (default: model dir)")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("analyze", help="norm and history diagnostics")
    p.add_argument("target", help="a .glnn model or a history.jsonl")
    p.add_argument("--histogram", action="store_true", help="group-norm histogram CSV")
    p.add_argument("--curve", action="store_true",
                   help="forced-removal accuracy curve CSV (needs --data)")
    p.add_argument("--gap", action="store_true", help="norm bimodality gap JSON")
    p.add_argument("--disposable", action="store_true",
                   help="per-epoch disposable-node CSV from a history file")
    p.add_argument("--retained", action="store_true",
                   help="kept-vs-total nodes per layer at the theta threshold")
    p.add_argument("--mode", choices=("out", "in"), default="out",
                   help="group direction for model diagnostics (default out)")
    p.add_argument("--theta", type=float, default=1e-2,
                   help="threshold for --retained (default 1e-2)")
    p.add_argument("--step", type=int, default=100,
                   help="nodes removed per curve point (default 100)")
    p.add_argument("--data", default=None,
                   help="config whose dataset supplies curve evaluation")
    p.add_argument("--out", default=None, help="output directory (default: target dir)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="train once per alpha and summarize")
    p.add_argument("config", help="base experiment config")
    p.add_argument("--alphas", required=True,
                   help="comma separated regularization strengths")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TrainingDiverged as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (DataFormatError, ModelFormatError, ShapeMismatchError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
