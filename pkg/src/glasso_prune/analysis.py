"""Machine-readable diagnostics: norm histograms, pruning curves,
disposable-node trajectories, and retained-node profiles.

Everything is written as CSV/JSON data files rather than rendered plots,
so outputs are byte-deterministic and test-friendly. Histograms are binned
in log10 of the group norm; exact zeros fall into the underflow bucket.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .network import MlpNetwork
from .regularization import Mode, group_norms
from .trainer import EpochReport

HISTOGRAM_HEADER = "bin_lo,bin_hi,layer,count"
CURVE_HEADER = "removed,accuracy"
DISPOSABLE_HEADER = "epoch,layer,count"
RETAINED_HEADER = "layer,kept,total"

POOLED_LAYER = 0  # layer id for the all-hidden-layers histogram rows


@dataclass
class HistogramSpec:
    log10_min: float = -8.0
    log10_max: float = 2.0
    bins: int = 50

    def __post_init__(self):
        if self.bins < 1:
            raise ValueError(f"bins must be >= 1, got {self.bins}")
        if not self.log10_min < self.log10_max:
            raise ValueError(
                f"need log10_min < log10_max, got {self.log10_min}, {self.log10_max}"
            )

    def edges(self) -> np.ndarray:
        """Norm-value bin edges (length bins + 1)."""
        return 10.0 ** np.linspace(self.log10_min, self.log10_max, self.bins + 1)


@dataclass
class LayerHistogram:
    layer: int  # POOLED_LAYER for the pooled rows, else 1..L-1
    underflow: int
    counts: np.ndarray
    overflow: int

    @property
    def total(self) -> int:
        return self.underflow + int(np.sum(self.counts)) + self.overflow


@dataclass
class NormHistogram:
    spec: HistogramSpec
    layers: list[LayerHistogram]  # pooled first, then per hidden layer


def _bin_norms(norms: np.ndarray, spec: HistogramSpec) -> tuple[int, np.ndarray, int]:
    width = (spec.log10_max - spec.log10_min) / spec.bins
    counts = np.zeros(spec.bins, dtype=np.int64)
    under = over = 0
    for n in norms:
        if n <= 0.0:
            under += 1
            continue
        i = int(np.floor((np.log10(n) - spec.log10_min) / width))
        if i < 0:
            under += 1
        elif i >= spec.bins:
            over += 1
        else:
            counts[i] += 1
    return under, counts, over


def norm_histogram(
    net: MlpNetwork, mode: Mode, spec: HistogramSpec | None = None
) -> NormHistogram:
    """Group-norm histogram per hidden layer plus a pooled set of rows."""
    spec = spec or HistogramSpec()
    per_layer = group_norms(net, mode)
    layers = []
    pooled = _bin_norms(np.concatenate(per_layer), spec)
    layers.append(LayerHistogram(POOLED_LAYER, pooled[0], pooled[1], pooled[2]))
    for l, norms in enumerate(per_layer, start=1):
        under, counts, over = _bin_norms(norms, spec)
        layers.append(LayerHistogram(l, under, counts, over))
    return NormHistogram(spec, layers)


def bimodality_gap(
    net: MlpNetwork,
    mode: Mode,
    band_lo: float = 1e-2,
    band_hi: float = 1e-1,
) -> float:
    """Fraction of hidden-node group norms inside [band_lo, band_hi].

    A trained network whose norms split cleanly into a prunable cluster
    and a retained cluster leaves almost no mass in this band, which is
    what makes the pruning threshold easy to place.
    """
    if not 0 < band_lo < band_hi:
        raise ValueError(f"need 0 < band_lo < band_hi, got {band_lo}, {band_hi}")
    norms = np.concatenate(group_norms(net, mode))
    inside = np.sum((norms >= band_lo) & (norms <= band_hi))
    return float(inside / len(norms))


@dataclass
class AnalysisBundle:
    """Collected diagnostics; None fields are skipped by write_bundle."""

    histogram: NormHistogram | None = None
    pruning_curve: list[tuple[int, float]] | None = None
    history: list[EpochReport] | None = None
    retained_profile: list[tuple[int, int, int]] | None = None  # (layer, kept, total)
    gap_report: dict | None = None


def _fmt(x) -> str:
    return repr(float(x))


def _write_text(path: Path, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        for line in lines:
            f.write(line + "\n")


def write_bundle(bundle: AnalysisBundle, out_dir) -> list[Path]:
    """Write the bundle's data files into out_dir; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    if bundle.histogram is not None:
        hist = bundle.histogram
        edges = hist.spec.edges()
        lines = [HISTOGRAM_HEADER]
        for lh in hist.layers:
            lines.append(f"0.0,{_fmt(edges[0])},{lh.layer},{lh.underflow}")
            for i, count in enumerate(lh.counts):
                lines.append(f"{_fmt(edges[i])},{_fmt(edges[i + 1])},{lh.layer},{int(count)}")
            lines.append(f"{_fmt(edges[-1])},inf,{lh.layer},{lh.overflow}")
        path = out_dir / "histogram.csv"
        _write_text(path, lines)
        written.append(path)

    if bundle.pruning_curve is not None:
        lines = [CURVE_HEADER]
        for removed, acc in bundle.pruning_curve:
            lines.append(f"{int(removed)},{_fmt(acc)}")
        path = out_dir / "curve.csv"
        _write_text(path, lines)
        written.append(path)

    if bundle.history is not None:
        lines = [DISPOSABLE_HEADER]
        for report in bundle.history:
            for l, count in enumerate(report.disposable_per_layer, start=1):
                lines.append(f"{report.epoch},{l},{int(count)}")
        path = out_dir / "disposable.csv"
        _write_text(path, lines)
        written.append(path)

    if bundle.retained_profile is not None:
        lines = [RETAINED_HEADER]
        for layer, kept, total in bundle.retained_profile:
            lines.append(f"{int(layer)},{int(kept)},{int(total)}")
        path = out_dir / "retained.csv"
        _write_text(path, lines)
        written.append(path)

    if bundle.gap_report is not None:
        path = out_dir / "gap.json"
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(json.dumps(bundle.gap_report, indent=2) + "\n")
        written.append(path)

    return written


def read_histogram_csv(path) -> list[tuple[float, float, int, int]]:
    """Parse histogram.csv rows back into (bin_lo, bin_hi, layer, count)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != HISTOGRAM_HEADER:
        raise ValueError(f"{path}: missing header {HISTOGRAM_HEADER!r}")
    rows = []
    for line in lines[1:]:
        lo, hi, layer, count = line.split(",")
        rows.append((float(lo), float(hi), int(layer), int(count)))
    return rows


def read_curve_csv(path) -> list[tuple[int, float]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CURVE_HEADER:
        raise ValueError(f"{path}: missing header {CURVE_HEADER!r}")
    return [
        (int(line.split(",")[0]), float(line.split(",")[1])) for line in lines[1:]
    ]
