"""Cross-run edge-score correlation and graph-source ablations."""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .config import ExperimentConfig
from .data import PreparedData
from .records import UNDEFINED, format_value, save_record
from .train import RunRecord, train

ABLATION_MODES = ("learned", "ground-truth", "random", "none")


def off_diagonal(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    return m[~np.eye(m.shape[0], dtype=bool)]


def pearson_offdiag(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson r over the N(N-1) off-diagonal entries; NaN if either side is constant."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need two square matrices of equal size, got {a.shape} and {b.shape}")
    x, y = off_diagonal(a), off_diagonal(b)
    x = x - x.mean()
    y = y - y.mean()
    denom = np.sqrt((x * x).sum() * (y * y).sum())
    if denom == 0:
        return float("nan")
    return float(np.clip((x * y).sum() / denom, -1.0, 1.0))


def _nanmean(values) -> float:
    vals = [v for v in values if not math.isnan(v)]
    return float(np.mean(vals)) if vals else float("nan")


@dataclass
class CorrelationReport:
    pairwise: list[tuple[str, str, float]] = field(default_factory=list)
    mean_cross_run: float = float("nan")
    gt_correlations: list[tuple[str, float]] = field(default_factory=list)
    mean_gt: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "pairwise": [{"a": a, "b": b, "pearson": format_value(r)} for a, b, r in self.pairwise],
            "mean_cross_run": format_value(self.mean_cross_run),
            "undefined_pairs": sum(math.isnan(r) for _, _, r in self.pairwise),
            "ground_truth": [{"run": k, "pearson": format_value(r)} for k, r in self.gt_correlations],
            "mean_ground_truth": format_value(self.mean_gt),
        }

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1), encoding="utf-8")


def correlate_edge_scores(scores: Sequence[np.ndarray], gt: np.ndarray | None = None,
                          labels: Sequence[str] | None = None) -> CorrelationReport:
    """Mean pairwise correlation across runs, and per-run correlation with the binary GT."""
    scores = [np.asarray(getattr(s, "scores", s), dtype=np.float64) for s in scores]
    if not scores:
        raise ValueError("no score matrices given")
    if len({s.shape for s in scores}) != 1:
        raise ValueError("score matrices differ in size")
    labels = list(labels) if labels is not None else [str(i) for i in range(len(scores))]
    report = CorrelationReport()
    for (i, a), (j, b) in itertools.combinations(enumerate(scores), 2):
        report.pairwise.append((labels[i], labels[j], pearson_offdiag(a, b)))
    report.mean_cross_run = _nanmean(r for _, _, r in report.pairwise)
    if gt is not None:
        binary = (np.asarray(getattr(gt, "weights", gt)) > 0).astype(np.float64)
        report.gt_correlations = [(labels[i], pearson_offdiag(s, binary)) for i, s in enumerate(scores)]
        report.mean_gt = _nanmean(r for _, r in report.gt_correlations)
    return report


def correlate_records(records: Sequence[RunRecord], gt=None, labels=None) -> CorrelationReport:
    with_scores = [(i, r) for i, r in enumerate(records) if r.edge_scores is not None]
    if labels is None:
        labels = [f"{r.config.model}/{r.config.graph_source}/seed{r.seed}" for r in records]
    return correlate_edge_scores([r.edge_scores for _, r in with_scores], gt, [labels[i] for i, _ in with_scores])


def percent_delta(mae_mode: float, mae_learned: float) -> float:
    """Signed change relative to the learned graph; negative means lower error."""
    return 100.0 * (mae_mode - mae_learned) / mae_learned


def format_delta(delta: float) -> str:
    return UNDEFINED if math.isnan(delta) else f"{delta:+.2f}%"


@dataclass
class AblationRow:
    mode: str
    mae12: list[float]

    @property
    def mean(self) -> float:
        return float(np.mean(self.mae12))

    @property
    def sem(self) -> float:
        if len(self.mae12) < 2:
            return float("nan")
        return float(np.std(self.mae12, ddof=1) / np.sqrt(len(self.mae12)))


@dataclass
class AblationTable:
    model: str
    rows: list[AblationRow]

    def delta(self, mode: str) -> float:
        learned = self.row("learned").mean
        return percent_delta(self.row(mode).mean, learned)

    def row(self, mode: str) -> AblationRow:
        for r in self.rows:
            if r.mode == mode:
                return r
        raise KeyError(mode)

    def render(self) -> str:
        """One line per mode: ``mode  mean MAE@12, signed percent``."""
        lines = [f"{self.model} MAE@12 by graph source"]
        for r in self.rows:
            lines.append(f"{r.mode:<13} {r.mean:.2f}, {format_delta(self.delta(r.mode))}")
        return "\n".join(lines)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["mode", "mae12_mean", "mae12_sem", "delta_pct", "runs"])
            for r in self.rows:
                w.writerow([r.mode, format_value(r.mean), format_value(r.sem),
                            format_delta(self.delta(r.mode)), len(r.mae12)])


def run_ablation_suite(base: ExperimentConfig, data: PreparedData, gt: np.ndarray | None = None,
                       modes: Sequence[str] = ABLATION_MODES, repeats: int = 5, out_dir=None,
                       trainer: Callable[..., RunRecord] = train) -> tuple[AblationTable, list[RunRecord]]:
    """Train ``base.model`` under each graph source with seeds ``0..repeats-1``."""
    if "learned" not in modes:
        raise ValueError("the learned mode is the reference and must be included")
    if "ground-truth" in modes and gt is None:
        raise ValueError("ground-truth mode needs a ground-truth graph")
    if repeats < 1:
        raise ValueError("repeats must be positive")
    rows, records = [], []
    for mode in modes:
        maes = []
        for seed in range(repeats):
            cfg = base.replace(graph_source=mode, seed=seed)
            rec = trainer(cfg, data, gt)
            records.append(rec)
            maes.append(rec.test_mae[max(rec.test_mae)])
            if out_dir is not None:
                save_record(rec, Path(out_dir) / mode / f"seed_{seed}")
        rows.append(AblationRow(mode, maes))
    table = AblationTable(base.model, rows)
    if out_dir is not None:
        table.write_csv(Path(out_dir) / "ablation.csv")
        (Path(out_dir) / "ablation.txt").write_text(table.render() + "\n", encoding="utf-8")
    return table, records
