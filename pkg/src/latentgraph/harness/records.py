"""RunRecord directories: config, metrics, scores, graph and parameters."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from ..forecasting import read_params, save_params
from ..graphs.adjacency import EdgeScores, read_dense_csv, read_edge_list, write_dense_csv, write_edge_list
from .config import read_config, write_config
from .train import RunRecord

UNDEFINED = "undefined"

CONFIG_FILE = "config.toml"
METRICS_FILE = "metrics.csv"
SCORES_FILE = "edge_scores.csv"
GRAPH_FILE = "adjacency.edges"
PARAMS_FILE = "params.bin"
MANIFEST_FILE = "params.manifest.json"
SUMMARY_FILE = "record.json"


def format_value(x: float) -> str:
    return UNDEFINED if x is None or math.isnan(x) else repr(float(x))


def parse_value(s: str) -> float:
    return float("nan") if s.strip() == UNDEFINED else float(s)


def save_record(record: RunRecord, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_config(record.config, out / CONFIG_FILE)
    with open(out / METRICS_FILE, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["horizon", "mae"])
        for h, v in record.test_mae.items():
            w.writerow([h, format_value(v)])
    if record.edge_scores is not None:
        write_dense_csv(record.edge_scores.scores, out / SCORES_FILE)
    if record.adjacency is not None:
        write_edge_list(record.adjacency, out / GRAPH_FILE)
    save_params(record.params, out / PARAMS_FILE, out / MANIFEST_FILE)
    summary = {
        "best_epoch": record.best_epoch,
        "best_val_mae": format_value(record.best_val_mae),
        "val_history": [format_value(v) for v in record.val_history],
        "wall_clock_s": record.wall_clock,
        "seed": record.seed,
    }
    (out / SUMMARY_FILE).write_text(json.dumps(summary, indent=1), encoding="utf-8")
    return out


def is_record_dir(path) -> bool:
    path = Path(path)
    return (path / CONFIG_FILE).is_file() and (path / METRICS_FILE).is_file()


def load_record(run_dir) -> RunRecord:
    run = Path(run_dir)
    if not is_record_dir(run):
        raise FileNotFoundError(f"{run} is not a run directory")
    cfg = read_config(run / CONFIG_FILE)
    with open(run / METRICS_FILE, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    test_mae = {int(r["horizon"]): parse_value(r["mae"]) for r in rows}
    scores = None
    if (run / SCORES_FILE).is_file():
        scores = EdgeScores(read_dense_csv(run / SCORES_FILE), model=cfg.model, seed=cfg.seed)
    adj = read_edge_list(run / GRAPH_FILE) if (run / GRAPH_FILE).is_file() else None
    summary = json.loads((run / SUMMARY_FILE).read_text(encoding="utf-8"))
    params = read_params(run / PARAMS_FILE, run / MANIFEST_FILE) if (run / PARAMS_FILE).is_file() else {}
    return RunRecord(
        config=cfg,
        best_epoch=int(summary["best_epoch"]),
        best_val_mae=parse_value(summary["best_val_mae"]),
        test_mae=test_mae,
        edge_scores=scores,
        adjacency=adj,
        wall_clock=float(summary["wall_clock_s"]),
        seed=int(summary["seed"]),
        val_history=[parse_value(v) for v in summary["val_history"]],
        params=params,
    )


def find_records(root) -> list[Path]:
    """Run directories under ``root`` (including ``root`` itself), sorted by path."""
    root = Path(root)
    found = [p.parent for p in root.rglob(CONFIG_FILE) if is_record_dir(p.parent)]
    return sorted(found)

