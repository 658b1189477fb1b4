"""Resolve a config's data section into windows and an optional ground-truth graph."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import numpy as np

from ..graphs.adjacency import read_edge_list
from ..synthetic import DagDatasetConfig, DiffusionDatasetConfig, dag_dataset, diffusion_dataset
from .config import ExperimentConfig
from .data import DataError, PreparedData, load_csv, make_windows


@lru_cache(maxsize=8)
def _generated(kind: str, n: int, T: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if kind == "diffusion":
        ds = diffusion_dataset(DiffusionDatasetConfig(n=n, T=T, seed=seed))
    else:
        ds = dag_dataset(DagDatasetConfig(n=n, T=T, seed=seed))
    ds.series.setflags(write=False)
    return ds.series, ds.ground_truth.weights


def load_series(cfg: ExperimentConfig) -> tuple[np.ndarray, np.ndarray | None]:
    """``(N, T)`` series and the ground-truth weights (None when unavailable)."""
    if cfg.dataset in ("diffusion", "dag"):
        series, gt = _generated(cfg.dataset, cfg.n, cfg.T, cfg.data_seed)
        return series, gt.copy()
    path = Path(cfg.data_path)
    graph = Path(cfg.graph_path) if cfg.graph_path else None
    if path.is_dir():
        if graph is None and (path / "ground_truth.edges").is_file():
            graph = path / "ground_truth.edges"
        path = path / "series.csv"
    if not path.is_file():
        raise DataError(f"series file not found: {path}")
    series = load_csv(path)
    gt = read_edge_list(graph, n=series.shape[0]).weights if graph is not None else None
    return series, gt


def prepare(cfg: ExperimentConfig) -> tuple[PreparedData, np.ndarray | None]:
    series, gt = load_series(cfg)
    data = make_windows(np.asarray(series), cfg.window, cfg.horizon, normalization=cfg.normalization,
                        mask_zeros=cfg.mask_zeros)
    return data, gt
