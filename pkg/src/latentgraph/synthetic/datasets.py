"""Diffusion and DAG datasets with known ground-truth graphs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..autodiff import make_rng
from ..graphs.adjacency import AdjacencyMatrix, write_edge_list
from .primitives import SinusoidParams, ppr_matrix, sample_sinusoid, sbm_sample

DEFAULT_T = 10_000
NOISE = 0.1


@dataclass
class DiffusionDatasetConfig:
    n: int = 100
    T: int = DEFAULT_T
    clusters: int = 5
    p_in: float = 0.5
    p_out: float = 0.05
    restart: float = 0.15
    alpha: float = 0.75
    lag: int = 10
    noise: float = NOISE
    seed: int = 0
    graph_seed: int | None = None   # defaults to seed

    def validate(self) -> None:
        if not 0.0 < self.restart < 1.0:
            raise ValueError("restart must lie in (0, 1)")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0 <= self.lag < self.T:
            raise ValueError("lag C must satisfy 0 <= C < T")
        if self.noise < 0:
            raise ValueError("noise must be nonnegative")


@dataclass
class DagDatasetConfig:
    n: int = 100
    T: int = DEFAULT_T
    p: float = 0.1
    max_hshift: int = 5
    stretch: tuple[float, float] = (0.8, 1.25)
    vshift: tuple[float, float] = (-0.5, 0.5)
    noise: float = NOISE
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("edge probability must lie in [0, 1]")
        if self.max_hshift < 0 or self.max_hshift >= self.T:
            raise ValueError("max_hshift must lie in [0, T)")
        if self.noise < 0:
            raise ValueError("noise must be nonnegative")


@dataclass
class GeneratedDataset:
    series: np.ndarray               # (N, T)
    ground_truth: AdjacencyMatrix
    kind: str
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.all(np.isfinite(self.series)):
            raise ValueError("generated series contain non-finite values")
        if self.ground_truth.n != self.series.shape[0]:
            raise ValueError("ground truth and series disagree on N")

    @property
    def n(self) -> int:
        return self.series.shape[0]


def _sinusoids(n: int, T: int, rng: np.random.Generator) -> np.ndarray:
    return np.stack([sample_sinusoid(SinusoidParams.sample(rng), T) for _ in range(n)])


def diffusion_dataset(cfg: DiffusionDatasetConfig) -> GeneratedDataset:
    """Sinusoids mixed with their lagged PPR-diffused versions over an SBM graph.

    Receiving node i averages ``S[i, j] * (raw_j + eps_ij)`` with fresh noise
    on every other node j.  The noise term summed over j is Gaussian with
    variance ``noise^2 * sum_{j != i} S[i, j]^2``, which is drawn directly.
    """
    cfg.validate()
    graph_seed = cfg.seed if cfg.graph_seed is None else cfg.graph_seed
    raw = _sinusoids(cfg.n, cfg.T, make_rng(cfg.seed, "sinusoids"))
    gt, labels = sbm_sample(cfg.n, cfg.clusters, cfg.p_in, cfg.p_out, make_rng(graph_seed, "sbm"))
    s = ppr_matrix(gt, cfg.restart)
    off = s - np.diag(np.diag(s))
    noise_scale = cfg.noise * np.sqrt((off ** 2).sum(axis=1))
    eta = make_rng(cfg.seed, "diffusion-noise").standard_normal((cfg.n, cfg.T))
    diffused = s @ raw + noise_scale[:, None] * eta
    out = raw.copy()
    c = cfg.lag
    out[:, c:] = cfg.alpha * raw[:, c:] + (1 - cfg.alpha) * diffused[:, :cfg.T - c]
    meta = asdict(cfg) | {"clusters_of_nodes": labels.tolist()}
    return GeneratedDataset(out, gt, "diffusion", meta)


def _lagged(x: np.ndarray, shift: int) -> np.ndarray:
    """x delayed by ``shift`` steps, holding the first value at the start."""
    if shift == 0:
        return x
    return np.concatenate([np.full(shift, x[0]), x[:-shift]])


def dag_dataset(cfg: DagDatasetConfig) -> GeneratedDataset:
    """Nodes in index order; each child is a convex mix of modified parents plus noise.

    A parent series is delayed by an integer horizontal shift, scaled by a
    stretch factor and offset by a vertical shift.
    """
    cfg.validate()
    graph_rng = make_rng(cfg.seed, "dag-graph")
    sin_rng = make_rng(cfg.seed, "sinusoids")
    mod_rng = make_rng(cfg.seed, "dag-modifiers")
    noise_rng = make_rng(cfg.seed, "dag-noise")
    n, T = cfg.n, cfg.T
    adj = np.zeros((n, n))
    series = np.zeros((n, T))
    for i in range(n):
        parents = np.flatnonzero(graph_rng.random(i) < cfg.p) if i else np.zeros(0, dtype=int)
        if parents.size == 0:
            series[i] = sample_sinusoid(SinusoidParams.sample(sin_rng), T)
        else:
            weights = mod_rng.dirichlet(np.ones(parents.size))
            for j, w in zip(parents, weights):
                shift = int(mod_rng.integers(0, cfg.max_hshift + 1))
                stretch = mod_rng.uniform(*cfg.stretch)
                offset = mod_rng.uniform(*cfg.vshift)
                series[i] += w * (stretch * _lagged(series[j], shift) + offset)
                adj[j, i] = 1.0
        series[i] += cfg.noise * noise_rng.standard_normal(T)
    gt = AdjacencyMatrix(adj, directed=True, source="ground-truth")
    meta = asdict(cfg)
    meta["stretch"] = list(cfg.stretch)
    meta["vshift"] = list(cfg.vshift)
    return GeneratedDataset(series, gt, "dag", meta)


def write_series_csv(series: np.ndarray, path) -> None:
    """Rows are timesteps, columns ``node_0..node_{N-1}``; shortest round-trip floats."""
    series = np.asarray(series, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(f"node_{i}" for i in range(series.shape[0])) + "\n")
        for row in series.T:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def export_dataset(ds: GeneratedDataset, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"series": out / "series.csv", "graph": out / "ground_truth.edges", "metadata": out / "metadata.json"}
    write_series_csv(ds.series, paths["series"])
    write_edge_list(ds.ground_truth, paths["graph"])
    paths["metadata"].write_text(json.dumps({"kind": ds.kind, "n": ds.n, "T": ds.series.shape[1],
                                             "config": ds.config}, indent=1))
    return paths
