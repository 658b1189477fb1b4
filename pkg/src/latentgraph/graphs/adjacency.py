"""Adjacency and edge-score containers plus their text formats."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

SOURCES = (
    "learned-mtgnn",
    "learned-gdn",
    "learned-gts",
    "learned-nri",
    "ground-truth",
    "random",
    "none",
)


@dataclass
class AdjacencyMatrix:
    """Nonnegative N x N edge weights; ``weights[i, j]`` is the edge i -> j."""

    weights: np.ndarray
    directed: bool = True
    source: str = "none"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {w.shape}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown adjacency source {self.source!r}")
        if np.any(w < 0):
            raise ValueError("adjacency weights must be nonnegative")
        if self.source != "ground-truth" and np.any(np.diag(w) != 0):
            raise ValueError("only ground-truth graphs may carry self-loops")
        self.weights = w

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(self.weights))

    def row_nonzeros(self) -> np.ndarray:
        return np.count_nonzero(self.weights, axis=1)

    @classmethod
    def empty(cls, n: int) -> AdjacencyMatrix:
        return cls(np.zeros((n, n)), directed=True, source="none")


@dataclass
class EdgeScores:
    """Continuous pairwise scores before sparsification or sampling."""

    scores: np.ndarray
    model: str = ""
    seed: int | None = None

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=np.float64)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError(f"edge scores must be square, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("edge scores must be finite")
        self.scores = s

    def off_diagonal(self) -> np.ndarray:
        n = self.scores.shape[0]
        return self.scores[~np.eye(n, dtype=bool)]


def write_edge_list(adj: AdjacencyMatrix, path: str | Path) -> None:
    """One ``src dst weight`` line per nonzero entry, 0-based ids."""
    src, dst = np.nonzero(adj.weights)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# n={adj.n} directed={int(adj.directed)} source={adj.source}\n")
        for i, j in zip(src, dst):
            fh.write(f"{i} {j} {float(adj.weights[i, j])!r}\n")


def read_edge_list(path: str | Path, n: int | None = None, source: str | None = None) -> AdjacencyMatrix:
    """Parse an edge-list file.

    The node count comes from ``n`` or the ``# n=...`` header line, falling
    back to ``max id + 1``.  Undirected files list both directions.
    """
    header: dict[str, str] = {}
    rows: list[tuple[int, int, float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        header[k] = v
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"{path}:{lineno}: expected 'src dst [weight]'")
            try:
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed edge {line!r}") from None
            if i < 0 or j < 0:
                raise ValueError(f"{path}:{lineno}: negative node id")
            rows.append((i, j, w))
    if n is None:
        n = int(header["n"]) if "n" in header else (max(max(i, j) for i, j, _ in rows) + 1 if rows else 0)
    weights = np.zeros((n, n))
    for i, j, w in rows:
        if i >= n or j >= n:
            raise ValueError(f"{path}: node id {max(i, j)} out of range for n={n}")
        weights[i, j] = w
    directed = header.get("directed", "1") != "0"
    return AdjacencyMatrix(weights, directed=directed, source=source or header.get("source", "ground-truth"))


def write_dense_csv(matrix: np.ndarray, path: str | Path) -> None:
    np.savetxt(path, np.asarray(matrix), delimiter=",", fmt="%.17g")


def read_dense_csv(path: str | Path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64))
