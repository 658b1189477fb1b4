"""Sinusoids, stochastic block models and personalized-PageRank diffusion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graphs.adjacency import AdjacencyMatrix

FREQ_CYCLES = (0.01, 0.1)
AMPLITUDE = (0.5, 2.0)
VSHIFT = (-1.0, 1.0)


@dataclass(frozen=True)
class SinusoidParams:
    """``s_t = amplitude * sin(frequency * t + hshift) + vshift``; frequency in rad/step."""

    frequency: float
    amplitude: float
    hshift: float = 0.0
    vshift: float = 0.0

    def __post_init__(self):
        if self.frequency <= 0:
            raise ValueError("frequency must be positive")
        if self.amplitude < 0:
            raise ValueError("amplitude must be nonnegative")

    @classmethod
    def sample(cls, rng: np.random.Generator) -> SinusoidParams:
        cycles = rng.uniform(*FREQ_CYCLES)
        return cls(frequency=2 * np.pi * cycles, amplitude=rng.uniform(*AMPLITUDE),
                   hshift=rng.uniform(0.0, 2 * np.pi), vshift=rng.uniform(*VSHIFT))


def sample_sinusoid(params: SinusoidParams, T: int) -> np.ndarray:
    if T < 1:
        raise ValueError("T must be at least 1")
    t = np.arange(T, dtype=np.float64)
    return params.amplitude * np.sin(params.frequency * t + params.hshift) + params.vshift


def cluster_labels(n: int, k: int) -> np.ndarray:
    """Contiguous balanced blocks; sizes differ by at most one."""
    return (np.arange(n) * k) // n


def sbm_sample(n: int, k: int, p_in: float, p_out: float,
               rng: np.random.Generator) -> tuple[AdjacencyMatrix, np.ndarray]:
    """Undirected binary SBM without self-loops, plus the cluster label of each node."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= K <= N, got K={k}, N={n}")
    if not 0.0 <= p_out <= p_in <= 1.0:
        raise ValueError(f"need 0 <= p_out <= p_in <= 1, got p_in={p_in}, p_out={p_out}")
    labels = cluster_labels(n, k)
    prob = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    upper = np.triu(rng.random((n, n)) < prob, k=1)
    adj = (upper | upper.T).astype(np.float64)
    return AdjacencyMatrix(adj, directed=False, source="ground-truth"), labels


def row_normalized(adj: np.ndarray) -> np.ndarray:
    """Row-stochastic P; isolated nodes get a self-loop first."""
    a = np.array(adj, dtype=np.float64)
    isolated = a.sum(axis=1) == 0
    a[isolated, isolated] = 1.0
    return a / a.sum(axis=1, keepdims=True)


def ppr_matrix(adj, restart: float = 0.15) -> np.ndarray:
    """S = r (I - (1 - r) P)^-1 by a dense solve."""
    if not 0.0 < restart < 1.0:
        raise ValueError("restart probability must lie in (0, 1)")
    weights = adj.weights if isinstance(adj, AdjacencyMatrix) else np.asarray(adj, dtype=np.float64)
    p = row_normalized(weights)
    n = p.shape[0]
    s = restart * np.linalg.solve(np.eye(n) - (1 - restart) * p, np.eye(n))
    assert np.all(np.isfinite(s)), "PPR system is singular"
    # unreachable pairs are exactly 0; the solve leaves ~1e-18 of either sign
    return np.maximum(s, 0.0)
