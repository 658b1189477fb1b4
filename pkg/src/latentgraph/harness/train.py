"""Training with early stopping, and MAE evaluation on the original scale."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..autodiff import Adam, backward, make_rng, ops
from ..forecasting import assign_params
from ..graphs.adjacency import AdjacencyMatrix, EdgeScores
from .config import ExperimentConfig
from .data import PreparedData
from .models import ForecastModel, build_model

log = logging.getLogger(__name__)

HORIZONS = (3, 6, 12)


class TrainingError(RuntimeError):
    pass


@dataclass
class RunRecord:
    config: ExperimentConfig
    best_epoch: int
    best_val_mae: float
    test_mae: dict[int, float]
    edge_scores: EdgeScores | None
    adjacency: AdjacencyMatrix | None
    wall_clock: float
    seed: int
    val_history: list[float] = field(default_factory=list)
    params: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def epochs_run(self) -> int:
        return len(self.val_history)


def masked_mean_abs(pred: np.ndarray, target: np.ndarray, mask: np.ndarray) -> float:
    """Mean |pred - target| over unmasked entries; NaN when everything is masked."""
    count = int(np.count_nonzero(mask))
    if count == 0:
        return float("nan")
    return float(np.abs(pred - target)[mask.astype(bool)].sum() / count)


def evaluate_mae(pred: np.ndarray, target: np.ndarray, mask: np.ndarray,
                 horizons=HORIZONS) -> dict[int, float]:
    """MAE at exactly step h (1-based) for each h; NaN marks a fully masked horizon."""
    out = {}
    for h in horizons:
        if not 1 <= h <= pred.shape[-1]:
            raise ValueError(f"horizon {h} outside 1..{pred.shape[-1]}")
        out[h] = masked_mean_abs(pred[..., h - 1], target[..., h - 1], mask[..., h - 1])
    return out


def predict_original(model: ForecastModel, data: PreparedData, split: str) -> np.ndarray:
    batch = getattr(data, split)
    return data.normalizer.inverse(model.predict(batch.inputs))


def split_mae(model: ForecastModel, data: PreparedData, split: str) -> float:
    batch = getattr(data, split)
    return masked_mean_abs(predict_original(model, data, split), data.targets_raw[split], batch.mask)


def _snapshot(model: ForecastModel) -> dict[str, np.ndarray]:
    return {name: p.data.copy() for name, p in model.named_parameters()}


def train(cfg: ExperimentConfig, data: PreparedData, gt: np.ndarray | None = None,
          model: ForecastModel | None = None) -> RunRecord:
    """Fit one model; returns the record with the best-validation parameters restored."""
    cfg.validate()
    start = time.perf_counter()
    if model is None:
        model = build_model(cfg, data.n, data.train_series, gt)
    opt = Adam(model.parameters(), lr=cfg.lr)
    batch_rng = make_rng(cfg.seed, "batches")
    sample_rng = make_rng(cfg.seed, "gumbel")
    bs = cfg.effective_batch_size(data.n)
    train_set = data.train

    best_val, best_epoch, best_state, wait = np.inf, 0, _snapshot(model), 0
    history: list[float] = []
    for epoch in range(1, cfg.max_epochs + 1):
        order = batch_rng.permutation(len(train_set))
        for b, lo in enumerate(range(0, len(order), bs)):
            batch = train_set.subset(order[lo:lo + bs])
            pred = model.forward(batch.inputs, sample_rng, True)
            loss = ops.masked_mae(pred, batch.targets, batch.mask)
            reg = model.regularizer()
            if reg is not None:
                loss = ops.add(loss, reg)
            elif not batch.mask.any():
                continue            # nothing observed: leave parameters and optimizer state untouched
            if not np.isfinite(loss.item()):
                raise TrainingError(f"{cfg.model}: non-finite loss {loss.item()} at epoch {epoch}, batch {b}")
            opt.zero_grad()
            backward(loss)
            opt.step()
        val = split_mae(model, data, "val")
        history.append(val)
        log.info("%s/%s seed=%d epoch %d val MAE %.5f", cfg.model, cfg.graph_source, cfg.seed, epoch, val)
        if val < best_val:
            best_val, best_epoch, best_state, wait = val, epoch, _snapshot(model), 0
        else:
            wait += 1
            if wait >= cfg.patience:
                break
    assign_params(model, best_state)

    test_pred = predict_original(model, data, "test")
    test_mae = evaluate_mae(test_pred, data.targets_raw["test"], data.test.mask,
                            [h for h in HORIZONS if h <= cfg.horizon])
    scores = model.edge_scores(data.val.inputs)
    adj = model.adjacency()
    tag = f"learned-{cfg.model}" if cfg.graph_source == "learned" else cfg.graph_source
    return RunRecord(
        config=cfg,
        best_epoch=best_epoch,
        best_val_mae=float(best_val),
        test_mae=test_mae,
        edge_scores=None if scores is None else EdgeScores(scores, model=cfg.model, seed=cfg.seed),
        adjacency=None if adj is None else AdjacencyMatrix(np.asarray(adj, dtype=np.float64), directed=True,
                                                           source=tag),
        wall_clock=time.perf_counter() - start,
        seed=cfg.seed,
        val_history=history,
        params=best_state,
    )
