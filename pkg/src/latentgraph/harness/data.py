"""CSV ingestion, per-node normalization and chronological windowing."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ..forecasting.batch import HORIZON, ForecastBatch

SPLITS = (0.7, 0.1, 0.2)
NORMALIZATIONS = ("zscore", "minmax01")


class DataError(ValueError):
    pass


def load_csv(path) -> np.ndarray:
    """Read a series CSV into an ``(N, T)`` array; columns are nodes, rows are timesteps."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise DataError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if len(header) < 2:
        raise DataError(f"{path}: need at least 2 node columns, found {len(header)}")
    if not body:
        raise DataError(f"{path}: no data rows")
    out = np.empty((len(body), len(header)))
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} cells, found {len(row)}")
        for col, cell in enumerate(row):
            if not cell.strip():
                raise DataError(f"{path}:{lineno}: missing value in column {header[col]!r}")
            try:
                out[lineno - 2, col] = float(cell)
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric cell {cell!r}") from None
    if not np.all(np.isfinite(out)):
        raise DataError(f"{path}: non-finite values")
    return out.T.copy()


def split_bounds(T: int, splits=SPLITS) -> tuple[int, int]:
    """End indices of the train and validation segments."""
    # rounding guards against 0.7 + 0.1 landing just below 0.8
    train_end = int(np.floor(round(splits[0] * T, 9)))
    val_end = int(np.floor(round((splits[0] + splits[1]) * T, 9)))
    return train_end, val_end


@dataclass
class Normalizer:
    method: str
    shift: np.ndarray   # (N,)
    scale: np.ndarray   # (N,)

    @classmethod
    def fit(cls, train: np.ndarray, method: str = "zscore") -> Normalizer:
        if method not in NORMALIZATIONS:
            raise DataError(f"unknown normalization {method!r}; choose from {NORMALIZATIONS}")
        if method == "zscore":
            shift, scale = train.mean(axis=1), train.std(axis=1)
        else:
            shift, scale = train.min(axis=1), train.max(axis=1) - train.min(axis=1)
        scale = np.where(scale > 0, scale, 1.0)
        return cls(method, shift, scale)

    def transform(self, x: np.ndarray) -> np.ndarray:
        """x has nodes on axis -2 (``(N, T)`` or ``(B, N, L)``)."""
        return (x - self.shift[:, None]) / self.scale[:, None]

    def inverse(self, x: np.ndarray) -> np.ndarray:
        return x * self.scale[:, None] + self.shift[:, None]


def normalize(series: np.ndarray, method: str = "zscore", splits=SPLITS) -> tuple[np.ndarray, Normalizer]:
    """Statistics come from the training segment only."""
    train_end, _ = split_bounds(series.shape[1], splits)
    norm = Normalizer.fit(series[:, :train_end], method)
    return norm.transform(series), norm


def denormalize(x: np.ndarray, norm: Normalizer) -> np.ndarray:
    return norm.inverse(x)


def sliding_windows(series: np.ndarray, w: int, horizon: int = HORIZON) -> tuple[np.ndarray, np.ndarray]:
    """Stride-1 windows: inputs ``(B, N, w)`` and targets ``(B, N, horizon)``."""
    n, T = series.shape
    if T < w + horizon:
        raise DataError(f"series of length {T} too short for window {w} + horizon {horizon}")
    view = np.lib.stride_tricks.sliding_window_view(series, w + horizon, axis=1)   # (N, B, w+h)
    view = view.transpose(1, 0, 2)
    return np.ascontiguousarray(view[..., :w]), np.ascontiguousarray(view[..., w:])


def window_count(length: int, w: int, horizon: int = HORIZON) -> int:
    return max(0, length - w - horizon + 1)


@dataclass
class PreparedData:
    """Windows for each split plus what is needed to report on the original scale."""

    train: ForecastBatch
    val: ForecastBatch
    test: ForecastBatch
    normalizer: Normalizer
    train_series: np.ndarray       # normalized training segment, (N, T_train)
    targets_raw: dict              # split -> original-scale targets

    @property
    def n(self) -> int:
        return self.train_series.shape[0]


def make_windows(series: np.ndarray, w: int, horizon: int = HORIZON, splits=SPLITS,
                 normalization: str = "zscore", mask_zeros: bool = True) -> PreparedData:
    """Normalize on train, then window each chronological segment separately."""
    n, T = series.shape
    if n < 2:
        raise DataError("need at least 2 series")
    train_end, val_end = split_bounds(T, splits)
    bounds = {"train": (0, train_end), "val": (train_end, val_end), "test": (val_end, T)}
    for name, (a, b) in bounds.items():
        if window_count(b - a, w, horizon) < 1:
            raise DataError(f"{name} segment of length {b - a} too short for window {w} + horizon {horizon}")
    normed, norm = normalize(series, normalization, splits)
    batches, raw = {}, {}
    for name, (a, b) in bounds.items():
        x, y = sliding_windows(normed[:, a:b], w, horizon)
        _, y_raw = sliding_windows(series[:, a:b], w, horizon)
        mask = (y_raw != 0) if mask_zeros else np.ones_like(y_raw, dtype=bool)
        batches[name] = ForecastBatch(x, y, mask)
        raw[name] = y_raw
    return PreparedData(batches["train"], batches["val"], batches["test"], norm,
                        normed[:, :train_end].copy(), raw)
