from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HORIZON = 12


@dataclass
class ForecastBatch:
    """Windows ``(B, N, w)``, targets and zero-target mask ``(B, N, horizon)``."""

    inputs: np.ndarray
    targets: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        if self.targets.shape != self.mask.shape:
            raise ValueError(f"targets {self.targets.shape} and mask {self.mask.shape} differ")
        if self.inputs.shape[:2] != self.targets.shape[:2]:
            raise ValueError(f"inputs {self.inputs.shape} and targets {self.targets.shape} disagree on (B, N)")

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def subset(self, idx) -> ForecastBatch:
        return ForecastBatch(self.inputs[idx], self.targets[idx], self.mask[idx])
