"""Flat TOML experiment configuration."""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MODELS = ("gts", "mtgnn", "gdn", "nri", "lstm", "lstm-u")
GRAPH_MODELS = ("gts", "mtgnn", "gdn", "nri")
GRAPH_SOURCES = ("learned", "ground-truth", "random", "none")
DATASETS = ("diffusion", "dag", "csv")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    model: str = "gts"
    graph_source: str = "learned"
    # data
    dataset: str = "diffusion"
    data_path: str = ""
    graph_path: str = ""
    n: int = 30
    T: int = 5000
    data_seed: int = 0
    window: int = 20
    horizon: int = 12
    normalization: str = "zscore"
    mask_zeros: bool = True
    # training
    max_epochs: int = 200
    patience: int = 20
    batch_size: int = 0          # 0 picks 32, or 8 for NRI when N > 30
    lr: float = 1e-3
    seed: int = 0
    gt_weight: float = 0.0       # GTS only
    temperature: float = 0.5

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if self.graph_source not in GRAPH_SOURCES:
            raise ConfigError(f"unknown graph source {self.graph_source!r}; choose from {', '.join(GRAPH_SOURCES)}")
        if self.model not in GRAPH_MODELS and self.graph_source not in ("learned", "none"):
            raise ConfigError(f"model {self.model!r} uses no graph; graph_source must be 'learned' or 'none'")
        if self.dataset not in DATASETS:
            raise ConfigError(f"unknown dataset {self.dataset!r}; choose from {', '.join(DATASETS)}")
        if self.dataset == "csv" and not self.data_path:
            raise ConfigError("dataset 'csv' needs data_path")
        if self.graph_source == "ground-truth" and self.dataset == "csv" and not self.graph_path:
            if not (Path(self.data_path) / "ground_truth.edges").is_file():
                raise ConfigError("graph_source 'ground-truth' on csv data needs graph_path")
        if self.gt_weight < 0:
            raise ConfigError("gt_weight must be nonnegative")
        if self.gt_weight > 0 and self.model != "gts":
            raise ConfigError("gt_weight applies to the gts model only")
        if self.gt_weight > 0 and self.dataset == "csv" and not self.graph_path:
            raise ConfigError("gt_weight > 0 needs a ground-truth graph")
        for name in ("window", "horizon", "max_epochs", "patience", "n", "T"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.batch_size < 0 or self.lr <= 0 or self.temperature <= 0:
            raise ConfigError("batch_size must be >= 0, lr and temperature > 0")
        if self.normalization not in ("zscore", "minmax01"):
            raise ConfigError(f"unknown normalization {self.normalization!r}")

    def effective_batch_size(self, n: int) -> int:
        if self.batch_size:
            return self.batch_size
        return 8 if self.model == "nri" and n > 30 else 32

    def replace(self, **changes) -> ExperimentConfig:
        cfg = ExperimentConfig(**(asdict(self) | changes))
        cfg.validate()
        return cfg


def config_from_dict(raw: dict) -> ExperimentConfig:
    known = {f.name: f.type for f in fields(ExperimentConfig)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    defaults = ExperimentConfig()
    values = {}
    for key, value in raw.items():
        expected = type(getattr(defaults, key))
        if expected is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
            raise ConfigError(f"{key}: expected {expected.__name__}, got {type(value).__name__}")
        values[key] = value
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


def read_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(raw)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    escaped = str(value).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def write_config(cfg: ExperimentConfig, path) -> None:
    lines = [f"{k} = {_toml_value(v)}" for k, v in asdict(cfg).items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
