"""Experiment harness: data preparation, training, evaluation, ablations and the CLI."""

from .analysis import (ABLATION_MODES, AblationRow, AblationTable, CorrelationReport, correlate_edge_scores,
                       correlate_records, pearson_offdiag, percent_delta, run_ablation_suite)
from .config import ConfigError, ExperimentConfig, read_config, write_config
from .data import (DataError, Normalizer, PreparedData, denormalize, load_csv, make_windows, normalize,
                   sliding_windows, split_bounds, window_count)
from .models import build_model
from .records import find_records, load_record, save_record
from .sources import load_series, prepare
from .train import HORIZONS, RunRecord, TrainingError, evaluate_mae, train

__all__ = [
    "ABLATION_MODES", "AblationRow", "AblationTable", "CorrelationReport", "correlate_edge_scores",
    "correlate_records", "pearson_offdiag", "percent_delta", "run_ablation_suite", "ConfigError",
    "ExperimentConfig", "read_config", "write_config", "DataError", "Normalizer", "PreparedData",
    "denormalize", "load_csv", "make_windows", "normalize", "sliding_windows", "split_bounds",
    "window_count", "build_model", "find_records", "load_record", "save_record", "load_series", "prepare",
    "HORIZONS", "RunRecord", "TrainingError", "evaluate_mae", "train",
]
