"""Synthetic benchmark datasets with known ground-truth graphs."""

from .datasets import (
    DagDatasetConfig,
    DiffusionDatasetConfig,
    GeneratedDataset,
    dag_dataset,
    diffusion_dataset,
    export_dataset,
    write_series_csv,
)
from .primitives import SinusoidParams, cluster_labels, ppr_matrix, row_normalized, sample_sinusoid, sbm_sample

__all__ = [
    "DagDatasetConfig", "DiffusionDatasetConfig", "GeneratedDataset", "dag_dataset", "diffusion_dataset",
    "export_dataset", "write_series_csv", "SinusoidParams", "cluster_labels", "ppr_matrix",
    "row_normalized", "sample_sinusoid", "sbm_sample",
]
