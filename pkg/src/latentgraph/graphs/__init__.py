"""Graph learners and adjacency containers."""

from .adjacency import (
    AdjacencyMatrix,
    EdgeScores,
    read_dense_csv,
    read_edge_list,
    write_dense_csv,
    write_edge_list,
)
from .learners import (
    GdnLearner,
    GtsLearner,
    MtgnnLearner,
    NodePairEmbeddings,
    NriEncoder,
    SeriesEncoder,
    cosine_similarity,
    default_k,
    er_edge_probability,
    er_random_graph,
    gdn_knn_adjacency,
    gts_edge_probabilities,
    gts_encode_series,
    gts_sample_adjacency,
    mtgnn_adjacency,
    mtgnn_scores,
    nri_encode_window,
    topk_mask,
)

__all__ = [
    "AdjacencyMatrix",
    "EdgeScores",
    "GdnLearner",
    "GtsLearner",
    "MtgnnLearner",
    "NodePairEmbeddings",
    "NriEncoder",
    "SeriesEncoder",
    "cosine_similarity",
    "default_k",
    "er_edge_probability",
    "er_random_graph",
    "gdn_knn_adjacency",
    "gts_edge_probabilities",
    "gts_encode_series",
    "gts_sample_adjacency",
    "mtgnn_adjacency",
    "mtgnn_scores",
    "nri_encode_window",
    "read_dense_csv",
    "read_edge_list",
    "topk_mask",
    "write_dense_csv",
    "write_edge_list",
]
