"""Latent-graph learning and graph-conditioned forecasting."""

__version__ = "0.1.0"
