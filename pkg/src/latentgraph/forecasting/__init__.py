"""Forecasting models that consume a (possibly learned) adjacency."""

from .batch import HORIZON, ForecastBatch
from .dcrnn import (DIFFUSION_ORDER, DcgruCell, Dcrnn, dcrnn_forecast, dcrnn_step,
                    diffusion_features, graph_diffusion_conv, transition_matrices)
from .gdn import GdnForecaster, gdn_attention, gdn_forecast
from .lstm import JointLstm, UnivariateLstms, lstm_forecast, lstm_u_forecast
from .mtgnn import MtgnnForecaster, blocks_for_window, mtgnn_forecast, receptive_field
from .nri import NriDecoder, nri_decode
from .serialize import assign_params, load_params, read_params, save_params

__all__ = [
    "HORIZON", "ForecastBatch", "DIFFUSION_ORDER", "DcgruCell", "Dcrnn", "dcrnn_forecast",
    "dcrnn_step", "diffusion_features", "graph_diffusion_conv", "transition_matrices",
    "GdnForecaster", "gdn_attention", "gdn_forecast", "JointLstm", "UnivariateLstms",
    "lstm_forecast", "lstm_u_forecast", "MtgnnForecaster", "blocks_for_window", "mtgnn_forecast", "receptive_field",
    "NriDecoder", "nri_decode", "assign_params", "load_params", "read_params", "save_params",
]
