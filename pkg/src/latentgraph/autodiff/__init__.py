"""Minimal float64 reverse-mode autodiff engine."""

from . import ops
from .gradcheck import NonDeterministicError, finite_difference_check
from .optim import Adam, AdamState, adam_step
from .sampling import DEFAULT_TEMPERATURE, gumbel_bernoulli, gumbel_softmax, make_rng
from .tensor import ShapeError, Tape, Tensor, backward, grad, no_grad

__all__ = [
    "Adam",
    "AdamState",
    "DEFAULT_TEMPERATURE",
    "NonDeterministicError",
    "ShapeError",
    "Tape",
    "Tensor",
    "adam_step",
    "backward",
    "finite_difference_check",
    "grad",
    "gumbel_bernoulli",
    "gumbel_softmax",
    "make_rng",
    "no_grad",
    "ops",
]
