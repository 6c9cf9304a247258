"""Self-contained numerical kernel: layers, optimizer, assemblies, checks."""

from .adam import AdamState, adam_step
from .gradcheck import GradientCheckReport, gradient_check
from .gru import GruCellParams, gru_cell_backward, gru_cell_forward
from .layers import (
    BatchNormParams,
    BatchNormStats,
    DenseLayerParams,
    batchnorm_backward,
    batchnorm_forward,
    dense_backward,
    dense_forward,
    nll_loss,
    softmax,
    softmax_nll_backward,
    tanh_backward,
    tanh_forward,
)
from .network import FeedForwardNet, ForwardTrace, feedforward_parameter_count, glorot_uniform
from .rnn import GruStackNet, RnnTrace, gru_stack_parameter_count

__all__ = [
    "AdamState",
    "adam_step",
    "GradientCheckReport",
    "gradient_check",
    "GruCellParams",
    "gru_cell_backward",
    "gru_cell_forward",
    "BatchNormParams",
    "BatchNormStats",
    "DenseLayerParams",
    "batchnorm_backward",
    "batchnorm_forward",
    "dense_backward",
    "dense_forward",
    "nll_loss",
    "softmax",
    "softmax_nll_backward",
    "tanh_backward",
    "tanh_forward",
    "FeedForwardNet",
    "ForwardTrace",
    "feedforward_parameter_count",
    "glorot_uniform",
    "GruStackNet",
    "RnnTrace",
    "gru_stack_parameter_count",
]
