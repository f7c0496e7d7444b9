"""Outputs of unbounded dimension from a network, read as Fourier
coefficients of a learned periodic waveform."""

from .autodiff import Tape, Tensor
from .errors import AliasingError, ConfigError, MalformedStreamError, ShapeError, TrainingDiverged
from .fourier import (
    CoefficientSet,
    FrequencySet,
    coefficient_matrix,
    coefficients,
    cosine_coefficient,
    sine_coefficient,
)
from .model import ModelParams, embed_time, forward_model, init_params, load_params, one_hot, save_params
from .sampler import SampleGrid, Waveform, build_grid, sample_waveform
from .trainer import TrainConfig, TrainReport, adam_step, toy_loss, train

__version__ = "0.1.0"
