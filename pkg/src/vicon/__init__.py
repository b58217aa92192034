"""Self-organising visual cortex network (VICON).

A two-layer network of sigmoidal neurons trained to minimise the expected
squared reconstruction error of its own input, where the code passed
between the layers is a partitioned-mixture posterior: each neuron's raw
response is normalised within a local inhibition neighbourhood, the
overlapping local posteriors are averaged, and a row-stochastic leakage
kernel smears the result onto neighbouring neurons.  Trained on two-retina
input the network self-organises ocular dominance stripes; trained on
natural texture patches it develops orientation-selective receptive
fields arranged in maps.
"""

from ._backend import BACKEND_NAME, available_backends
from .analysis import (
    OcularityProfile,
    StripeStats,
    dominance_map_2d,
    label_autocorr_length,
    montage,
    ocularity_profile,
    reconstruct,
    stripe_stats,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .data import SyntheticRetinaSource, TexturePatchSource, brightness_pair, generate_texture
from .errors import (
    CheckpointError,
    ConfigError,
    DataError,
    DegenerateResponseError,
    FlatProfileError,
    NumericalError,
    TrainingDivergedError,
    ViconError,
)
from .imageio import load_pgm, write_pgm, write_ppm
from .model import (
    NetworkParams,
    PosteriorState,
    init_params,
    pmd_posterior,
    raw_response,
    raw_responses,
)
from .objective import (
    ErrorIntermediates,
    GradientSet,
    batch_gradients,
    batch_objective,
    error_intermediates,
    sample_gradients,
    sample_objective,
    sample_objective_and_gradients,
)
from .topology import Topology, build_topology
from .trainer import Phase, Schedule, TrainerState, train, train_step

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "available_backends",
    "build_topology",
    "Topology",
    "NetworkParams",
    "PosteriorState",
    "init_params",
    "raw_response",
    "raw_responses",
    "pmd_posterior",
    "GradientSet",
    "ErrorIntermediates",
    "sample_objective",
    "sample_gradients",
    "sample_objective_and_gradients",
    "batch_objective",
    "batch_gradients",
    "error_intermediates",
    "TrainerState",
    "Phase",
    "Schedule",
    "train",
    "train_step",
    "SyntheticRetinaSource",
    "TexturePatchSource",
    "brightness_pair",
    "generate_texture",
    "load_pgm",
    "write_pgm",
    "write_ppm",
    "OcularityProfile",
    "StripeStats",
    "ocularity_profile",
    "stripe_stats",
    "dominance_map_2d",
    "label_autocorr_length",
    "montage",
    "reconstruct",
    "save_checkpoint",
    "load_checkpoint",
    "ViconError",
    "ConfigError",
    "DataError",
    "CheckpointError",
    "NumericalError",
    "DegenerateResponseError",
    "TrainingDivergedError",
    "FlatProfileError",
]
