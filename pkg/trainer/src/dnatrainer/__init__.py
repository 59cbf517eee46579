"""Trainer for the DNA-storage image codec.

Optimizes a convolutional autoencoder under a rate-distortion objective
with straight-through quantization, optionally ramping Gaussian noise into
the quantized latent so the decoder tolerates channel errors, and exports
the result in the codec's interchange weight format.
"""

from .data import load_image, random_crops, save_image, synthetic_images
from .entropy import cell_centers, entropy_loss, soft_histogram
from .errors import ConfigError, DivergenceError, FormatError, TrainerError
from .latent_dump import read_latent_dump, write_latent_dump
from .model import Residual, build_autoencoder, seed_everything
from .quant import LATENT_BOUND, hard_quantize, straight_through_quantize
from .schedule import NoiseSchedule
from .train import (
    DataConfig,
    EpochStats,
    StageConfig,
    TrainingConfig,
    build_model,
    encode_latent,
    load_config,
    load_training_images,
    train_model,
)
from .weights import (
    LayerRecord,
    WeightsFile,
    deserialize,
    export_model,
    import_model,
    module_records,
    records_to_module,
    serialize,
)

__version__ = "0.1.0"
