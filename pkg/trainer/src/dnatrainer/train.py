"""Rate-distortion training with straight-through quantization.

The objective is ``||x - x̂||² + λ·H(Q(z))``: mean squared reconstruction
error in the normalized pixel range plus a differentiable estimate of the
quantized latent's base-4 entropy.  Training runs in two stages with a
lowered learning rate in the second, and can inject Gaussian noise into
the quantized latent on a linear ramp so the decoder learns to absorb
channel perturbations.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from os import PathLike

import numpy as np
import torch

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .data import load_dataset, random_crops, synthetic_images
from .entropy import entropy_loss
from .errors import ConfigError, DivergenceError
from .model import build_autoencoder, seed_everything
from .quant import LATENT_BOUND, straight_through_quantize
from .schedule import NoiseSchedule


@dataclass(frozen=True)
class StageConfig:
    """One optimization stage: Adam at a fixed learning rate."""

    learning_rate: float
    epochs: int

    def __post_init__(self) -> None:
        if self.learning_rate <= 0.0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be non-negative, got {self.epochs}")


@dataclass(frozen=True)
class DataConfig:
    """Where training images come from.

    ``source`` is either ``"synthetic"`` (procedural corpus controlled by
    ``count``/``size``/``seed``) or a directory of PGM/PPM files.
    """

    source: str = "synthetic"
    count: int = 16
    size: int = 64
    seed: int = 11


@dataclass(frozen=True)
class TrainingConfig:
    """All hyperparameters of one training run; one model per step.

    Optimizer, initialization, and augmentation are implementation choices
    recorded here, not format contract.  Defaults follow the full-scale
    protocol (batches of 32 random 96x96 crops, 200 epochs at 1e-4 then
    500 at 1e-5); toy configs shrink every knob.
    """

    step: float
    lambda_rate: float = 0.01
    stage1: StageConfig = field(default_factory=lambda: StageConfig(1e-4, 200))
    stage2: StageConfig = field(default_factory=lambda: StageConfig(1e-5, 500))
    batch_size: int = 32
    crop: int = 96
    batches_per_epoch: int = 32
    in_channels: int = 3
    latent_channels: int = 4
    base_channels: int = 16
    slope: float = 0.2
    max_level: float | None = None
    seed: int = 0
    data: DataConfig = field(default_factory=DataConfig)

    def __post_init__(self) -> None:
        if self.step <= 0.0:
            raise ConfigError(f"step must be positive, got {self.step}")
        if self.lambda_rate < 0.0:
            raise ConfigError(f"lambda must be non-negative, got {self.lambda_rate}")
        if self.batch_size < 1 or self.crop < 4 or self.batches_per_epoch < 1:
            raise ConfigError("batch_size, crop, and batches_per_epoch must be positive")
        if self.crop % 4 != 0:
            raise ConfigError(f"crop must be divisible by the model stride 4, got {self.crop}")
        if self.max_level is not None and self.max_level < 0.0:
            raise ConfigError(f"max_level must be non-negative, got {self.max_level}")

    @property
    def total_epochs(self) -> int:
        return self.stage1.epochs + self.stage2.epochs

    @property
    def noise_max_level(self) -> float:
        """Peak training noise; defaults to two quantization cells."""
        return 2.0 * self.step if self.max_level is None else self.max_level


@dataclass(frozen=True)
class EpochStats:
    """Averages over one epoch, for history CSVs and sanity checks."""

    epoch: int
    stage: int
    noise_level: float
    loss: float
    distortion: float
    rate: float


def load_config(path: str | PathLike) -> TrainingConfig:
    """Parse a TOML hyperparameter file into a TrainingConfig."""
    with open(path, "rb") as handle:
        raw = tomllib.load(handle)
    try:
        stages = []
        for name in ("stage1", "stage2"):
            section = raw.get(name, {})
            stages.append(StageConfig(
                learning_rate=float(section["learning_rate"]),
                epochs=int(section["epochs"]),
            ))
        model = raw.get("model", {})
        data = raw.get("data", {})
        noise = raw.get("noise", {})
        return TrainingConfig(
            step=float(raw["q"]),
            lambda_rate=float(raw.get("lambda", 0.01)),
            stage1=stages[0],
            stage2=stages[1],
            batch_size=int(raw.get("batch_size", 32)),
            crop=int(raw.get("crop", 96)),
            batches_per_epoch=int(raw.get("batches_per_epoch", 32)),
            in_channels=int(model.get("in_channels", 3)),
            latent_channels=int(model.get("latent_channels", 4)),
            base_channels=int(model.get("base_channels", 16)),
            slope=float(model.get("slope", 0.2)),
            max_level=(float(noise["max_level"]) if "max_level" in noise else None),
            seed=int(raw.get("seed", 0)),
            data=DataConfig(
                source=str(data.get("source", "synthetic")),
                count=int(data.get("count", 16)),
                size=int(data.get("size", 64)),
                seed=int(data.get("seed", 11)),
            ),
        )
    except KeyError as exc:
        raise ConfigError(f"{path}: missing required key {exc}") from exc


def load_training_images(cfg: TrainingConfig) -> list[np.ndarray]:
    """Materialize the training corpus described by the config."""
    if cfg.data.source == "synthetic":
        images = synthetic_images(cfg.data.count, cfg.data.size, cfg.data.seed,
                                  channels=cfg.in_channels)
    else:
        images = load_dataset(cfg.data.source, cfg.in_channels)
    small = [img.shape[:2] for img in images if min(img.shape[:2]) < cfg.crop]
    if small:
        raise ConfigError(
            f"dataset too small: {len(small)} images are below the {cfg.crop}px crop"
        )
    return images


def build_model(cfg: TrainingConfig) -> tuple[torch.nn.Sequential, torch.nn.Sequential]:
    """Seeded model construction (the documented deterministic mode)."""
    seed_everything(cfg.seed)
    return build_autoencoder(
        in_channels=cfg.in_channels,
        latent_channels=cfg.latent_channels,
        base_channels=cfg.base_channels,
        slope=cfg.slope,
    )


def train_model(
    images: list[np.ndarray],
    cfg: TrainingConfig,
    schedule: NoiseSchedule | None = None,
) -> tuple[torch.nn.Sequential, torch.nn.Sequential, list[EpochStats]]:
    """Run both optimization stages and return the trained modules.

    ``schedule`` of ``max_level=0`` (or ``None``) trains the plain,
    noise-free regime; a positive peak level ramps Gaussian perturbations
    of the quantized latent linearly across the full run.  An epoch whose
    scheduled level is zero performs no noise draw at all, so its forward
    pass is bit-identical to the noise-free regime under the same seed.
    """
    if schedule is None:
        schedule = NoiseSchedule(max_level=0.0, total_epochs=max(cfg.total_epochs, 1))
    if schedule.total_epochs != max(cfg.total_epochs, 1):
        raise ConfigError(
            f"schedule spans {schedule.total_epochs} epochs, "
            f"config trains {cfg.total_epochs}"
        )
    encoder, decoder = build_model(cfg)
    crop_rng = np.random.default_rng(cfg.seed)
    parameters = list(encoder.parameters()) + list(decoder.parameters())
    history: list[EpochStats] = []
    epoch = 0
    for stage_index, stage in enumerate((cfg.stage1, cfg.stage2), start=1):
        if stage.epochs == 0:
            continue
        optimizer = torch.optim.Adam(parameters, lr=stage.learning_rate)
        for _ in range(stage.epochs):
            level = schedule.level(epoch)
            sums = np.zeros(3)
            for _ in range(cfg.batches_per_epoch):
                batch = random_crops(images, cfg.crop, cfg.batch_size, crop_rng)
                latent = encoder(batch)
                quantized = straight_through_quantize(latent, cfg.step)
                decoder_input = quantized
                if level > 0.0:
                    noisy = quantized + level * torch.randn_like(quantized)
                    decoder_input = torch.clamp(noisy, -LATENT_BOUND, LATENT_BOUND)
                restored = decoder(decoder_input)
                distortion = torch.mean((restored - batch) ** 2)
                rate = entropy_loss(quantized, cfg.step)
                loss = distortion + cfg.lambda_rate * rate
                if not torch.isfinite(loss):
                    raise DivergenceError(
                        f"non-finite loss at epoch {epoch} "
                        f"(distortion {float(distortion.detach())}, "
                        f"rate {float(rate.detach())})"
                    )
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                sums += (
                    float(loss.detach()),
                    float(distortion.detach()),
                    float(rate.detach()),
                )
            means = sums / cfg.batches_per_epoch
            history.append(EpochStats(
                epoch=epoch,
                stage=stage_index,
                noise_level=level,
                loss=means[0],
                distortion=means[1],
                rate=means[2],
            ))
            epoch += 1
    return encoder, decoder, history


def encode_latent(encoder: torch.nn.Sequential, image: np.ndarray) -> np.ndarray:
    """Forward one uint8 (H, W, C) image to its float32 (C, H, W) latent."""
    from .data import normalize_batch

    batch = normalize_batch(image[None])
    with torch.no_grad():
        latent = encoder(batch)
    return latent[0].numpy().astype(np.float32)
