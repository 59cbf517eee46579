"""Noise-level ramp used during robustness training."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class NoiseSchedule:
    """Linear ramp from zero to ``max_level`` over ``total_epochs`` epochs.

    The first epoch always trains noise-free so the autoencoder learns a
    clean reconstruction before perturbations are introduced; the final
    epoch trains at full level.
    """

    max_level: float
    total_epochs: int

    def __post_init__(self) -> None:
        if self.max_level < 0.0:
            raise ConfigError(f"max_level must be non-negative, got {self.max_level}")
        if self.total_epochs < 1:
            raise ConfigError(f"total_epochs must be at least 1, got {self.total_epochs}")

    def level(self, epoch: int) -> float:
        """Noise standard deviation for ``epoch`` (0-based)."""
        if epoch < 0:
            raise ConfigError(f"epoch must be non-negative, got {epoch}")
        if self.total_epochs == 1:
            return 0.0
        frac = min(epoch, self.total_epochs - 1) / (self.total_epochs - 1)
        return self.max_level * frac
