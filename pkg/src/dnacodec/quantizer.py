"""Uniform latent quantizer.

Latents are real tensors bounded to [-bound, +bound] (the analysis
transform ends in tanh, so bound is fixed at 1.0).  The quantizer maps a
value z to the integer symbol k = floor(z/q + 1/2); the reconstruction
value is k*q.  Symbols, not reconstruction values, are what the DNA
codebook layer maps to codewords.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

LATENT_BOUND = 1.0


@dataclass(frozen=True)
class QuantizerConfig:
    """Step width q of the uniform quantizer; bound is the latent half-range."""

    step: float
    bound: float = LATENT_BOUND

    def __post_init__(self) -> None:
        if not (self.step > 0):
            raise ConfigError(f"quantizer step must be positive, got {self.step}")
        if not (self.bound > 0):
            raise ConfigError(f"latent bound must be positive, got {self.bound}")


def symbol_range(cfg: QuantizerConfig) -> tuple[int, int, int]:
    """Return (k_min, k_max, count) of symbols reachable from [-bound, bound].

    Note the asymmetry of floor(x + 1/2): for q > bound the negative side
    collapses onto k=0 while the positive side still reaches k=1.
    """
    k_min = int(np.floor(-cfg.bound / cfg.step + 0.5))
    k_max = int(np.floor(cfg.bound / cfg.step + 0.5))
    return k_min, k_max, k_max - k_min + 1


def quantize(z: np.ndarray, cfg: QuantizerConfig) -> np.ndarray:
    """Quantize a bounded latent tensor to integer symbols, elementwise.

    Raises DomainError naming the first offending index if any |z| exceeds
    the bound.  Shape is preserved; the result dtype is int64.
    """
    z = np.asarray(z)
    out_of_bound = np.abs(z) > cfg.bound
    if out_of_bound.any():
        idx = np.unravel_index(int(np.argmax(out_of_bound)), z.shape)
        raise DomainError(
            f"latent value {z[idx]!r} at index {tuple(int(i) for i in idx)} "
            f"exceeds bound {cfg.bound}"
        )
    # float64 keeps z/q exact for dyadic steps and accurate otherwise
    return np.floor(z.astype(np.float64) / cfg.step + 0.5).astype(np.int64)


def dequantize(symbols: np.ndarray, cfg: QuantizerConfig) -> np.ndarray:
    """Map symbols back to reconstruction values k*q, clamped to the bound.

    Clamping matters when k_max*q exceeds the bound (e.g. q=0.4 reaches
    k=3, but 1.2 lies outside the decoder's domain).
    """
    symbols = np.asarray(symbols)
    k_min, k_max, _ = symbol_range(cfg)
    bad = (symbols < k_min) | (symbols > k_max)
    if bad.any():
        idx = np.unravel_index(int(np.argmax(bad)), symbols.shape)
        raise DomainError(
            f"symbol {int(symbols[idx])} at index {tuple(int(i) for i in idx)} "
            f"outside range [{k_min}, {k_max}] for step {cfg.step}"
        )
    values = symbols.astype(np.float64) * cfg.step
    return np.clip(values, -cfg.bound, cfg.bound)
