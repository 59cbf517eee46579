"""Noisy-channel models.

The substitution channel flips each nucleotide independently with the
configured rate, always to one of the three other bases (uniformly).
The Gaussian latent-noise model is the training-time stand-in for that
channel: additive i.i.d. noise on latent components, clamped back to the
latent bound.

RNG contract: all draws come from numpy's PCG64 seeded with
SeedSequence((seed, nonce)), so identical (seed, nonce, input) always
reproduces the same output, on any platform.  Distinct nonces give
independent streams for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .codec import NucleotideSequence
from .errors import ConfigError
from .quantizer import LATENT_BOUND

_BASES = np.frombuffer(b"ACGT", dtype=np.uint8)
_BASE_INDEX = np.full(256, 255, dtype=np.uint8)
for _i, _b in enumerate(b"ACGT"):
    _BASE_INDEX[_b] = _i


def _generator(seed: int, nonce: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, nonce))))


@dataclass(frozen=True)
class SubstitutionChannel:
    rate: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 <= self.rate <= 1.0):
            raise ConfigError(f"substitution rate must lie in [0, 1], got {self.rate}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class LatentNoiseModel:
    sigma: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ConfigError(f"sigma must be non-negative, got {self.sigma}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be an unsigned 64-bit integer")


def substitute(
    seq: NucleotideSequence, ch: SubstitutionChannel, nonce: int = 0
) -> NucleotideSequence:
    """Corrupt each base independently with probability ch.rate.

    A substituted base is replaced by one of the three OTHER bases with
    equal probability, so rate=1 changes every position.  Length and
    metadata are preserved.
    """
    if len(seq.bases) == 0 or ch.rate == 0.0:
        return replace(seq, bases=seq.bases)
    rng = _generator(ch.seed, nonce)
    values = _BASE_INDEX[np.frombuffer(seq.bases.encode("ascii"), dtype=np.uint8)]
    hit = rng.random(values.shape[0]) < ch.rate
    # offset in {1,2,3} guarantees the new base differs from the old one
    offsets = rng.integers(1, 4, size=values.shape[0], dtype=np.uint8)
    corrupted = np.where(hit, (values + offsets) % 4, values)
    return replace(seq, bases=_BASES[corrupted].tobytes().decode("ascii"))


def perturb_latent(z: np.ndarray, m: LatentNoiseModel, nonce: int = 0) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise, then clamp to the latent bound."""
    z = np.asarray(z, dtype=np.float64)
    if m.sigma == 0.0:
        return z.copy()
    rng = _generator(m.seed, nonce)
    noisy = z + rng.normal(0.0, m.sigma, size=z.shape)
    return np.clip(noisy, -LATENT_BOUND, LATENT_BOUND)
