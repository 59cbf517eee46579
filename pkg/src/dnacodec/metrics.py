"""Rate and distortion accounting for the codec pipeline.

Entropy is measured in base 4, so it reads directly as nucleotides per latent
component.  Probabilities come from a single histogram pooled over every
component of one latent tensor, not from per-component marginals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codec import NucleotideSequence
from .errors import DomainError


@dataclass(frozen=True)
class SymbolHistogram:
    """Pooled symbol counts; total is the number of components observed."""

    counts: dict[int, int]
    total: int


@dataclass(frozen=True)
class RateReport:
    entropy_nt_per_component: float
    nucleotides_total: int
    nt_per_pixel: float
    psnr_db: float


def histogram(symbols: np.ndarray) -> SymbolHistogram:
    """Count each symbol value, pooled over all components."""
    flat = np.asarray(symbols).reshape(-1)
    if flat.size == 0:
        raise DomainError("cannot build a histogram of an empty tensor")
    values, counts = np.unique(flat, return_counts=True)
    return SymbolHistogram(
        counts={int(v): int(c) for v, c in zip(values, counts)},
        total=int(flat.size),
    )


def entropy_nt(hist: SymbolHistogram) -> float:
    """Base-4 entropy of a histogram, in nucleotides per component."""
    if hist.total <= 0:
        raise DomainError("histogram total must be positive")
    p = np.array([c for c in hist.counts.values() if c > 0], dtype=np.float64)
    p /= hist.total
    # log_4(x) = log_2(x) / 2, and log_2 is exact on powers of two, which
    # keeps the uniform-occupancy reference values exact.
    return float(-(p * (np.log2(p) / 2.0)).sum())


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio between two 8-bit images, in dB.

    Identical images return the +infinity sentinel so result tables stay
    total under lossless settings.
    """
    if a.shape != b.shape:
        raise DomainError(f"image shapes differ: {a.shape} vs {b.shape}")
    diff = a.astype(np.float64) - b.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 * 255.0 / mse)


def rate_report(
    seq: NucleotideSequence,
    symbols: np.ndarray,
    original: np.ndarray,
    reconstructed: np.ndarray,
) -> RateReport:
    """Aggregate entropy, storage, and distortion figures for one image."""
    height, width = original.shape[0], original.shape[1]
    hist = histogram(symbols)
    return RateReport(
        entropy_nt_per_component=entropy_nt(hist),
        nucleotides_total=len(seq.bases),
        nt_per_pixel=len(seq.bases) / float(width * height),
        psnr_db=psnr(original, reconstructed),
    )
