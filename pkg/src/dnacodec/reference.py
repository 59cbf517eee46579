"""Deterministic reference transform: blockwise orthonormal cosine transform.

Serves as a drop-in stand-in for learned weights so the whole pipeline can be
exercised without a training run.  Pixels are normalized to [-1, 1], split
into 8x8 blocks per channel, transformed with the orthonormal type-II cosine
basis, and the coefficients are divided by 8 so every latent value provably
stays inside [-1, 1] (each coefficient of an orthonormal 8x8 transform of
values in [-1, 1] is bounded by 8 in magnitude).

All arithmetic is float64; the inverse is the exact adjoint, so round-trips
are lossless up to 8-bit pixel rounding.
"""

from __future__ import annotations

import numpy as np

from .errors import InferenceError

BLOCK = 8
COEFF_SCALE = 8.0


def _cosine_matrix() -> np.ndarray:
    k = np.arange(BLOCK, dtype=np.float64)[:, None]
    x = np.arange(BLOCK, dtype=np.float64)[None, :]
    mat = np.cos((2.0 * x + 1.0) * k * np.pi / (2.0 * BLOCK))
    mat[0, :] *= np.sqrt(1.0 / BLOCK)
    mat[1:, :] *= np.sqrt(2.0 / BLOCK)
    return mat


_COS = _cosine_matrix()


def _check_dims(height: int, width: int) -> None:
    if height % BLOCK != 0 or width % BLOCK != 0:
        raise InferenceError(
            f"image dimensions {width}x{height} must be divisible by {BLOCK}"
        )


def _to_blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    return plane.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK).transpose(0, 2, 1, 3)


def _from_blocks(blocks: np.ndarray) -> np.ndarray:
    nby, nbx = blocks.shape[0], blocks.shape[1]
    return blocks.transpose(0, 2, 1, 3).reshape(nby * BLOCK, nbx * BLOCK)


def reference_encode(image: np.ndarray) -> np.ndarray:
    """Map a uint8 (H, W, C) image to a float64 (C, H, W) latent in [-1, 1]."""
    if image.ndim != 3:
        raise InferenceError(f"expected an (H, W, C) image, got shape {image.shape}")
    height, width, channels = image.shape
    _check_dims(height, width)
    values = image.astype(np.float64) / 127.5 - 1.0
    latent = np.empty((channels, height, width), dtype=np.float64)
    for c in range(channels):
        blocks = _to_blocks(values[:, :, c])
        coeff = _COS @ blocks @ _COS.T
        latent[c] = _from_blocks(coeff / COEFF_SCALE)
    # The bound holds mathematically; rounding may overshoot by an ulp.
    return np.clip(latent, -1.0, 1.0)


def reference_decode(latent: np.ndarray) -> np.ndarray:
    """Invert reference_encode; returns a uint8 (H, W, C) image."""
    if latent.ndim != 3:
        raise InferenceError(f"expected a (C, H, W) latent, got shape {latent.shape}")
    channels, height, width = latent.shape
    _check_dims(height, width)
    image = np.empty((height, width, channels), dtype=np.uint8)
    for c in range(channels):
        coeff = _to_blocks(latent[c].astype(np.float64)) * COEFF_SCALE
        values = _COS.T @ coeff @ _COS
        plane = np.clip(np.rint((values + 1.0) * 127.5), 0, 255)
        image[:, :, c] = _from_blocks(plane).astype(np.uint8)
    return image
