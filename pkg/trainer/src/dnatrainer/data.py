"""Training data: a synthetic image corpus and random-crop batching.

The generator synthesizes smooth band-limited color fields with occasional
hard edges — enough texture variety to train a small autoencoder without
any external dataset.  Images can also be loaded from binary PGM/PPM
files, the codec's native formats.  All images are (height, width,
channels) uint8 arrays.
"""

from __future__ import annotations

from os import PathLike
from pathlib import Path

import numpy as np
import torch

from .errors import ConfigError, FormatError


def synthetic_images(count: int, size: int, seed: int,
                     channels: int = 3) -> list[np.ndarray]:
    """Generate ``count`` uint8 images of ``size``x``size``x``channels``.

    Each image blends random low-frequency sinusoids with a random step
    edge and light pixel noise; color channels share the structure but get
    independent gains and offsets, like tinted natural content.
    """
    if count < 1 or size < 8:
        raise ConfigError(f"need count >= 1 and size >= 8, got {count}, {size}")
    if channels not in (1, 3):
        raise ConfigError(f"channels must be 1 or 3, got {channels}")
    rng = np.random.default_rng(seed)
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64) / size
    images = []
    for _ in range(count):
        field = np.zeros((size, size))
        for _ in range(rng.integers(2, 5)):
            fy, fx = rng.uniform(0.5, 4.0, size=2)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            field += rng.uniform(0.3, 1.0) * np.sin(
                2.0 * np.pi * (fy * ys + fx * xs) + phase
            )
        # A random half-plane step adds sharp structure.
        normal = rng.normal(size=2)
        offset = rng.uniform(0.3, 0.7)
        step = ((normal[0] * ys + normal[1] * xs) > offset * normal.sum()).astype(float)
        field += rng.uniform(0.2, 0.8) * step
        low, high = field.min(), field.max()
        base = (field - low) / max(high - low, 1e-9)
        planes = []
        for _ in range(channels):
            gain = rng.uniform(0.6, 1.0)
            lift = rng.uniform(0.0, 1.0 - gain)
            plane = gain * base + lift + rng.normal(scale=0.015, size=base.shape)
            planes.append(plane)
        stacked = np.stack(planes, axis=-1)
        images.append(np.clip(np.rint(stacked * 255.0), 0, 255).astype(np.uint8))
    return images


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(data):
        if data[pos : pos + 1].isspace():
            pos += 1
        elif data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise FormatError("truncated image header")
    return data[start:pos], pos


def load_image(path: str | PathLike) -> np.ndarray:
    """Read a binary PGM (P5) or PPM (P6) file as (H, W, C) uint8."""
    with open(path, "rb") as handle:
        data = handle.read()
    tokens = []
    pos = 0
    for _ in range(4):
        token, pos = _read_token(data, pos)
        tokens.append(token)
    if tokens[0] == b"P5":
        channels = 1
    elif tokens[0] == b"P6":
        channels = 3
    else:
        raise FormatError(f"{path}: not a binary PGM/PPM file")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise FormatError(f"{path}: unsupported maxval {maxval}")
    count = width * height * channels
    raster = data[pos + 1 : pos + 1 + count]
    if len(raster) != count:
        raise FormatError(f"{path}: raster has {len(raster)} bytes, expected {count}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, channels).copy()


def save_image(image: np.ndarray, path: str | PathLike) -> None:
    """Write a (H, W, C) uint8 array as binary PGM (C=1) or PPM (C=3)."""
    if image.ndim != 3 or image.dtype != np.uint8 or image.shape[2] not in (1, 3):
        raise ConfigError(
            f"expected an (H, W, 1|3) uint8 array, got {image.dtype} {image.shape}"
        )
    height, width, channels = image.shape
    magic = b"P5" if channels == 1 else b"P6"
    with open(path, "wb") as handle:
        handle.write(b"%s\n%d %d\n255\n" % (magic, width, height))
        handle.write(image.tobytes())


def load_dataset(directory: str | PathLike, channels: int) -> list[np.ndarray]:
    """Load every PGM/PPM image under ``directory`` with ``channels`` planes."""
    paths = sorted(
        p for p in Path(directory).iterdir() if p.suffix in (".pgm", ".ppm", ".pnm")
    )
    if not paths:
        raise ConfigError(f"no PGM/PPM images found in {directory}")
    images = [load_image(p) for p in paths]
    for path, img in zip(paths, images):
        if img.shape[2] != channels:
            raise ConfigError(
                f"{path}: has {img.shape[2]} channels, the model expects {channels}"
            )
    return images


def normalize_batch(images: np.ndarray) -> torch.Tensor:
    """Map uint8 crops (N, H, W, C) to normalized float tensors (N, C, H, W)."""
    z = images.astype(np.float32) / 127.5 - 1.0
    return torch.from_numpy(z.transpose(0, 3, 1, 2)).contiguous()


def random_crops(images: list[np.ndarray], crop: int, batch_size: int,
                 rng: np.random.Generator) -> torch.Tensor:
    """Sample a batch of random square crops across the corpus."""
    if any(img.shape[0] < crop or img.shape[1] < crop for img in images):
        raise ConfigError(f"every image must be at least {crop}x{crop}")
    channels = images[0].shape[2]
    out = np.empty((batch_size, crop, crop, channels), dtype=np.uint8)
    picks = rng.integers(0, len(images), size=batch_size)
    for slot, pick in enumerate(picks):
        img = images[pick]
        top = rng.integers(0, img.shape[0] - crop + 1)
        left = rng.integers(0, img.shape[1] - crop + 1)
        out[slot] = img[top : top + crop, left : left + crop]
    return normalize_batch(out)
