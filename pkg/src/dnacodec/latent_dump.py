"""Latent-tensor debug dump.

A minimal interchange file for comparing forward passes across
implementations: three little-endian u32 values (channels, height, width)
followed by the flat latent as little-endian 32-bit floats in C order.
"""

from __future__ import annotations

import struct
from os import PathLike

import numpy as np

from .errors import FormatError

_HEADER = struct.Struct("<3I")


def write_latent_dump(latent: np.ndarray, path: str | PathLike) -> None:
    """Write a (channels, height, width) latent tensor."""
    if latent.ndim != 3:
        raise FormatError(f"latent dump needs a 3-D tensor, got shape {latent.shape}")
    array = np.ascontiguousarray(latent, dtype="<f4")
    with open(path, "wb") as handle:
        handle.write(_HEADER.pack(*array.shape))
        handle.write(array.tobytes())


def read_latent_dump(path: str | PathLike) -> np.ndarray:
    """Read a latent dump back as a float32 (channels, height, width) array."""
    with open(path, "rb") as handle:
        data = handle.read()
    if len(data) < _HEADER.size:
        raise FormatError("latent dump shorter than its shape header")
    shape = _HEADER.unpack_from(data)
    expected = _HEADER.size + 4 * shape[0] * shape[1] * shape[2]
    if len(data) != expected:
        raise FormatError(
            f"latent dump is {len(data)} bytes, expected {expected} for shape {shape}"
        )
    flat = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    return flat.reshape(shape).astype(np.float32)
