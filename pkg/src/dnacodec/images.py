"""8-bit image file IO and padding helpers.

Binary PGM (grayscale) and PPM (color) are the canonical formats because
their byte layout is exactly specifiable.  PNG works when Pillow is
installed.  In memory every image is a uint8 array of shape (H, W, C) with
C equal to 1 or 3.
"""

from __future__ import annotations

from os import PathLike
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError

MAXVAL = 255


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Whitespace separates header tokens; '#' starts a comment to end of line.
    while pos < len(data):
        byte = data[pos : pos + 1]
        if byte == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif byte.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise FormatError("image header ended unexpectedly")
    return data[start:pos], pos


def _parse_pnm(data: bytes) -> np.ndarray:
    magic, pos = _read_token(data, 0)
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported image magic {magic!r}, expected P5 or P6")
    channels = 1 if magic == b"P5" else 3
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _read_token(data, pos)
        try:
            value = int(token)
        except ValueError:
            raise FormatError(f"{name} is not an integer: {token!r}") from None
        if value <= 0:
            raise FormatError(f"{name} must be positive, got {value}")
        fields.append(value)
    width, height, maxval = fields
    if maxval != MAXVAL:
        raise FormatError(f"only maxval {MAXVAL} is supported, got {maxval}")
    # Exactly one whitespace byte separates the header from the raster.
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise FormatError("missing whitespace before the raster")
    pos += 1
    expected = width * height * channels
    raster = data[pos : pos + expected]
    if len(raster) != expected:
        raise FormatError(
            f"raster holds {len(raster)} bytes, header promises {expected}"
        )
    pixels = np.frombuffer(raster, dtype=np.uint8)
    return pixels.reshape(height, width, channels).copy()


def _serialize_pnm(image: np.ndarray) -> bytes:
    channels = image.shape[2]
    magic = b"P5" if channels == 1 else b"P6"
    header = b"%s\n%d %d\n%d\n" % (magic, image.shape[1], image.shape[0], MAXVAL)
    return header + np.ascontiguousarray(image, dtype=np.uint8).tobytes()


def _check_image(image: np.ndarray) -> None:
    if image.ndim != 3 or image.shape[2] not in (1, 3):
        raise ConfigError(
            f"expected an (H, W, 1) or (H, W, 3) image, got shape {image.shape}"
        )
    if image.dtype != np.uint8:
        raise ConfigError(f"expected uint8 pixels, got {image.dtype}")


def load_image(path: str | PathLike) -> np.ndarray:
    """Read an image file as a uint8 (H, W, C) array."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".ppm", ".pnm"):
        return _parse_pnm(path.read_bytes())
    if suffix == ".png":
        try:
            from PIL import Image
        except ImportError:
            raise ConfigError(
                "PNG support needs the optional Pillow dependency"
            ) from None
        with Image.open(path) as img:
            mode = "L" if img.mode in ("1", "L", "I", "I;16") else "RGB"
            array = np.asarray(img.convert(mode), dtype=np.uint8)
        if array.ndim == 2:
            array = array[:, :, None]
        return array
    raise ConfigError(f"unsupported image extension {suffix!r}")


def save_image(image: np.ndarray, path: str | PathLike) -> None:
    """Write a uint8 (H, W, C) array to a file chosen by extension."""
    _check_image(image)
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".ppm", ".pnm"):
        if suffix == ".pgm" and image.shape[2] != 1:
            raise ConfigError("PGM stores a single channel")
        if suffix == ".ppm" and image.shape[2] != 3:
            raise ConfigError("PPM stores three channels")
        path.write_bytes(_serialize_pnm(image))
        return
    if suffix == ".png":
        try:
            from PIL import Image
        except ImportError:
            raise ConfigError(
                "PNG support needs the optional Pillow dependency"
            ) from None
        array = image[:, :, 0] if image.shape[2] == 1 else image
        Image.fromarray(array).save(path)
        return
    raise ConfigError(f"unsupported image extension {suffix!r}")


def _pad_split(size: int, divisor: int) -> tuple[int, int]:
    total = (-size) % divisor
    return total // 2, total - total // 2


def pad_to_multiple(image: np.ndarray, divisor: int) -> np.ndarray:
    """Edge-pad an image so both dimensions divide by `divisor`.

    Padding is split evenly between the two sides (the extra row or column
    going after), so crop_to_size inverts it exactly.
    """
    if divisor < 1:
        raise ConfigError(f"divisor must be >= 1, got {divisor}")
    top, bottom = _pad_split(image.shape[0], divisor)
    left, right = _pad_split(image.shape[1], divisor)
    if top == bottom == left == right == 0:
        return image
    return np.pad(image, ((top, bottom), (left, right), (0, 0)), mode="edge")


def crop_to_size(image: np.ndarray, height: int, width: int) -> np.ndarray:
    """Undo pad_to_multiple given the original dimensions."""
    if height > image.shape[0] or width > image.shape[1]:
        raise ConfigError(
            f"cannot crop {image.shape[1]}x{image.shape[0]} to {width}x{height}"
        )
    top = (image.shape[0] - height) // 2
    left = (image.shape[1] - width) // 2
    return image[top : top + height, left : left + width, :]
