"""Binary serialization of network weights.

Layout (all integers little-endian):

    magic  b"DNAW"
    version               u32 (currently 1)
    latent_channels       u32
    quantizer_step_hint   f32
    encoder section, decoder section:
        layer_count       u32
        per layer:
            kind          u8  (conv=1, transposed_conv=2, leaky_relu=3,
                               tanh=4, residual_begin=5, residual_end=6,
                               subpixel=7)
            slope         f32 (leaky_relu only)
            factor        u32 (subpixel only)
            out, in, kh, kw, stride   u32 x 5
            padding       u32
            parameters    f32 x (out*in*kh*kw + out), weights row-major
                          in (out, in, kh, kw) order then bias (conv kinds
                          only, absent otherwise)
    checksum              u64, FNV-1a 64 of every preceding byte

The checksum detects truncation and bit corruption before any layer is
materialized.
"""

from __future__ import annotations

import struct
from os import PathLike

import numpy as np

from .errors import FormatError
from .nn import (
    KIND_CONV,
    KIND_LEAKY_RELU,
    KIND_RESIDUAL_BEGIN,
    KIND_RESIDUAL_END,
    KIND_SUBPIXEL,
    KIND_TANH,
    KIND_TRANSPOSED_CONV,
    LayerSpec,
    NetworkWeights,
    validate_weights,
)

MAGIC = b"DNAW"
VERSION = 1

_KIND_CODES = {
    KIND_CONV: 1,
    KIND_TRANSPOSED_CONV: 2,
    KIND_LEAKY_RELU: 3,
    KIND_TANH: 4,
    KIND_RESIDUAL_BEGIN: 5,
    KIND_RESIDUAL_END: 6,
    KIND_SUBPIXEL: 7,
}
_CODE_KINDS = {code: kind for kind, code in _KIND_CODES.items()}

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash of a byte string."""
    value = FNV_OFFSET
    for byte in data:
        value = ((value ^ byte) * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return value


def _pack_layer(layer: LayerSpec) -> bytes:
    parts = [struct.pack("<B", _KIND_CODES[layer.kind])]
    if layer.kind == KIND_LEAKY_RELU:
        parts.append(struct.pack("<f", layer.slope))
    elif layer.kind == KIND_SUBPIXEL:
        parts.append(struct.pack("<I", layer.factor))
    parts.append(
        struct.pack(
            "<6I",
            layer.out_channels,
            layer.in_channels,
            layer.kernel_h,
            layer.kernel_w,
            layer.stride,
            layer.padding,
        )
    )
    if layer.kind in (KIND_CONV, KIND_TRANSPOSED_CONV):
        parts.append(np.ascontiguousarray(layer.weights, dtype="<f4").tobytes())
        parts.append(np.ascontiguousarray(layer.bias, dtype="<f4").tobytes())
    return b"".join(parts)


def serialize_weights(net: NetworkWeights) -> bytes:
    """Encode a validated network as DNAW bytes, checksum included."""
    validate_weights(net)
    parts = [
        MAGIC,
        struct.pack("<IIf", VERSION, net.latent_channels, net.quantizer_step_hint),
    ]
    for layers in (net.encoder_layers, net.decoder_layers):
        parts.append(struct.pack("<I", len(layers)))
        parts.extend(_pack_layer(layer) for layer in layers)
    body = b"".join(parts)
    return body + struct.pack("<Q", fnv1a64(body))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.offset + size > len(self.data):
            raise FormatError(
                f"weights file truncated at byte {self.offset}, "
                f"needed {size} more"
            )
        values = struct.unpack_from(fmt, self.data, self.offset)
        self.offset += size
        return values

    def take_f32_array(self, count: int, shape: tuple[int, ...]) -> np.ndarray:
        size = 4 * count
        if self.offset + size > len(self.data):
            raise FormatError(
                f"weights file truncated at byte {self.offset}, "
                f"needed {size} more"
            )
        flat = np.frombuffer(self.data, dtype="<f4", count=count, offset=self.offset)
        self.offset += size
        return flat.reshape(shape).astype(np.float32)


def _unpack_layer(reader: _Reader, where: str) -> LayerSpec:
    (code,) = reader.take("<B")
    kind = _CODE_KINDS.get(code)
    if kind is None:
        raise FormatError(f"{where}: unknown layer code {code}")
    slope = 0.0
    factor = 0
    if kind == KIND_LEAKY_RELU:
        (slope,) = reader.take("<f")
    elif kind == KIND_SUBPIXEL:
        (factor,) = reader.take("<I")
    out_c, in_c, kh, kw, stride, padding = reader.take("<6I")
    weights = bias = None
    if kind in (KIND_CONV, KIND_TRANSPOSED_CONV):
        weights = reader.take_f32_array(out_c * in_c * kh * kw, (out_c, in_c, kh, kw))
        bias = reader.take_f32_array(out_c, (out_c,))
    return LayerSpec(
        kind=kind,
        out_channels=out_c,
        in_channels=in_c,
        kernel_h=kh,
        kernel_w=kw,
        stride=stride,
        padding=padding,
        slope=slope,
        factor=factor,
        weights=weights,
        bias=bias,
    )


def deserialize_weights(data: bytes) -> NetworkWeights:
    """Decode DNAW bytes; raise FormatError on any structural problem."""
    if len(data) < len(MAGIC) + 8:
        raise FormatError("weights file shorter than its checksum")
    body, (stored,) = data[:-8], struct.unpack("<Q", data[-8:])
    actual = fnv1a64(body)
    if stored != actual:
        raise FormatError(
            f"weights checksum mismatch: stored {stored:#018x}, "
            f"computed {actual:#018x}"
        )
    reader = _Reader(body)
    magic = bytes(reader.take("<4s")[0])
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    version, latent_channels = reader.take("<II")
    if version != VERSION:
        raise FormatError(f"unsupported weights version {version}")
    (step_hint,) = reader.take("<f")
    sections = []
    for name in ("encoder", "decoder"):
        (count,) = reader.take("<I")
        sections.append(
            tuple(
                _unpack_layer(reader, f"{name} layer {index}")
                for index in range(count)
            )
        )
    if reader.offset != len(body):
        raise FormatError(
            f"{len(body) - reader.offset} trailing bytes after the last layer"
        )
    net = NetworkWeights(
        encoder_layers=sections[0],
        decoder_layers=sections[1],
        latent_channels=latent_channels,
        quantizer_step_hint=float(step_hint),
    )
    validate_weights(net)
    return net


def save_weights(net: NetworkWeights, path: str | PathLike) -> None:
    with open(path, "wb") as handle:
        handle.write(serialize_weights(net))


def load_weights(path: str | PathLike) -> NetworkWeights:
    with open(path, "rb") as handle:
        return deserialize_weights(handle.read())


def weights_checksum(data: bytes) -> int:
    """Checksum stored in a serialized weights blob (its final 8 bytes)."""
    if len(data) < 8:
        raise FormatError("weights file shorter than its checksum")
    return struct.unpack("<Q", data[-8:])[0]
