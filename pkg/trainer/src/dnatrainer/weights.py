"""Interchange weight format: export trained models, import them back.

The codec's inference engine consumes a flat binary file (magic ``DNAW``)
describing encoder and decoder as sequences of layer records.  This module
implements that contract from the training side: it flattens torch modules
into records, serializes them, and can rebuild equivalent torch modules
from a file — which is how parity between the two implementations is
checked end to end.

Layout (little-endian throughout)::

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
            out, in, kh, kw, stride, padding   u32 x 6
            parameters    f32 weights in (out, in, kh, kw) order, then
                          bias (conv kinds only)
    checksum              u64, FNV-1a 64 of every preceding byte

Both convolution kinds store weights with the output channel as the
leading axis; torch's ``ConvTranspose2d`` keeps ``(in, out, kh, kw)``
internally, so its weight tensor is axis-swapped on export and import.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from os import PathLike

import numpy as np
import torch
from torch import nn

from .errors import ConfigError, FormatError
from .model import Residual

MAGIC = b"DNAW"
VERSION = 1

CODE_CONV = 1
CODE_TRANSPOSED_CONV = 2
CODE_LEAKY_RELU = 3
CODE_TANH = 4
CODE_RESIDUAL_BEGIN = 5
CODE_RESIDUAL_END = 6
CODE_SUBPIXEL = 7

_CONV_CODES = (CODE_CONV, CODE_TRANSPOSED_CONV)
_KNOWN_CODES = frozenset(range(1, 8))

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash of a byte string."""
    value = FNV_OFFSET
    for byte in data:
        value = ((value ^ byte) * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return value


@dataclass(frozen=True)
class LayerRecord:
    """One serialized layer.  Non-conv kinds keep zeros in the shape fields."""

    code: int
    out_channels: int = 0
    in_channels: int = 0
    kernel_h: int = 0
    kernel_w: int = 0
    stride: int = 0
    padding: int = 0
    slope: float = 0.0
    factor: int = 0
    weights: np.ndarray | None = None
    bias: np.ndarray | None = None


@dataclass(frozen=True)
class WeightsFile:
    """Full contents of an interchange weight file."""

    encoder: tuple[LayerRecord, ...]
    decoder: tuple[LayerRecord, ...]
    latent_channels: int
    quantizer_step_hint: float


def _symmetric(pair, name: str) -> int:
    a, b = (pair if isinstance(pair, tuple) else (pair, pair))
    if a != b:
        raise ConfigError(f"{name} must be symmetric for export, got {pair}")
    return int(a)


def _conv_record(module: nn.Conv2d | nn.ConvTranspose2d) -> LayerRecord:
    transposed = isinstance(module, nn.ConvTranspose2d)
    if module.bias is None:
        raise ConfigError("convolutions must carry a bias for export")
    if any(d != 1 for d in module.dilation):
        raise ConfigError("dilated convolutions are not exportable")
    if module.groups != 1:
        raise ConfigError("grouped convolutions are not exportable")
    if transposed and any(p != 0 for p in module.output_padding):
        raise ConfigError("transposed convolutions with output padding are not exportable")
    weight = module.weight.detach().cpu().numpy()
    if transposed:
        # torch keeps (in, out, kh, kw); the file stores output-major.
        weight = weight.swapaxes(0, 1)
    weight = np.ascontiguousarray(weight, dtype=np.float32)
    bias = module.bias.detach().cpu().numpy().astype(np.float32)
    out_c, in_c, kh, kw = weight.shape
    return LayerRecord(
        code=CODE_TRANSPOSED_CONV if transposed else CODE_CONV,
        out_channels=out_c,
        in_channels=in_c,
        kernel_h=kh,
        kernel_w=kw,
        stride=_symmetric(module.stride, "stride"),
        padding=_symmetric(module.padding, "padding"),
        weights=weight,
        bias=bias,
    )


def module_records(module: nn.Module) -> list[LayerRecord]:
    """Flatten a torch module into layer records, recursing into blocks."""
    if isinstance(module, nn.Sequential):
        records: list[LayerRecord] = []
        for child in module:
            records.extend(module_records(child))
        return records
    if isinstance(module, Residual):
        inner = module_records(module.body)
        return [LayerRecord(code=CODE_RESIDUAL_BEGIN), *inner,
                LayerRecord(code=CODE_RESIDUAL_END)]
    if isinstance(module, (nn.Conv2d, nn.ConvTranspose2d)):
        return [_conv_record(module)]
    if isinstance(module, nn.LeakyReLU):
        return [LayerRecord(code=CODE_LEAKY_RELU, slope=float(module.negative_slope))]
    if isinstance(module, nn.Tanh):
        return [LayerRecord(code=CODE_TANH)]
    if isinstance(module, nn.PixelShuffle):
        return [LayerRecord(code=CODE_SUBPIXEL, factor=int(module.upscale_factor))]
    raise ConfigError(f"module {type(module).__name__} has no interchange representation")


def records_to_module(records: tuple[LayerRecord, ...]) -> nn.Sequential:
    """Rebuild a torch module chain from layer records."""
    stack: list[list[nn.Module]] = [[]]
    for index, record in enumerate(records):
        if record.code == CODE_RESIDUAL_BEGIN:
            stack.append([])
            continue
        if record.code == CODE_RESIDUAL_END:
            if len(stack) < 2:
                raise FormatError(f"layer {index}: residual end without begin")
            body = stack.pop()
            stack[-1].append(Residual(nn.Sequential(*body)))
            continue
        stack[-1].append(_record_to_torch(record, index))
    if len(stack) != 1:
        raise FormatError("residual begin without matching end")
    return nn.Sequential(*stack[0])


def _record_to_torch(record: LayerRecord, index: int) -> nn.Module:
    if record.code == CODE_CONV or record.code == CODE_TRANSPOSED_CONV:
        transposed = record.code == CODE_TRANSPOSED_CONV
        cls = nn.ConvTranspose2d if transposed else nn.Conv2d
        module = cls(
            record.in_channels,
            record.out_channels,
            kernel_size=(record.kernel_h, record.kernel_w),
            stride=record.stride,
            padding=record.padding,
        )
        weight = record.weights
        if weight is None or record.bias is None:
            raise FormatError(f"layer {index}: convolution without parameters")
        if transposed:
            weight = weight.swapaxes(0, 1)
        with torch.no_grad():
            module.weight.copy_(torch.from_numpy(np.ascontiguousarray(weight)))
            module.bias.copy_(torch.from_numpy(record.bias))
        return module
    if record.code == CODE_LEAKY_RELU:
        return nn.LeakyReLU(record.slope)
    if record.code == CODE_TANH:
        return nn.Tanh()
    if record.code == CODE_SUBPIXEL:
        return nn.PixelShuffle(record.factor)
    raise FormatError(f"layer {index}: unknown layer code {record.code}")


def _pack_record(record: LayerRecord) -> bytes:
    parts = [struct.pack("<B", record.code)]
    if record.code == CODE_LEAKY_RELU:
        parts.append(struct.pack("<f", record.slope))
    elif record.code == CODE_SUBPIXEL:
        parts.append(struct.pack("<I", record.factor))
    parts.append(struct.pack(
        "<6I",
        record.out_channels,
        record.in_channels,
        record.kernel_h,
        record.kernel_w,
        record.stride,
        record.padding,
    ))
    if record.code in _CONV_CODES:
        parts.append(np.ascontiguousarray(record.weights, dtype="<f4").tobytes())
        parts.append(np.ascontiguousarray(record.bias, dtype="<f4").tobytes())
    return b"".join(parts)


def serialize(contents: WeightsFile) -> bytes:
    """Encode the file, appending the checksum."""
    parts = [
        MAGIC,
        struct.pack("<IIf", VERSION, contents.latent_channels,
                    contents.quantizer_step_hint),
    ]
    for section in (contents.encoder, contents.decoder):
        parts.append(struct.pack("<I", len(section)))
        parts.extend(_pack_record(record) for record in section)
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
                f"weights file truncated at byte {self.offset}, needed {size} more"
            )
        values = struct.unpack_from(fmt, self.data, self.offset)
        self.offset += size
        return values

    def take_f32(self, count: int, shape: tuple[int, ...]) -> np.ndarray:
        size = 4 * count
        if self.offset + size > len(self.data):
            raise FormatError(
                f"weights file truncated at byte {self.offset}, needed {size} more"
            )
        flat = np.frombuffer(self.data, dtype="<f4", count=count, offset=self.offset)
        self.offset += size
        return flat.reshape(shape).astype(np.float32)


def _unpack_record(reader: _Reader, where: str) -> LayerRecord:
    (code,) = reader.take("<B")
    if code not in _KNOWN_CODES:
        raise FormatError(f"{where}: unknown layer code {code}")
    slope = 0.0
    factor = 0
    if code == CODE_LEAKY_RELU:
        (slope,) = reader.take("<f")
    elif code == CODE_SUBPIXEL:
        (factor,) = reader.take("<I")
    out_c, in_c, kh, kw, stride, padding = reader.take("<6I")
    weights = bias = None
    if code in _CONV_CODES:
        weights = reader.take_f32(out_c * in_c * kh * kw, (out_c, in_c, kh, kw))
        bias = reader.take_f32(out_c, (out_c,))
    return LayerRecord(
        code=code,
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


def deserialize(data: bytes) -> WeightsFile:
    """Decode interchange bytes; raise FormatError on structural problems."""
    if len(data) < len(MAGIC) + 8:
        raise FormatError("weights file shorter than its checksum")
    body, (stored,) = data[:-8], struct.unpack("<Q", data[-8:])
    actual = fnv1a64(body)
    if stored != actual:
        raise FormatError(
            f"weights checksum mismatch: stored {stored:#018x}, computed {actual:#018x}"
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
        sections.append(tuple(
            _unpack_record(reader, f"{name} layer {index}") for index in range(count)
        ))
    if reader.offset != len(body):
        raise FormatError(
            f"{len(body) - reader.offset} trailing bytes after the last layer"
        )
    return WeightsFile(
        encoder=sections[0],
        decoder=sections[1],
        latent_channels=latent_channels,
        quantizer_step_hint=float(step_hint),
    )


def export_model(encoder: nn.Module, decoder: nn.Module, latent_channels: int,
                 quantizer_step_hint: float, path: str | PathLike) -> None:
    """Flatten a trained encoder/decoder pair and write the weight file."""
    contents = WeightsFile(
        encoder=tuple(module_records(encoder)),
        decoder=tuple(module_records(decoder)),
        latent_channels=latent_channels,
        quantizer_step_hint=quantizer_step_hint,
    )
    with open(path, "wb") as handle:
        handle.write(serialize(contents))


def import_model(path: str | PathLike) -> tuple[nn.Sequential, nn.Sequential, WeightsFile]:
    """Read a weight file and rebuild torch modules from it."""
    with open(path, "rb") as handle:
        contents = deserialize(handle.read())
    return records_to_module(contents.encoder), records_to_module(contents.decoder), contents
