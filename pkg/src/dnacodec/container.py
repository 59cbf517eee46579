"""Persistent container for encoded DNA payloads.

Layout (all integers little-endian):

    magic  b"DNAC"
    version        u32 (currently 1)
    header_length  u32 (byte count of the header block that follows)
    header block, fixed field order:
        width, height, channels          u32 x 3   (true image dims)
        latent_c, latent_h, latent_w     u32 x 3
        quantizer step q                 f64
        codeword_length n                u32
        max_run                          u32
        gc flags                         u8  (bit0 gc_min present, bit1 gc_max)
        gc_min, gc_max                   f64 x 2 (zero when absent)
        symbol_offset                    i32
        transform tag                    u8  (0 reference, 1 weights)
        weights checksum                 u64 (only when tag is 1)
        channel record count             u32
        per record: substitution rate    f64, seed u64
    payload:
        base count                       u64
        bases as ASCII A/C/G/T

The binary file is canonical; to_fasta renders an interchange text form.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from os import PathLike

from .codec import NucleotideSequence
from .errors import FormatError

MAGIC = b"DNAC"
VERSION = 1

TRANSFORM_REFERENCE = "reference"
TRANSFORM_WEIGHTS = "weights"

_FASTA_WIDTH = 80
_BASES = frozenset(b"ACGT")


@dataclass(frozen=True)
class ChannelRecord:
    """One substitution-channel pass applied to the payload."""

    rate: float
    seed: int


@dataclass(frozen=True)
class ContainerHeader:
    width: int
    height: int
    channels: int
    latent_shape: tuple[int, int, int]
    step: float
    codeword_length: int
    max_run: int
    gc_min: float | None
    gc_max: float | None
    symbol_offset: int
    transform: str
    weights_checksum: int = 0
    channel_records: tuple[ChannelRecord, ...] = ()


@dataclass(frozen=True)
class DnaContainer:
    header: ContainerHeader
    payload: NucleotideSequence


def _latent_count(header: ContainerHeader) -> int:
    c, h, w = header.latent_shape
    return c * h * w


def _serialize_header(header: ContainerHeader) -> bytes:
    if header.transform not in (TRANSFORM_REFERENCE, TRANSFORM_WEIGHTS):
        raise FormatError(f"unknown transform tag {header.transform!r}")
    flags = (1 if header.gc_min is not None else 0) | (
        2 if header.gc_max is not None else 0
    )
    parts = [
        struct.pack(
            "<6I",
            header.width,
            header.height,
            header.channels,
            *header.latent_shape,
        ),
        struct.pack("<dII", header.step, header.codeword_length, header.max_run),
        struct.pack(
            "<Bdd",
            flags,
            header.gc_min if header.gc_min is not None else 0.0,
            header.gc_max if header.gc_max is not None else 0.0,
        ),
        struct.pack("<i", header.symbol_offset),
    ]
    if header.transform == TRANSFORM_REFERENCE:
        parts.append(struct.pack("<B", 0))
    else:
        parts.append(struct.pack("<BQ", 1, header.weights_checksum))
    parts.append(struct.pack("<I", len(header.channel_records)))
    parts.extend(
        struct.pack("<dQ", record.rate, record.seed)
        for record in header.channel_records
    )
    return b"".join(parts)


def serialize_container(container: DnaContainer) -> bytes:
    header, payload = container.header, container.payload
    if payload.symbol_shape != header.latent_shape:
        raise FormatError(
            f"payload symbol shape {payload.symbol_shape} does not match the "
            f"header latent shape {header.latent_shape}"
        )
    if payload.codeword_length != header.codeword_length:
        raise FormatError(
            f"payload codeword length {payload.codeword_length} does not "
            f"match the header value {header.codeword_length}"
        )
    head = _serialize_header(header)
    return b"".join(
        [
            MAGIC,
            struct.pack("<II", VERSION, len(head)),
            head,
            struct.pack("<Q", len(payload.bases)),
            payload.bases.encode("ascii"),
        ]
    )


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.offset + size > len(self.data):
            raise FormatError(
                f"container truncated at byte {self.offset}, needed {size} more"
            )
        values = struct.unpack_from(fmt, self.data, self.offset)
        self.offset += size
        return values


def deserialize_container(data: bytes) -> DnaContainer:
    reader = _Reader(data)
    magic = bytes(reader.take("<4s")[0])
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    version, header_length = reader.take("<II")
    if version != VERSION:
        raise FormatError(f"unsupported container version {version}")
    header_end = reader.offset + header_length

    width, height, channels, lc, lh, lw = reader.take("<6I")
    step, codeword_length, max_run = reader.take("<dII")
    flags, gc_min, gc_max = reader.take("<Bdd")
    (symbol_offset,) = reader.take("<i")
    (tag,) = reader.take("<B")
    if tag == 0:
        transform, checksum = TRANSFORM_REFERENCE, 0
    elif tag == 1:
        transform = TRANSFORM_WEIGHTS
        (checksum,) = reader.take("<Q")
    else:
        raise FormatError(f"unknown transform tag {tag}")
    (record_count,) = reader.take("<I")
    records = tuple(
        ChannelRecord(rate=rate, seed=seed)
        for rate, seed in (reader.take("<dQ") for _ in range(record_count))
    )
    if reader.offset != header_end:
        raise FormatError(
            f"header length {header_length} does not match its "
            f"{reader.offset - (header_end - header_length)} decoded bytes"
        )

    (base_count,) = reader.take("<Q")
    raw = data[reader.offset : reader.offset + base_count]
    if len(raw) != base_count:
        raise FormatError(
            f"payload holds {len(raw)} bases, header promises {base_count}"
        )
    if reader.offset + base_count != len(data):
        raise FormatError(
            f"{len(data) - reader.offset - base_count} trailing bytes after payload"
        )
    bad = set(raw) - _BASES
    if bad:
        raise FormatError(
            f"payload contains non-nucleotide byte {bytes([min(bad)])!r}"
        )

    header = ContainerHeader(
        width=width,
        height=height,
        channels=channels,
        latent_shape=(lc, lh, lw),
        step=step,
        codeword_length=codeword_length,
        max_run=max_run,
        gc_min=gc_min if flags & 1 else None,
        gc_max=gc_max if flags & 2 else None,
        symbol_offset=symbol_offset,
        transform=transform,
        weights_checksum=checksum,
        channel_records=records,
    )
    if base_count != _latent_count(header) * codeword_length:
        raise FormatError(
            f"payload length {base_count} does not equal "
            f"{_latent_count(header)} latent elements x {codeword_length} bases"
        )
    payload = NucleotideSequence(
        bases=raw.decode("ascii"),
        symbol_shape=header.latent_shape,
        codeword_length=codeword_length,
    )
    return DnaContainer(header=header, payload=payload)


def save_container(container: DnaContainer, path: str | PathLike) -> None:
    with open(path, "wb") as handle:
        handle.write(serialize_container(container))


def load_container(path: str | PathLike) -> DnaContainer:
    with open(path, "rb") as handle:
        return deserialize_container(handle.read())


def with_payload(
    container: DnaContainer, bases: str, record: ChannelRecord
) -> DnaContainer:
    """Rebuild a container around channel output, appending its record."""
    header = replace(
        container.header,
        channel_records=container.header.channel_records + (record,),
    )
    payload = replace(container.payload, bases=bases)
    return DnaContainer(header=header, payload=payload)


def to_fasta(container: DnaContainer, name: str = "dnacodec") -> str:
    """Render the payload as FASTA-like text, 80 bases per line."""
    header = container.header
    description = (
        f">{name} image={header.width}x{header.height}x{header.channels} "
        f"q={header.step:g} n={header.codeword_length} max_run={header.max_run} "
        f"transform={header.transform}"
    )
    bases = container.payload.bases
    lines = [description]
    lines.extend(
        bases[i : i + _FASTA_WIDTH] for i in range(0, len(bases), _FASTA_WIDTH)
    )
    return "\n".join(lines) + "\n"
