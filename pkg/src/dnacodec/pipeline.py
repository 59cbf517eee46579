"""End-to-end orchestration: image -> latent -> symbols -> bases and back.

The encode path pads the image so the chosen transform divides its
dimensions, records the true dimensions in the container header, and crops
after decoding.  The decode path always uses the robust nearest-codeword
decoder, so corrupted payloads still produce an image.
"""

from __future__ import annotations

from dataclasses import dataclass
from os import PathLike
from pathlib import Path

import numpy as np

from . import reference
from .channel import SubstitutionChannel, substitute
from .codebook import Codebook, CodebookConfig, bind_symbols, capacity, generate
from .codec import NucleotideSequence, decode_robust, encode
from .container import (
    TRANSFORM_REFERENCE,
    TRANSFORM_WEIGHTS,
    ChannelRecord,
    ContainerHeader,
    DnaContainer,
    with_payload,
)
from .errors import CapacityError, ConfigError, FormatError
from .images import crop_to_size, pad_to_multiple
from .nn import NetworkWeights, decode_latent, encode_image, encoder_stride_product
from .quantizer import QuantizerConfig, dequantize, quantize, symbol_range
from .weights_io import load_weights, weights_checksum

_SUGGEST_N_LIMIT = 24


@dataclass(frozen=True)
class Transform:
    """A chosen analysis/synthesis transform pair.

    kind is "reference" for the blockwise cosine transform or "weights" for
    a learned network; checksum identifies the weights file.
    """

    kind: str
    net: NetworkWeights | None = None
    checksum: int = 0

    @property
    def divisor(self) -> int:
        if self.kind == TRANSFORM_REFERENCE:
            return reference.BLOCK
        return max(1, encoder_stride_product(self.net))


def reference_transform() -> Transform:
    return Transform(kind=TRANSFORM_REFERENCE)


def weights_transform(path: str | PathLike) -> Transform:
    data = Path(path).read_bytes()
    net = load_weights(path)
    return Transform(
        kind=TRANSFORM_WEIGHTS, net=net, checksum=weights_checksum(data)
    )


def parse_transform(spec: str) -> Transform:
    """Parse a CLI transform choice: "reference" or "weights=<path>"."""
    if spec == TRANSFORM_REFERENCE:
        return reference_transform()
    if spec.startswith("weights="):
        path = spec[len("weights=") :]
        if not path:
            raise ConfigError("weights= needs a file path")
        return weights_transform(path)
    raise ConfigError(
        f"unknown transform {spec!r}, expected 'reference' or 'weights=<path>'"
    )


def _bound_codebook(
    step: float,
    codeword_length: int,
    max_run: int,
    gc_min: float | None,
    gc_max: float | None,
) -> Codebook:
    qcfg = QuantizerConfig(step=step)
    k_min, k_max, count = symbol_range(qcfg)
    cfg = CodebookConfig(
        codeword_length=codeword_length,
        max_run=max_run,
        gc_min=gc_min,
        gc_max=gc_max,
    )
    book = generate(cfg)
    try:
        return bind_symbols(book, k_min, k_max)
    except CapacityError as exc:
        for n in range(codeword_length + 1, _SUGGEST_N_LIMIT + 1):
            bigger = CodebookConfig(
                codeword_length=n, max_run=max_run, gc_min=gc_min, gc_max=gc_max
            )
            if capacity(bigger) >= count:
                raise CapacityError(f"{exc}; the smallest sufficient n is {n}") from None
        raise


def _latent_from_image(image: np.ndarray, transform: Transform) -> np.ndarray:
    if transform.kind == TRANSFORM_REFERENCE:
        return reference.reference_encode(image)
    return encode_image(image, transform.net)


def _image_from_latent(latent: np.ndarray, transform: Transform) -> np.ndarray:
    if transform.kind == TRANSFORM_REFERENCE:
        return reference.reference_decode(latent)
    return decode_latent(latent.astype(np.float32), transform.net)


def encode_to_container(
    image: np.ndarray,
    transform: Transform,
    step: float,
    codeword_length: int,
    max_run: int = 2,
    gc_min: float | None = None,
    gc_max: float | None = None,
) -> DnaContainer:
    """Transform, quantize, and DNA-encode one image."""
    height, width, channels = image.shape
    padded = pad_to_multiple(image, transform.divisor)
    latent = _latent_from_image(padded, transform)
    qcfg = QuantizerConfig(step=step)
    symbols = quantize(latent, qcfg)
    book = _bound_codebook(step, codeword_length, max_run, gc_min, gc_max)
    payload = encode(symbols, book)
    header = ContainerHeader(
        width=width,
        height=height,
        channels=channels,
        latent_shape=tuple(int(s) for s in symbols.shape),
        step=step,
        codeword_length=codeword_length,
        max_run=max_run,
        gc_min=gc_min,
        gc_max=gc_max,
        symbol_offset=book.symbol_offset,
        transform=transform.kind,
        weights_checksum=transform.checksum,
    )
    return DnaContainer(header=header, payload=payload)


def apply_channel(container: DnaContainer, rate: float, seed: int) -> DnaContainer:
    """Pass the payload through the substitution channel once."""
    channel = SubstitutionChannel(rate=rate, seed=seed)
    noisy = substitute(container.payload, channel)
    return with_payload(container, noisy.bases, ChannelRecord(rate=rate, seed=seed))


def _check_weights_match(container: DnaContainer, transform: Transform) -> None:
    if container.header.transform != transform.kind:
        raise FormatError(
            f"container was encoded with the {container.header.transform} "
            f"transform, decode attempted with {transform.kind}"
        )
    if (
        transform.kind == TRANSFORM_WEIGHTS
        and container.header.weights_checksum != transform.checksum
    ):
        raise FormatError(
            f"weights checksum mismatch: container records "
            f"{container.header.weights_checksum:#018x}, provided file has "
            f"{transform.checksum:#018x}"
        )


def decode_symbols(container: DnaContainer) -> np.ndarray:
    """Recover the symbol tensor from a container payload."""
    header = container.header
    book = _bound_codebook(
        header.step,
        header.codeword_length,
        header.max_run,
        header.gc_min,
        header.gc_max,
    )
    if book.symbol_offset != header.symbol_offset:
        raise FormatError(
            f"header symbol offset {header.symbol_offset} does not match the "
            f"derived value {book.symbol_offset}"
        )
    return decode_robust(container.payload, book)


def decode_to_image(
    container: DnaContainer, transform: Transform
) -> tuple[np.ndarray, np.ndarray]:
    """Decode a container; returns (image, symbol tensor)."""
    _check_weights_match(container, transform)
    header = container.header
    symbols = decode_symbols(container)
    latent = dequantize(symbols, QuantizerConfig(step=header.step))
    padded = _image_from_latent(latent, transform)
    if padded.shape[2] != header.channels:
        raise FormatError(
            f"transform produced {padded.shape[2]} channels, header declares "
            f"{header.channels}"
        )
    image = crop_to_size(padded, header.height, header.width)
    return image, symbols


def roundtrip(
    image: np.ndarray,
    transform: Transform,
    step: float,
    codeword_length: int,
    rate: float = 0.0,
    seed: int = 0,
    max_run: int = 2,
    gc_min: float | None = None,
    gc_max: float | None = None,
) -> tuple[np.ndarray, DnaContainer]:
    """encode -> optional channel -> decode; returns (image, container)."""
    container = encode_to_container(
        image, transform, step, codeword_length, max_run, gc_min, gc_max
    )
    if rate > 0.0:
        container = apply_channel(container, rate, seed)
    decoded, _ = decode_to_image(container, transform)
    return decoded, container
