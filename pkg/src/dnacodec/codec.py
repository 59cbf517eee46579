"""Fixed-length DNA coding of symbol tensors.

encode concatenates one codeword per symbol in row-major order.  Two
decoders exist: a strict one that fails on any n-gram that is not a
bound codeword, and a robust one that maps such n-grams to the nearest
bound codeword by Hamming distance (lowest codebook index on ties).
Corruption inside one codeword can therefore never disturb the decoding
of its neighbours.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from math import prod

import numpy as np

from .codebook import Codebook
from .errors import DecodeError, DomainError, EncodeError, FormatError

_BASE_VALUE = np.full(256, 255, dtype=np.uint8)
for _i, _ch in enumerate("ACGT"):
    _BASE_VALUE[ord(_ch)] = _i


@dataclass(frozen=True)
class NucleotideSequence:
    """A {A,C,G,T} stream tagged with the symbol-tensor geometry it encodes."""

    bases: str
    symbol_shape: tuple[int, ...]
    codeword_length: int

    def __post_init__(self) -> None:
        if len(self.bases) != self.symbol_count * self.codeword_length:
            raise FormatError(
                f"sequence length {len(self.bases)} does not equal "
                f"{self.symbol_count} symbols x {self.codeword_length} bases"
            )

    @property
    def symbol_count(self) -> int:
        return prod(self.symbol_shape)


@functools.lru_cache(maxsize=32)
def _bound_tables(cb: Codebook) -> tuple[np.ndarray, np.ndarray]:
    """(bound word matrix as uint8 base values, packed integer codes)."""
    words = cb.words[: cb.symbol_count]
    raw = np.frombuffer("".join(words).encode("ascii"), dtype=np.uint8)
    matrix = _BASE_VALUE[raw].reshape(len(words), cb.config.codeword_length)
    codes = _pack(matrix)
    return matrix, codes


def _pack(matrix: np.ndarray) -> np.ndarray:
    """Pack base-value rows into big-endian base-4 integers (order-preserving)."""
    n = matrix.shape[1]
    weights = 4 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return matrix.astype(np.int64) @ weights


def _sequence_matrix(seq: NucleotideSequence) -> np.ndarray:
    raw = np.frombuffer(seq.bases.encode("ascii"), dtype=np.uint8)
    values = _BASE_VALUE[raw]
    if (values == 255).any():
        pos = int(np.argmax(values == 255))
        raise DomainError(f"non-nucleotide character {seq.bases[pos]!r} at offset {pos}")
    return values.reshape(seq.symbol_count, seq.codeword_length)


def _require_bound(cb: Codebook) -> None:
    if not cb.is_bound:
        raise EncodeError("codebook is not bound to a symbol range; call bind_symbols first")


def hamming(a: str, b: str) -> int:
    """Number of positions at which two equal-length words differ."""
    if len(a) != len(b):
        raise DomainError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a, b))


def encode(symbols: np.ndarray, cb: Codebook) -> NucleotideSequence:
    """Concatenate the codeword of each symbol, row-major."""
    _require_bound(cb)
    symbols = np.asarray(symbols)
    flat = symbols.ravel(order="C")
    idx = flat - cb.symbol_offset
    bad = (idx < 0) | (idx >= cb.symbol_count)
    if bad.any():
        first = int(np.argmax(bad))
        element = tuple(int(i) for i in np.unravel_index(first, symbols.shape))
        raise EncodeError(
            f"symbol {int(flat[first])} at element {element} outside bound range "
            f"[{cb.symbol_offset}, {cb.symbol_offset + cb.symbol_count - 1}]"
        )
    matrix, _ = _bound_tables(cb)
    n = cb.config.codeword_length
    if flat.size == 0:
        bases = ""
    else:
        encoded = matrix[idx.astype(np.int64)]
        ascii_codes = np.frombuffer(b"ACGT", dtype=np.uint8)[encoded]
        bases = ascii_codes.tobytes().decode("ascii")
    return NucleotideSequence(
        bases=bases, symbol_shape=tuple(symbols.shape), codeword_length=n
    )


def _frame(seq: NucleotideSequence, cb: Codebook) -> np.ndarray:
    n = cb.config.codeword_length
    if seq.codeword_length != n:
        raise FormatError(
            f"sequence was framed with codeword length {seq.codeword_length}, "
            f"codebook uses {n}"
        )
    if len(seq.bases) % n != 0:
        raise FormatError(f"sequence length {len(seq.bases)} not divisible by {n}")
    return _sequence_matrix(seq)


def decode_strict(seq: NucleotideSequence, cb: Codebook) -> np.ndarray:
    """Exact inverse of encode; any unknown n-gram is an error, not a repair."""
    _require_bound(cb)
    values = _frame(seq, cb)
    if values.shape[0] == 0:
        return np.zeros(seq.symbol_shape, dtype=np.int64)
    _, codes = _bound_tables(cb)
    received = _pack(values)
    pos = np.searchsorted(codes, received)
    pos_clipped = np.minimum(pos, len(codes) - 1)
    known = codes[pos_clipped] == received
    if not known.all():
        first = int(np.argmax(~known))
        n = cb.config.codeword_length
        raise DecodeError(
            f"unknown codeword {seq.bases[first * n:(first + 1) * n]!r} "
            f"at base offset {first * n}"
        )
    symbols = pos_clipped + cb.symbol_offset
    return symbols.reshape(seq.symbol_shape)


def decode_robust(seq: NucleotideSequence, cb: Codebook) -> np.ndarray:
    """Decode each n-gram independently, repairing unknown ones.

    Unknown n-grams are replaced by the bound codeword at minimum Hamming
    distance; ties go to the lowest codebook index.  Total on any
    well-framed {A,C,G,T} input.
    """
    _require_bound(cb)
    values = _frame(seq, cb)
    if values.shape[0] == 0:
        return np.zeros(seq.symbol_shape, dtype=np.int64)
    matrix, codes = _bound_tables(cb)
    received = _pack(values)
    pos = np.searchsorted(codes, received)
    pos_clipped = np.minimum(pos, len(codes) - 1)
    known = codes[pos_clipped] == received
    indices = pos_clipped.copy()
    if not known.all():
        unknown_rows = np.nonzero(~known)[0]
        repaired: dict[int, int] = {}
        for row in unknown_rows:
            code = int(received[row])
            best = repaired.get(code)
            if best is None:
                dists = (matrix != values[row]).sum(axis=1)
                best = int(np.argmin(dists))  # first minimum = lowest index
                repaired[code] = best
            indices[row] = best
    symbols = indices + cb.symbol_offset
    return symbols.reshape(seq.symbol_shape)
