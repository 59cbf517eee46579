"""Constrained quaternary codebooks.

A codebook is the ordered set of all fixed-length strings over {A,C,G,T}
that satisfy the biochemical constraints (bounded homopolymer run length
and, optionally, bounded GC fraction).  Words are kept in ascending
lexicographic order with A < C < G < T, and quantizer symbols are bound
to words by rank: symbol k maps to words[k - symbol_offset].
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import CapacityError, ConfigError, DomainError

ALPHABET = "ACGT"
_GC = frozenset("GC")
_GC_EPS = 1e-9  # tolerance for fraction-vs-bound comparisons


@dataclass(frozen=True)
class CodebookConfig:
    codeword_length: int
    max_run: int = 2
    gc_min: float | None = None
    gc_max: float | None = None

    def __post_init__(self) -> None:
        if self.codeword_length < 1:
            raise ConfigError(f"codeword_length must be >= 1, got {self.codeword_length}")
        if self.max_run < 1:
            raise ConfigError(f"max_run must be >= 1, got {self.max_run}")
        for name, value in (("gc_min", self.gc_min), ("gc_max", self.gc_max)):
            if value is not None and not (0.0 <= value <= 1.0):
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if self.gc_min is not None and self.gc_max is not None and self.gc_min > self.gc_max:
            raise ConfigError(f"gc_min {self.gc_min} exceeds gc_max {self.gc_max}")


@dataclass(frozen=True)
class Codebook:
    """Immutable word list, optionally bound to a symbol range.

    When bound, symbol k maps to words[k - symbol_offset] for the
    symbol_count symbols starting at symbol_offset; the remaining words
    stay unused.
    """

    config: CodebookConfig
    words: tuple[str, ...]
    symbol_offset: int | None = None
    symbol_count: int = 0

    @property
    def is_bound(self) -> bool:
        return self.symbol_offset is not None


def _gc_ok(gc_count: int, length: int, cfg: CodebookConfig) -> bool:
    frac = gc_count / length
    if cfg.gc_min is not None and frac < cfg.gc_min - _GC_EPS:
        return False
    if cfg.gc_max is not None and frac > cfg.gc_max + _GC_EPS:
        return False
    return True


def is_valid(word: str, cfg: CodebookConfig) -> bool:
    """True iff the word meets the run-length and GC constraints.

    Raises DomainError for wrong length or characters outside {A,C,G,T}.
    """
    if len(word) != cfg.codeword_length:
        raise DomainError(
            f"codeword {word!r} has length {len(word)}, expected {cfg.codeword_length}"
        )
    run = 0
    prev = ""
    gc = 0
    for ch in word:
        if ch not in ALPHABET:
            raise DomainError(f"codeword {word!r} contains non-nucleotide character {ch!r}")
        run = run + 1 if ch == prev else 1
        if run > cfg.max_run:
            return False
        prev = ch
        if ch in _GC:
            gc += 1
    return _gc_ok(gc, len(word), cfg)


def generate(cfg: CodebookConfig) -> Codebook:
    """Enumerate every valid word of the configured length, in order.

    Depth-first construction prunes over-long runs as they appear, so the
    output is lexicographic by construction.
    """
    n = cfg.codeword_length
    words: list[str] = []
    prefix = [""] * n

    def extend(pos: int, prev: str, run: int, gc: int) -> None:
        if pos == n:
            if _gc_ok(gc, n, cfg):
                words.append("".join(prefix))
            return
        for ch in ALPHABET:
            new_run = run + 1 if ch == prev else 1
            if new_run > cfg.max_run:
                continue
            prefix[pos] = ch
            extend(pos + 1, ch, new_run, gc + (ch in _GC))

    extend(0, "", 0, 0)
    return Codebook(config=cfg, words=tuple(words))


def capacity(cfg: CodebookConfig) -> int:
    """Count valid words without materializing them.

    Dynamic program over (last base, current run length, GC count); the
    test suite cross-checks it against brute-force enumeration.
    """
    n = cfg.codeword_length
    counts: dict[tuple[str, int, int], int] = {}
    for ch in ALPHABET:
        counts[(ch, 1, 1 if ch in _GC else 0)] = 1
    for _ in range(n - 1):
        nxt: dict[tuple[str, int, int], int] = {}
        for (prev, run, gc), cnt in counts.items():
            for ch in ALPHABET:
                new_run = run + 1 if ch == prev else 1
                if new_run > cfg.max_run:
                    continue
                key = (ch, new_run, gc + (ch in _GC))
                nxt[key] = nxt.get(key, 0) + cnt
        counts = nxt
    return sum(cnt for (_, _, gc), cnt in counts.items() if _gc_ok(gc, n, cfg))


def bind_symbols(cb: Codebook, k_min: int, k_max: int) -> Codebook:
    """Assign symbols k_min..k_max to the first words by rank order."""
    if k_min > k_max:
        raise ConfigError(f"empty symbol range [{k_min}, {k_max}]")
    required = k_max - k_min + 1
    available = len(cb.words)
    if required > available:
        raise CapacityError(
            f"symbol range [{k_min}, {k_max}] requires {required} codewords "
            f"but the codebook holds only {available} "
            f"(n={cb.config.codeword_length}, max_run={cb.config.max_run})"
        )
    return replace(cb, symbol_offset=k_min, symbol_count=required)


def format_dump(cb: Codebook) -> str:
    """Plain-text dump: a header line followed by one codeword per line."""
    cfg = cb.config
    header = f"n={cfg.codeword_length} max_run={cfg.max_run} capacity={len(cb.words)}"
    return "\n".join([header, *cb.words]) + "\n"
