import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dnacodec.codebook import CodebookConfig, bind_symbols, generate
from dnacodec.codec import NucleotideSequence, decode_robust, decode_strict, encode, hamming
from dnacodec.errors import DecodeError, DomainError, EncodeError, FormatError


def full_codebook(n, max_run=2):
    cb = generate(CodebookConfig(n, max_run=max_run))
    return bind_symbols(cb, 0, len(cb.words) - 1)


def brute_force_nearest(gram: str, words) -> int:
    # independent argmin with lowest-index tie-break
    best_i, best_d = 0, len(gram) + 1
    for i, w in enumerate(words):
        d = sum(a != b for a, b in zip(gram, w))
        if d < best_d:
            best_i, best_d = i, d
    return best_i


def test_hamming_examples():
    assert hamming("ACG", "ACG") == 0
    assert hamming("ACG", "ACT") == 1
    assert hamming("AAAA", "TTTT") == 4
    with pytest.raises(DomainError):
        hamming("AC", "ACG")


def test_encode_single_lookup():
    cb = generate(CodebookConfig(3, max_run=2))
    bound = bind_symbols(cb, 0, 0)
    seq = encode(np.array([0]), bound)
    assert seq.bases == cb.words[0]
    assert seq.symbol_shape == (1,)


def test_encode_concatenation_order():
    bound = bind_symbols(generate(CodebookConfig(3, max_run=2)), -1, 1)
    w = bound.words
    seq = encode(np.array([-1, 0, 1]), bound)
    assert seq.bases == w[0] + w[1] + w[2]


def test_encode_length_arithmetic():
    bound = full_codebook(3)
    seq = encode(np.arange(5), bound)
    assert len(seq.bases) == 15


def test_encode_errors():
    cb = generate(CodebookConfig(3, max_run=2))
    with pytest.raises(EncodeError, match="not bound"):
        encode(np.array([0]), cb)
    bound = bind_symbols(cb, -1, 1)
    with pytest.raises(EncodeError, match=r"element \(0, 1\)"):
        encode(np.array([[0, 5], [0, 0]]), bound)


def test_strict_round_trip_and_shapes():
    bound = bind_symbols(generate(CodebookConfig(3, max_run=2)), -2, 2)
    s = np.array([[-2, -1, 0], [1, 2, 0]])
    seq = encode(s, bound)
    np.testing.assert_array_equal(decode_strict(seq, bound), s)
    np.testing.assert_array_equal(decode_robust(seq, bound), s)


def test_strict_reports_corruption_offset():
    bound = full_codebook(3)
    s = np.array([5, 7, 9, 11])
    seq = encode(s, bound)
    # corrupt the second codeword into a gram outside the codebook (brute check)
    for replacement in itertools.product("ACGT", repeat=3):
        gram = "".join(replacement)
        if gram not in bound.words:
            break
    bases = seq.bases[:3] + gram + seq.bases[6:]
    corrupted = NucleotideSequence(bases=bases, symbol_shape=(4,), codeword_length=3)
    with pytest.raises(DecodeError, match="offset 3"):
        decode_strict(corrupted, bound)


def test_empty_sequence():
    bound = full_codebook(3)
    seq = encode(np.zeros((0,), dtype=np.int64), bound)
    assert seq.bases == ""
    assert decode_strict(seq, bound).shape == (0,)
    assert decode_robust(seq, bound).shape == (0,)


def test_robust_repairs_aaa_to_aac():
    bound = full_codebook(3)
    corrupted = NucleotideSequence(bases="AAA", symbol_shape=(1,), codeword_length=3)
    symbol = decode_robust(corrupted, bound)[0]
    assert bound.words[symbol - bound.symbol_offset] == "AAC"
    # cross-check the distance-1 set claimed by the repair
    d1 = [w for w in bound.words if hamming(w, "AAA") == 1]
    assert d1 == ["AAC", "AAG", "AAT", "ACA", "AGA", "ATA", "CAA", "GAA", "TAA"]


def test_robust_silent_misdecode_to_other_valid_word():
    bound = full_codebook(3)
    s = np.array([bound.words.index("ACG")])
    seq = encode(s, bound)
    assert seq.bases == "ACG"
    # a substitution landing on another valid codeword decodes to that symbol
    mutated = NucleotideSequence(bases="ACT", symbol_shape=(1,), codeword_length=3)
    got = decode_robust(mutated, bound)[0]
    assert bound.words[got - bound.symbol_offset] == "ACT"


def test_robust_framing_error():
    bound = full_codebook(3)
    with pytest.raises(FormatError):
        NucleotideSequence(bases="ACGT", symbol_shape=(1,), codeword_length=3)
    seq = NucleotideSequence(bases="ACGTAC", symbol_shape=(3,), codeword_length=2)
    with pytest.raises(FormatError, match="framed with codeword length 2"):
        decode_robust(seq, bound)


def test_robust_restricted_to_bound_words():
    # only 4 of 60 words bound: even valid unbound words must repair into range
    cb = generate(CodebookConfig(3, max_run=2))
    bound = bind_symbols(cb, 0, 3)
    unbound_word = cb.words[10]
    seq = NucleotideSequence(bases=unbound_word, symbol_shape=(1,), codeword_length=3)
    got = decode_robust(seq, bound)[0]
    assert 0 <= got <= 3
    assert got == brute_force_nearest(unbound_word, cb.words[:4])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("max_run", [1, 2])
def test_nearest_word_oracle_exhaustive(n, max_run):
    bound = full_codebook(n, max_run=max_run)
    words = bound.words
    for chars in itertools.product("ACGT", repeat=n):
        gram = "".join(chars)
        seq = NucleotideSequence(bases=gram, symbol_shape=(1,), codeword_length=n)
        got = decode_robust(seq, bound)[0] - bound.symbol_offset
        assert got == brute_force_nearest(gram, words)


@settings(max_examples=60)
@given(
    data=st.data(),
    n=st.integers(min_value=2, max_value=4),
)
def test_round_trip_random_tensors(data, n):
    bound = full_codebook(n)
    k_hi = bound.symbol_count - 1
    shape = data.draw(st.tuples(st.integers(1, 4), st.integers(1, 5)))
    s = data.draw(
        st.lists(
            st.integers(0, k_hi), min_size=shape[0] * shape[1], max_size=shape[0] * shape[1]
        )
    )
    arr = np.array(s).reshape(shape)
    seq = encode(arr, bound)
    np.testing.assert_array_equal(decode_strict(seq, bound), arr)
    np.testing.assert_array_equal(decode_robust(seq, bound), arr)


@settings(max_examples=40)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_corruption_locality(seed):
    # corrupting bases inside codeword j changes at most symbol j
    rng = np.random.default_rng(seed)
    bound = full_codebook(3)
    s = rng.integers(0, bound.symbol_count, size=24)
    seq = encode(s, bound)
    j = int(rng.integers(0, s.size))
    bases = list(seq.bases)
    for offset in range(3):
        if rng.random() < 0.7:
            pos = j * 3 + offset
            bases[pos] = rng.choice([b for b in "ACGT" if b != bases[pos]])
    corrupted = NucleotideSequence(
        bases="".join(bases), symbol_shape=seq.symbol_shape, codeword_length=3
    )
    decoded = decode_robust(corrupted, bound)
    changed = np.nonzero(decoded != s)[0]
    assert set(changed.tolist()) <= {j}
    assert np.all(decoded >= bound.symbol_offset)
    assert np.all(decoded < bound.symbol_offset + bound.symbol_count)
