import numpy as np
import pytest

from dnacodec.errors import FormatError
from dnacodec.nn import (
    KIND_CONV,
    KIND_LEAKY_RELU,
    KIND_RESIDUAL_BEGIN,
    KIND_RESIDUAL_END,
    KIND_SUBPIXEL,
    KIND_TANH,
    KIND_TRANSPOSED_CONV,
    LayerSpec,
    NetworkWeights,
)
from dnacodec.weights_io import (
    deserialize_weights,
    fnv1a64,
    load_weights,
    save_weights,
    serialize_weights,
)


def sample_network(seed=0):
    rng = np.random.default_rng(seed)

    def conv(kind, c_in, c_out, k, stride, pad):
        return LayerSpec(
            kind=kind,
            out_channels=c_out,
            in_channels=c_in,
            kernel_h=k,
            kernel_w=k,
            stride=stride,
            padding=pad,
            weights=rng.standard_normal((c_out, c_in, k, k)).astype(np.float32),
            bias=rng.standard_normal(c_out).astype(np.float32),
        )

    encoder = (
        conv(KIND_CONV, 3, 8, 3, 2, 1),
        LayerSpec(kind=KIND_LEAKY_RELU, slope=0.2),
        LayerSpec(kind=KIND_RESIDUAL_BEGIN),
        conv(KIND_CONV, 8, 8, 3, 1, 1),
        LayerSpec(kind=KIND_RESIDUAL_END),
        conv(KIND_CONV, 8, 4, 3, 2, 1),
        LayerSpec(kind=KIND_TANH),
    )
    decoder = (
        conv(KIND_TRANSPOSED_CONV, 4, 8, 4, 2, 1),
        LayerSpec(kind=KIND_LEAKY_RELU, slope=0.2),
        conv(KIND_CONV, 8, 12, 3, 1, 1),
        LayerSpec(kind=KIND_SUBPIXEL, factor=2),
    )
    return NetworkWeights(
        encoder_layers=encoder,
        decoder_layers=decoder,
        latent_channels=4,
        quantizer_step_hint=0.5,
    )


def assert_layers_equal(got, want):
    assert len(got) == len(want)
    for g, w in zip(got, want):
        assert g.kind == w.kind
        assert (
            g.out_channels,
            g.in_channels,
            g.kernel_h,
            g.kernel_w,
            g.stride,
            g.padding,
            g.factor,
        ) == (
            w.out_channels,
            w.in_channels,
            w.kernel_h,
            w.kernel_w,
            w.stride,
            w.padding,
            w.factor,
        )
        # Scalars live as 32-bit floats on disk.
        assert g.slope == float(np.float32(w.slope))
        if w.weights is None:
            assert g.weights is None and g.bias is None
        else:
            np.testing.assert_array_equal(g.weights, w.weights)
            np.testing.assert_array_equal(g.bias, w.bias)


def test_fnv1a64_known_values():
    # Published reference values for the 64-bit FNV-1a parameters.
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_round_trip_is_bit_identical(tmp_path):
    net = sample_network()
    path = tmp_path / "net.dnaw"
    save_weights(net, path)
    loaded = load_weights(path)
    assert loaded.latent_channels == net.latent_channels
    assert loaded.quantizer_step_hint == pytest.approx(
        np.float32(net.quantizer_step_hint), abs=0
    )
    assert_layers_equal(loaded.encoder_layers, net.encoder_layers)
    assert_layers_equal(loaded.decoder_layers, net.decoder_layers)
    # A second serialization must reproduce the file byte for byte.
    assert serialize_weights(loaded) == path.read_bytes()


def test_checksum_detects_single_bit_flip():
    blob = bytearray(serialize_weights(sample_network()))
    blob[25] ^= 0x40
    with pytest.raises(FormatError, match="checksum"):
        deserialize_weights(bytes(blob))


def test_truncated_file_rejected():
    blob = serialize_weights(sample_network())
    with pytest.raises(FormatError):
        deserialize_weights(blob[: len(blob) // 2])


def test_bad_magic_rejected():
    blob = bytearray(serialize_weights(sample_network()))
    blob[:4] = b"XXXX"
    # Restore a consistent checksum so the magic check itself is exercised.
    import struct

    body = bytes(blob[:-8])
    blob[-8:] = struct.pack("<Q", fnv1a64(body))
    with pytest.raises(FormatError, match="magic"):
        deserialize_weights(bytes(blob))


def test_invalid_architecture_rejected_on_load():
    net = sample_network()
    bad = NetworkWeights(
        encoder_layers=net.encoder_layers[:-1],
        decoder_layers=net.decoder_layers,
        latent_channels=net.latent_channels,
        quantizer_step_hint=net.quantizer_step_hint,
    )
    import struct

    from dnacodec import weights_io

    parts = [
        weights_io.MAGIC,
        struct.pack("<IIf", weights_io.VERSION, bad.latent_channels, 0.5),
    ]
    parts.append(struct.pack("<I", len(bad.encoder_layers)))
    parts.extend(weights_io._pack_layer(layer) for layer in bad.encoder_layers)
    parts.append(struct.pack("<I", len(bad.decoder_layers)))
    parts.extend(weights_io._pack_layer(layer) for layer in bad.decoder_layers)
    body = b"".join(parts)
    blob = body + struct.pack("<Q", fnv1a64(body))
    with pytest.raises(Exception, match="tanh"):
        deserialize_weights(blob)
