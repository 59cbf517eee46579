import subprocess
import sys

import numpy as np
import pytest
import torch
from torch import nn

from dnatrainer import (
    Residual,
    build_autoencoder,
    deserialize,
    export_model,
    import_model,
    module_records,
    records_to_module,
    save_image,
    seed_everything,
    serialize,
    synthetic_images,
)
from dnatrainer.errors import ConfigError, FormatError
from dnatrainer.weights import (
    CODE_CONV,
    CODE_LEAKY_RELU,
    CODE_RESIDUAL_BEGIN,
    CODE_RESIDUAL_END,
    CODE_SUBPIXEL,
    CODE_TANH,
    CODE_TRANSPOSED_CONV,
    LayerRecord,
    WeightsFile,
    fnv1a64,
)


def toy_model():
    seed_everything(123)
    return build_autoencoder(in_channels=3, latent_channels=4, base_channels=8)


def test_fnv1a64_known_values():
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_flattening_covers_every_layer_kind():
    encoder, decoder = toy_model()
    codes = [r.code for r in module_records(encoder)]
    assert codes == [CODE_CONV, CODE_LEAKY_RELU, CODE_RESIDUAL_BEGIN, CODE_CONV,
                     CODE_LEAKY_RELU, CODE_CONV, CODE_RESIDUAL_END, CODE_CONV, CODE_TANH]
    codes = [r.code for r in module_records(decoder)]
    assert codes == [CODE_TRANSPOSED_CONV, CODE_LEAKY_RELU, CODE_RESIDUAL_BEGIN,
                     CODE_CONV, CODE_LEAKY_RELU, CODE_CONV, CODE_RESIDUAL_END,
                     CODE_CONV, CODE_SUBPIXEL]


def test_transposed_conv_weights_are_output_major_on_disk():
    encoder, decoder = toy_model()
    record = module_records(decoder)[0]
    module = decoder[0]
    assert record.code == CODE_TRANSPOSED_CONV
    # torch keeps (in, out, kh, kw); the record must swap to (out, in, kh, kw).
    assert record.weights.shape == (module.out_channels, module.in_channels, 4, 4)
    np.testing.assert_array_equal(
        record.weights, module.weight.detach().numpy().swapaxes(0, 1)
    )


def test_export_import_reexport_is_byte_identical(tmp_path):
    encoder, decoder = toy_model()
    first = tmp_path / "model.dnaw"
    export_model(encoder, decoder, 4, 0.2, first)
    enc2, dec2, contents = import_model(first)
    assert contents.latent_channels == 4
    assert contents.quantizer_step_hint == pytest.approx(0.2)
    second = tmp_path / "again.dnaw"
    export_model(enc2, dec2, contents.latent_channels, contents.quantizer_step_hint, second)
    assert first.read_bytes() == second.read_bytes()


def test_imported_model_computes_the_same_function(tmp_path):
    encoder, decoder = toy_model()
    path = tmp_path / "model.dnaw"
    export_model(encoder, decoder, 4, 0.2, path)
    enc2, dec2, _ = import_model(path)
    x = torch.randn(1, 3, 16, 16)
    with torch.no_grad():
        torch.testing.assert_close(enc2(x), encoder(x), rtol=0.0, atol=0.0)
        z = encoder(x)
        torch.testing.assert_close(dec2(z), decoder(z), rtol=0.0, atol=0.0)


def test_serialize_deserialize_round_trip():
    encoder, decoder = toy_model()
    contents = WeightsFile(
        encoder=tuple(module_records(encoder)),
        decoder=tuple(module_records(decoder)),
        latent_channels=4,
        quantizer_step_hint=0.25,
    )
    data = serialize(contents)
    back = deserialize(data)
    assert serialize(back) == data


def test_corrupted_checksum_rejected_by_own_loader(tmp_path):
    encoder, decoder = toy_model()
    path = tmp_path / "model.dnaw"
    export_model(encoder, decoder, 4, 0.2, path)
    blob = bytearray(path.read_bytes())
    blob[50] ^= 0x40
    path.write_bytes(bytes(blob))
    with pytest.raises(FormatError, match="checksum"):
        import_model(path)


def test_corrupted_checksum_rejected_by_primary_loader(tmp_path):
    encoder, decoder = toy_model()
    path = tmp_path / "model.dnaw"
    export_model(encoder, decoder, 4, 0.2, path)
    blob = bytearray(path.read_bytes())
    blob[50] ^= 0x40
    path.write_bytes(bytes(blob))
    image = synthetic_images(1, 16, seed=3, channels=3)[0]
    image_path = tmp_path / "img.ppm"
    save_image(image, image_path)
    result = subprocess.run(
        [sys.executable, "-m", "dnacodec", "encode", str(image_path),
         str(tmp_path / "out.dnac"), "--transform", f"weights={path}",
         "--q", "0.2", "--n", "3"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 3
    assert "checksum" in result.stderr


def test_truncated_file_rejected(tmp_path):
    encoder, decoder = toy_model()
    path = tmp_path / "model.dnaw"
    export_model(encoder, decoder, 4, 0.2, path)
    path.write_bytes(path.read_bytes()[:-9])
    with pytest.raises(FormatError):
        import_model(path)


def test_unsupported_module_rejected():
    with pytest.raises(ConfigError, match="Sigmoid"):
        module_records(nn.Sequential(nn.Sigmoid()))


def test_asymmetric_stride_rejected():
    conv = nn.Conv2d(2, 2, kernel_size=3, stride=(1, 2), padding=1)
    with pytest.raises(ConfigError, match="symmetric"):
        module_records(conv)


def test_unbalanced_residual_markers_rejected():
    records = (LayerRecord(code=CODE_RESIDUAL_END),)
    with pytest.raises(FormatError, match="residual"):
        records_to_module(records)
    records = (LayerRecord(code=CODE_RESIDUAL_BEGIN), LayerRecord(code=CODE_TANH))
    with pytest.raises(FormatError, match="residual"):
        records_to_module(records)


def test_residual_module_adds_its_body():
    body = nn.Sequential(nn.Conv2d(2, 2, kernel_size=1))
    with torch.no_grad():
        body[0].weight.zero_()
        body[0].bias.zero_()
    block = Residual(body)
    x = torch.randn(1, 2, 4, 4)
    torch.testing.assert_close(block(x), x, rtol=0.0, atol=0.0)
