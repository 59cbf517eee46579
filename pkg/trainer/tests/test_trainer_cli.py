import csv
from pathlib import Path

import numpy as np
import pytest

from dnatrainer import import_model, read_latent_dump, save_image, synthetic_images
from dnatrainer.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def quick_config(tmp_path):
    text = (CONFIGS / "toy.toml").read_text()
    text = text.replace("epochs = 24", "epochs = 2").replace("epochs = 8", "epochs = 1")
    path = tmp_path / "quick.toml"
    path.write_text(text)
    return path


def test_export_init_writes_a_loadable_file(tmp_path, quick_config):
    out = tmp_path / "init.dnaw"
    assert main(["export-init", "--config", str(quick_config), "--out", str(out)]) == 0
    encoder, decoder, contents = import_model(out)
    assert contents.latent_channels == 4
    assert contents.quantizer_step_hint == pytest.approx(0.2)
    assert len(contents.encoder) == 9
    assert len(contents.decoder) == 9


def test_export_init_is_deterministic(tmp_path, quick_config):
    a = tmp_path / "a.dnaw"
    b = tmp_path / "b.dnaw"
    main(["export-init", "--config", str(quick_config), "--out", str(a)])
    main(["export-init", "--config", str(quick_config), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_train_writes_weights_and_history(tmp_path, quick_config):
    out = tmp_path / "trained.dnaw"
    history = tmp_path / "history.csv"
    code = main([
        "train", "--config", str(quick_config), "--out", str(out),
        "--noise", "--history", str(history),
    ])
    assert code == 0
    import_model(out)  # loadable, checksum verified
    with open(history) as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 3
    assert rows[0]["noise_level"] == "0"
    assert [row["stage"] for row in rows] == ["1", "1", "2"]
    assert float(rows[-1]["noise_level"]) == pytest.approx(0.4)


def test_dump_latent_round_trip(tmp_path, quick_config):
    weights = tmp_path / "init.dnaw"
    main(["export-init", "--config", str(quick_config), "--out", str(weights)])
    image = synthetic_images(1, 32, seed=21, channels=3)[0]
    image_path = tmp_path / "img.ppm"
    save_image(image, image_path)
    dump = tmp_path / "latent.bin"
    code = main([
        "dump-latent", "--weights", str(weights),
        "--image", str(image_path), "--out", str(dump),
    ])
    assert code == 0
    latent = read_latent_dump(dump)
    assert latent.shape == (4, 8, 8)
    assert latent.dtype == np.float32
    assert float(np.abs(latent).max()) <= 1.0


def test_missing_config_exits_with_error(tmp_path, capsys):
    code = main(["export-init", "--config", str(tmp_path / "nope.toml"),
                 "--out", str(tmp_path / "x.dnaw")])
    assert code == 2
    assert "error:" in capsys.readouterr().err
