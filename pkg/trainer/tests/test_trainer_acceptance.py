"""Acceptance gate for the trainer, one test per criterion.

Each test prints one [PASS]/[FAIL] line.  Tolerances are pinned here and
must not be loosened.  The codec is exercised only through its external
surfaces: the command line, the interchange weight file, and the latent
dump format.
"""

import csv
import functools
import subprocess
import sys
from pathlib import Path

import numpy as np
import torch

from dnatrainer import (
    NoiseSchedule,
    build_model,
    encode_latent,
    export_model,
    load_config,
    load_training_images,
    read_latent_dump,
    save_image,
    straight_through_quantize,
    synthetic_images,
    train_model,
)

TOY_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "toy.toml"


def criterion(name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(tmp_path):
            try:
                detail = fn(tmp_path)
            except BaseException as exc:
                print(f"[FAIL] {name}: {exc}")
                raise
            print(f"[PASS] {name}: {detail}")

        return wrapper

    return deco


def run_codec(*args: str) -> subprocess.CompletedProcess:
    result = subprocess.run(
        [sys.executable, "-m", "dnacodec", *args], capture_output=True, text=True
    )
    if result.returncode != 0:
        raise AssertionError(
            f"codec command {args[0]} failed ({result.returncode}): {result.stderr}"
        )
    return result


@criterion("straight-through gradient vs finite differences")
def test_criterion_straight_through_gradient(tmp_path):
    """Analytic gradients through the quantizer match finite differences of
    the same network with the quantizer bypassed, on 50 random cases."""
    # The pass-through estimator replaces the staircase with the identity,
    # so its gradient equals the bypassed network's gradient evaluated at
    # the quantized forward point.  The comparison is meaningful in the
    # fine-step regime, where that point is within step/2 of the continuous
    # one; coarse steps bias the estimator by design.
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        mat_in = torch.tensor(rng.normal(scale=0.7, size=(6, 4)))
        mat_out = torch.tensor(rng.normal(scale=0.7, size=(1, 6)))
        step = float(rng.uniform(1e-6, 1e-5))

        def network(x, quantized):
            hidden = torch.tanh(mat_in @ x)
            if quantized:
                hidden = straight_through_quantize(hidden, step)
            return (mat_out @ torch.sin(3.0 * hidden)).squeeze()

        x0 = torch.tensor(rng.uniform(-1.0, 1.0, size=4), requires_grad=True)
        network(x0, quantized=True).backward()
        analytic = x0.grad.numpy()

        h = 1e-6
        fd = np.empty(4)
        base = x0.detach()
        for i in range(4):
            delta = torch.zeros(4, dtype=torch.float64)
            delta[i] = h
            upper = float(network(base + delta, quantized=False))
            lower = float(network(base - delta, quantized=False))
            fd[i] = (upper - lower) / (2.0 * h)

        rel = float(np.max(np.abs(analytic - fd)) / max(np.max(np.abs(fd)), 1e-12))
        worst = max(worst, rel)
        assert rel <= 1e-3, f"case {seed}: relative error {rel}"
    return f"50 cases, worst relative error {worst:.3e} (tolerance 1e-3)"


@criterion("cross-implementation latent parity")
def test_criterion_cross_parity(tmp_path):
    """Exported toy weights produce the same latents in the codec's engine
    as in the trainer's own forward pass, within 1e-4 per component on 10
    fixed images."""
    cfg = load_config(TOY_CONFIG)
    encoder, decoder = build_model(cfg)
    weights = tmp_path / "model.dnaw"
    export_model(encoder, decoder, cfg.latent_channels, cfg.step, weights)

    images = synthetic_images(10, 48, seed=555, channels=cfg.in_channels)
    worst = 0.0
    for index, image in enumerate(images):
        image_path = tmp_path / f"parity{index}.ppm"
        save_image(image, image_path)
        engine_dump = tmp_path / f"engine{index}.lat"
        run_codec(
            "encode", str(image_path), str(tmp_path / f"c{index}.dnac"),
            "--transform", f"weights={weights}",
            "--q", str(cfg.step), "--n", "3",
            "--dump-latent", str(engine_dump),
        )
        engine_latent = read_latent_dump(engine_dump)
        trainer_latent = encode_latent(encoder, image)
        assert engine_latent.shape == trainer_latent.shape
        diff = float(np.max(np.abs(engine_latent - trainer_latent)))
        worst = max(worst, diff)
        assert diff <= 1e-4, f"image {index}: max component difference {diff}"
    return f"10 images, worst component difference {worst:.3e} (tolerance 1e-4)"


def _mean_psnr_at(weights: Path, image_paths: list[Path], step: float,
                  rate: float, tmp_path: Path, tag: str) -> float:
    """Average PSNR over 30 channel seeds via the codec's sweep command."""
    out = tmp_path / f"sweep_{tag}_{rate}.csv"
    run_codec(
        "sweep", "--images", *[str(p) for p in image_paths],
        "--q", str(step), "--rates", str(rate), "--seeds", "0..30",
        "--n", "3", "--transform", f"weights={weights}", "--csv", str(out),
    )
    with open(out) as handle:
        averages = [row for row in csv.DictReader(handle) if row["image"] == "(average)"]
    assert len(averages) == 1 and averages[0]["status"] == "avg of 90"
    return float(averages[0]["psnr_db"])


@criterion("noise-robustness gain at 5% substitution")
def test_criterion_noise_robustness_gain(tmp_path):
    """A noise-ramp-trained toy model beats its noise-free twin through the
    full codec pipeline at 5% substitution, averaged over 30 seeds on 3
    held-out images (>= 0 dB required, >= 0.3 dB target)."""
    cfg = load_config(TOY_CONFIG)
    images = load_training_images(cfg)
    schedule = NoiseSchedule(max_level=cfg.noise_max_level, total_epochs=cfg.total_epochs)

    enc_plain, dec_plain, _ = train_model(images, cfg, None)
    enc_noise, dec_noise, _ = train_model(images, cfg, schedule)

    plain_weights = tmp_path / "plain.dnaw"
    noise_weights = tmp_path / "noise.dnaw"
    export_model(enc_plain, dec_plain, cfg.latent_channels, cfg.step, plain_weights)
    export_model(enc_noise, dec_noise, cfg.latent_channels, cfg.step, noise_weights)

    held_out = synthetic_images(3, 48, seed=999, channels=cfg.in_channels)
    image_paths = []
    for index, image in enumerate(held_out):
        path = tmp_path / f"eval{index}.ppm"
        save_image(image, path)
        image_paths.append(path)

    plain_psnr = _mean_psnr_at(plain_weights, image_paths, cfg.step, 0.05, tmp_path, "plain")
    noise_psnr = _mean_psnr_at(noise_weights, image_paths, cfg.step, 0.05, tmp_path, "noise")
    gain = noise_psnr - plain_psnr
    assert gain >= 0.0, (
        f"noise-trained {noise_psnr:.3f} dB vs noise-free {plain_psnr:.3f} dB"
    )
    target = "meets" if gain >= 0.3 else "misses"
    return (
        f"noise-trained {noise_psnr:.3f} dB vs noise-free {plain_psnr:.3f} dB, "
        f"gain {gain:+.3f} dB ({target} the 0.3 dB target; 0 dB required)"
    )
