"""Command-line interface: train models, export weights, dump latents."""

from __future__ import annotations

import argparse
import csv
import sys

from .errors import TrainerError
from .latent_dump import write_latent_dump
from .schedule import NoiseSchedule
from .train import (
    EpochStats,
    build_model,
    encode_latent,
    load_config,
    load_training_images,
    train_model,
)
from .weights import export_model, import_model


def _write_history(history: list[EpochStats], path: str) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("epoch", "stage", "noise_level", "loss", "distortion", "rate"))
        for row in history:
            writer.writerow((
                row.epoch, row.stage, f"{row.noise_level:.6g}",
                f"{row.loss:.6g}", f"{row.distortion:.6g}", f"{row.rate:.6g}",
            ))


def cmd_train(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    images = load_training_images(cfg)
    schedule = None
    if args.noise:
        schedule = NoiseSchedule(
            max_level=cfg.noise_max_level,
            total_epochs=max(cfg.total_epochs, 1),
        )
    encoder, decoder, history = train_model(images, cfg, schedule)
    export_model(encoder, decoder, cfg.latent_channels, cfg.step, args.out)
    if args.history:
        _write_history(history, args.history)
    final = history[-1] if history else None
    peak = schedule.max_level if schedule else 0.0
    print(f"trained {cfg.total_epochs} epochs (peak noise {peak:.6g}), wrote {args.out}")
    if final is not None:
        print(
            f"final epoch: loss {final.loss:.6g}, distortion {final.distortion:.6g}, "
            f"rate {final.rate:.6g} nt/component"
        )
    return 0


def cmd_export_init(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    encoder, decoder = build_model(cfg)
    export_model(encoder, decoder, cfg.latent_channels, cfg.step, args.out)
    print(f"wrote untrained seeded model to {args.out}")
    return 0


def cmd_dump_latent(args: argparse.Namespace) -> int:
    from .data import load_image

    encoder, _, contents = import_model(args.weights)
    image = load_image(args.image)
    latent = encode_latent(encoder, image)
    if latent.shape[0] != contents.latent_channels:
        raise TrainerError(
            f"latent has {latent.shape[0]} channels, "
            f"file declares {contents.latent_channels}"
        )
    write_latent_dump(latent, args.out)
    print(f"wrote latent {latent.shape} to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnatrainer",
        description="Train the DNA-codec autoencoder and export interchange weights.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run both optimization stages and export weights")
    p.add_argument("--config", required=True, help="TOML hyperparameter file")
    p.add_argument("--out", required=True, help="output weight file")
    p.add_argument(
        "--noise",
        action=argparse.BooleanOptionalAction,
        default=False,
        help="ramp Gaussian latent noise up to the configured max level",
    )
    p.add_argument("--history", default=None, help="write per-epoch stats CSV")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser(
        "export-init",
        help="export the untrained seeded model (fast round-trip and parity checks)",
    )
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_init)

    p = sub.add_parser(
        "dump-latent",
        help="forward an image through exported encoder weights, write the latent dump",
    )
    p.add_argument("--weights", required=True, help="interchange weight file")
    p.add_argument("--image", required=True, help="PGM/PPM input image")
    p.add_argument("--out", required=True, help="latent dump output path")
    p.set_defaults(func=cmd_dump_latent)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TrainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
