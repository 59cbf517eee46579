"""Write a small corpus of deterministic test images as PGM/PPM files."""

import argparse
from pathlib import Path

import numpy as np

from dnacodec.images import save_image


def gradient(size):
    y, x = np.mgrid[0:size, 0:size]
    v = 0.5 * x / size + 0.3 * np.sin(2 * np.pi * y / 16) + 0.2
    return (np.clip(v, 0, 1) * 255).astype(np.uint8)[:, :, None]


def blobs(size):
    y, x = np.mgrid[0:size, 0:size]
    v = np.exp(-((x - size * 0.3) ** 2 + (y - size * 0.6) ** 2) / (size * 1.7))
    v = v + 0.7 * np.exp(-((x - size * 0.7) ** 2 + (y - size * 0.25) ** 2) / (size * 3.0))
    return (np.clip(v, 0, 1) * 255).astype(np.uint8)[:, :, None]


def rings(size):
    y, x = np.mgrid[0:size, 0:size]
    r = np.sqrt((x - size / 2) ** 2 + (y - size / 2) ** 2)
    v = 0.5 + 0.45 * np.cos(r / 2.5)
    return (np.clip(v, 0, 1) * 255).astype(np.uint8)[:, :, None]


def color_ramp(size):
    y, x = np.mgrid[0:size, 0:size]
    image = np.zeros((size, size, 3), dtype=np.uint8)
    image[:, :, 0] = (255 * x / (size - 1)).astype(np.uint8)
    image[:, :, 1] = (255 * y / (size - 1)).astype(np.uint8)
    image[:, :, 2] = (127 + 120 * np.sin(x / 3.0)).astype(np.uint8)
    return image


MAKERS = {
    "gradient": (gradient, ".pgm"),
    "blobs": (blobs, ".pgm"),
    "rings": (rings, ".pgm"),
    "color_ramp": (color_ramp, ".ppm"),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", type=Path)
    parser.add_argument("--size", type=int, default=48)
    args = parser.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for name, (maker, suffix) in MAKERS.items():
        path = args.outdir / f"{name}{suffix}"
        save_image(maker(args.size), path)
        print(path)


if __name__ == "__main__":
    main()
