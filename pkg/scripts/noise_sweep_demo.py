"""Run a substitution-rate sweep over generated test images and print the
average PSNR per rate, reproducing the characteristic quality collapse."""

import argparse
import tempfile
from pathlib import Path

from make_test_images import MAKERS

from dnacodec.images import save_image
from dnacodec.sweep import AVERAGE_LABEL, SweepSpec, run_sweep, write_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--q", type=float, default=0.1, help="quantizer step")
    parser.add_argument("--n", type=int, default=3, help="codeword length")
    parser.add_argument("--seeds", type=int, default=30, help="seeds per point")
    parser.add_argument("--size", type=int, default=48, help="image side length")
    parser.add_argument("--csv", type=Path, default=None, help="also write rows here")
    args = parser.parse_args()

    rates = (0.0, 0.01, 0.02, 0.05, 0.10)
    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for name, (maker, suffix) in MAKERS.items():
            if suffix != ".pgm":
                continue
            path = Path(tmp) / f"{name}{suffix}"
            save_image(maker(args.size), path)
            paths.append(str(path))
        spec = SweepSpec(
            images=tuple(paths),
            steps=(args.q,),
            rates=rates,
            seeds=tuple(range(args.seeds)),
            codeword_length=args.n,
        )
        rows = run_sweep(spec)

    if args.csv:
        write_csv(rows, args.csv)
        print(f"rows written to {args.csv}")
    print(f"q={args.q} n={args.n} images={len(paths)} seeds={args.seeds}")
    print("rate      avg PSNR (dB)")
    for row in rows:
        if row.image == AVERAGE_LABEL:
            print(f"{row.rate:<8g}  {row.psnr_db:8.2f}")


if __name__ == "__main__":
    main()
