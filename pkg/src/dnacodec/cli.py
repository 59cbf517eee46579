"""Command-line interface for the codec pipeline.

Exit codes: 0 success, 2 configuration error, 3 format error, 4 capacity
error.  All randomness is seeded through flags, so every invocation with
fully specified seeds is reproducible.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .codebook import CodebookConfig, format_dump, generate
from .container import load_container, save_container, to_fasta
from .errors import CapacityError, ConfigError, DnaCodecError, FormatError
from .images import load_image, save_image
from .metrics import entropy_nt, histogram, psnr
from .pipeline import (
    apply_channel,
    decode_to_image,
    encode_to_container,
    parse_transform,
    reference_transform,
)
from .quantizer import QuantizerConfig, quantize
from .reference import reference_encode
from .sweep import (
    CSV_COLUMNS,
    SweepSpec,
    row_to_csv_dict,
    run_sweep,
    write_csv,
)

_TRANSFORM_HELP = "transform choice: 'reference' or 'weights=<path>'"


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok != "")
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of reals: {text!r}") from None


def _parse_seeds(text: str) -> tuple[int, ...]:
    """Comma-separated integers; 'a..b' expands to the half-open range."""
    seeds: list[int] = []
    for tok in text.split(","):
        if tok == "":
            continue
        try:
            if ".." in tok:
                lo, hi = tok.split("..")
                seeds.extend(range(int(lo), int(hi)))
            else:
                seeds.append(int(tok))
        except ValueError:
            raise ConfigError(f"bad seed token {tok!r} in {text!r}") from None
    return tuple(seeds)


def _print_report_row(row_dict: dict[str, str], csv_path: str | None) -> None:
    line = ",".join(row_dict[c] for c in CSV_COLUMNS)
    print(",".join(CSV_COLUMNS))
    print(line)
    if csv_path:
        with open(csv_path, "w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            writer.writerow(row_dict)


def _report_dict(
    image_name: str,
    transform_name: str,
    container,
    symbols,
    original=None,
    reconstructed=None,
) -> dict[str, str]:
    header = container.header
    rate, seed = 0.0, None
    if header.channel_records:
        rate = header.channel_records[-1].rate
        seed = header.channel_records[-1].seed
    value = entropy_nt(histogram(symbols))
    nt_per_pixel = len(container.payload.bases) / float(header.width * header.height)
    psnr_text = ""
    if original is not None and reconstructed is not None:
        measured = psnr(original, reconstructed)
        psnr_text = "inf" if measured == float("inf") else f"{measured:.6g}"
    return {
        "image": image_name,
        "transform": transform_name,
        "q": f"{header.step:.6g}",
        "n": str(header.codeword_length),
        "rate": f"{rate:.6g}",
        "seed": "" if seed is None else str(seed),
        "entropy_nt_per_component": f"{value:.6g}",
        "nt_per_pixel": f"{nt_per_pixel:.6g}",
        "psnr_db": psnr_text,
        "status": "ok",
    }


def cmd_encode(args: argparse.Namespace) -> int:
    transform = parse_transform(args.transform)
    image = load_image(args.image)
    container = encode_to_container(
        image,
        transform,
        args.q,
        args.n,
        max_run=args.max_run,
        gc_min=args.gc_min,
        gc_max=args.gc_max,
    )
    save_container(container, args.output)
    if args.fasta:
        Path(str(args.output) + ".fasta").write_text(
            to_fasta(container, name=Path(args.image).stem)
        )
    if args.dump_latent:
        from .images import pad_to_multiple
        from .latent_dump import write_latent_dump
        from .nn import encode_image

        padded = pad_to_multiple(image, transform.divisor)
        if transform.kind == "reference":
            latent = reference_encode(padded)
        else:
            latent = encode_image(padded, transform.net)
        write_latent_dump(latent, args.dump_latent)
    return 0


def cmd_channel(args: argparse.Namespace) -> int:
    container = load_container(args.container)
    passed = apply_channel(container, args.rate, args.seed)
    save_container(passed, args.output)
    if args.fasta:
        Path(str(args.output) + ".fasta").write_text(to_fasta(passed))
    return 0


def cmd_decode(args: argparse.Namespace) -> int:
    container = load_container(args.container)
    if args.transform is not None:
        transform = parse_transform(args.transform)
    elif container.header.transform == "reference":
        transform = reference_transform()
    else:
        raise ConfigError(
            "container was encoded with learned weights; pass "
            "--transform weights=<path>"
        )
    image, symbols = decode_to_image(container, transform)
    save_image(image, args.output)
    original = load_image(args.original) if args.original else None
    row = _report_dict(
        args.original or str(args.output),
        container.header.transform,
        container,
        symbols,
        original,
        image if original is not None else None,
    )
    _print_report_row(row, args.csv)
    return 0


def cmd_roundtrip(args: argparse.Namespace) -> int:
    transform = parse_transform(args.transform)
    image = load_image(args.image)
    container = encode_to_container(
        image,
        transform,
        args.q,
        args.n,
        max_run=args.max_run,
        gc_min=args.gc_min,
        gc_max=args.gc_max,
    )
    if args.rate > 0.0:
        container = apply_channel(container, args.rate, args.seed)
    decoded, symbols = decode_to_image(container, transform)
    save_image(decoded, args.output)
    if args.save_container:
        save_container(container, args.save_container)
    row = _report_dict(
        str(args.image), args.transform, container, symbols, image, decoded
    )
    row["rate"] = f"{args.rate:.6g}"
    row["seed"] = str(args.seed)
    _print_report_row(row, args.csv)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = SweepSpec(
        images=tuple(args.images),
        steps=_parse_floats(args.q),
        rates=_parse_floats(args.rates),
        seeds=_parse_seeds(args.seeds),
        codeword_length=args.n,
        max_run=args.max_run,
        transform=args.transform,
    )
    rows = run_sweep(spec, max_workers=args.workers)
    write_csv(rows, args.csv)
    failed = sum(1 for r in rows if r.status.startswith("error"))
    print(f"wrote {len(rows)} rows to {args.csv} ({failed} failed)")
    return 0


def cmd_codebook_gen(args: argparse.Namespace) -> int:
    cfg = CodebookConfig(
        codeword_length=args.n,
        max_run=args.max_run,
        gc_min=args.gc_min,
        gc_max=args.gc_max,
    )
    book = generate(cfg)
    Path(args.output).write_text(format_dump(book))
    print(f"{len(book.words)} codewords written to {args.output}")
    return 0


def cmd_info(args: argparse.Namespace) -> int:
    container = load_container(args.container)
    if args.fasta:
        print(to_fasta(container), end="")
        return 0
    header = container.header
    print(f"image: {header.width}x{header.height}x{header.channels}")
    print(f"latent: {header.latent_shape}")
    print(f"q: {header.step:.6g}")
    print(f"n: {header.codeword_length}")
    print(f"max_run: {header.max_run}")
    print(f"gc_min: {'-' if header.gc_min is None else f'{header.gc_min:.6g}'}")
    print(f"gc_max: {'-' if header.gc_max is None else f'{header.gc_max:.6g}'}")
    print(f"symbol_offset: {header.symbol_offset}")
    if header.transform == "reference":
        print("transform: reference")
    else:
        print(f"transform: weights (checksum {header.weights_checksum:#018x})")
    print(f"payload_bases: {len(container.payload.bases)}")
    for record in header.channel_records:
        print(f"channel: rate={record.rate:.6g} seed={record.seed}")
    return 0


def _add_codebook_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=3, help="codeword length")
    parser.add_argument("--max-run", type=int, default=2, help="max homopolymer run")
    parser.add_argument("--gc-min", type=float, default=None, help="min GC fraction")
    parser.add_argument("--gc-max", type=float, default=None, help="max GC fraction")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnacodec",
        description="Image codec and substitution-channel simulator for "
        "synthetic-DNA storage.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="image -> DNA container")
    p.add_argument("image")
    p.add_argument("output")
    p.add_argument("--transform", default="reference", help=_TRANSFORM_HELP)
    p.add_argument("--q", type=float, default=0.5, help="quantizer step")
    _add_codebook_flags(p)
    p.add_argument("--fasta", action="store_true", help="also write <output>.fasta")
    p.add_argument(
        "--dump-latent",
        metavar="PATH",
        default=None,
        help="write the pre-quantization latent tensor "
        "(u32 channels/height/width header, then flat f32 values)",
    )
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("channel", help="apply the substitution channel")
    p.add_argument("container")
    p.add_argument("output")
    p.add_argument("--rate", type=float, required=True, help="substitution rate")
    p.add_argument("--seed", type=int, default=0, help="channel seed")
    p.add_argument("--fasta", action="store_true", help="also write <output>.fasta")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("decode", help="DNA container -> image")
    p.add_argument("container")
    p.add_argument("output")
    p.add_argument("--transform", default=None, help=_TRANSFORM_HELP)
    p.add_argument(
        "--original", default=None, help="original image for the PSNR column"
    )
    p.add_argument("--csv", default=None, help="also write the report row here")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("roundtrip", help="encode, optional channel, decode")
    p.add_argument("image")
    p.add_argument("output")
    p.add_argument("--transform", default="reference", help=_TRANSFORM_HELP)
    p.add_argument("--q", type=float, default=0.5, help="quantizer step")
    _add_codebook_flags(p)
    p.add_argument("--rate", type=float, default=0.0, help="substitution rate")
    p.add_argument("--seed", type=int, default=0, help="channel seed")
    p.add_argument("--csv", default=None, help="also write the report row here")
    p.add_argument(
        "--save-container", default=None, help="keep the (noisy) container file"
    )
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("sweep", help="grid of (image, q, rate, seed) runs")
    p.add_argument("--images", nargs="+", required=True)
    p.add_argument("--q", default="0.5", help="comma-separated quantizer steps")
    p.add_argument("--rates", default="0", help="comma-separated substitution rates")
    p.add_argument(
        "--seeds", default="0", help="comma-separated seeds; 'a..b' is a range"
    )
    p.add_argument("--n", type=int, default=3, help="codeword length")
    p.add_argument("--max-run", type=int, default=2, help="max homopolymer run")
    p.add_argument("--transform", default="reference", help=_TRANSFORM_HELP)
    p.add_argument("--csv", required=True, help="output CSV path")
    p.add_argument("--workers", type=int, default=4, help="worker pool size")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("codebook-gen", help="write a constrained codebook listing")
    p.add_argument("output")
    _add_codebook_flags(p)
    p.set_defaults(func=cmd_codebook_gen)

    p = sub.add_parser("info", help="print container header fields")
    p.add_argument("container")
    p.add_argument("--fasta", action="store_true", help="print FASTA text instead")
    p.set_defaults(func=cmd_info)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 4
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return 3
    except DnaCodecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
