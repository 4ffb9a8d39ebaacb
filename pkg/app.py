# app.py

import argparse
import logging
import sys
from pathlib import Path

import pipeline
from config import DEFAULT_CONFIGS
from errors import QicError, UsageError
from utils import (
    getenv_bool,
    getenv_int,
    getenv_str,
    load_config_file,
    parse_bool,
    parse_int_list,
    parse_str_list,
    setup_logging,
)

logger = logging.getLogger(__name__)

# keys a --config file may set; they mirror the long flag names
CONFIG_KEYS = {
    "image", "q", "q_preset", "scheme", "images", "out", "level_shift",
    "emit_circuits", "emit_recon", "workers", "manifest", "quirk", "samples",
}


def positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}")
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {number}")
    return number


def positive_int_list(value: str) -> list[int]:
    numbers = parse_int_list(value)
    if not numbers or any(n < 1 for n in numbers):
        raise argparse.ArgumentTypeError(f"expected comma-separated positive integers, got {value!r}")
    return numbers


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qic", description="Block-DCT quantum image encoder and gate-count benchmark.")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    encode = sub.add_parser("encode", help="encode one image into a circuit JSON file")
    encode.add_argument("--image", help="PGM or PNG input")
    encode.add_argument("--q", type=positive_int, help="quantization factor")
    encode.add_argument("--scheme", choices=pipeline.ALL_SCHEMES)
    encode.add_argument("--out", help="output directory")
    encode.add_argument("--level-shift", action="store_true", default=None)
    encode.add_argument("--quirk", action="store_true", default=None, help="also write a visual-simulator link")
    encode.add_argument("--config", help="key=value settings file")

    decode = sub.add_parser("decode", help="reconstruct the image a circuit encodes")
    decode.add_argument("circuit", help="circuit JSON file")
    decode.add_argument("--image", help="original image, to report MSE and PSNR")
    decode.add_argument("--out", help="reconstruction path (.pgm or .png)")
    decode.add_argument("--width", type=positive_int)
    decode.add_argument("--height", type=positive_int)
    decode.add_argument("--q", type=positive_int)
    decode.add_argument("--level-shift", action="store_true", default=None)
    decode.add_argument("--config", help="key=value settings file")

    verify = sub.add_parser("verify", help="compare full-control and modified circuits block by block")
    verify.add_argument("circuit", nargs="?", help="circuit JSON file")
    verify.add_argument("--demo", help="built-in worked example instead of a file")
    verify.add_argument("--samples", type=int, help="blocks to simulate (0: all)")
    verify.add_argument("--out", help="output directory")
    verify.add_argument("--config", help="key=value settings file")

    sweep = sub.add_parser("sweep", help="run the benchmark over the dataset manifest")
    sweep.add_argument("--images", help="comma-separated manifest names (default: all)")
    sweep.add_argument("--q", type=positive_int_list, help="comma-separated quantization factors")
    sweep.add_argument("--q-preset", choices=["default", "extended"])
    sweep.add_argument("--scheme", help="comma-separated schemes")
    sweep.add_argument("--out", help="output directory")
    sweep.add_argument("--manifest", help="manifest file")
    sweep.add_argument("--workers", type=int, help="thread count (0: automatic)")
    sweep.add_argument("--level-shift", action="store_true", default=None)
    sweep.add_argument("--emit-circuits", action="store_true", default=None)
    sweep.add_argument("--emit-recon", action="store_true", default=None)
    sweep.add_argument("--config", help="key=value settings file")
    return parser


class Settings:
    """Resolves one setting: command line, then config file, then environment, then defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file = load_config_file(args.config) if getattr(args, "config", None) else {}
        unknown = sorted(set(self.file) - CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")

    def get(self, name: str, parse=str, default=None):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        if name in self.file:
            try:
                return parse(self.file[name])
            except (ValueError, argparse.ArgumentTypeError) as e:
                raise UsageError(f"config key {name}: {e}")
        return default


def _out_dir(settings: Settings) -> Path:
    return Path(settings.get("out", default=getenv_str("QIC_OUTPUT_DIR", DEFAULT_CONFIGS["OUTPUT_DIR"])))


def _level_shift(settings: Settings) -> bool:
    return settings.get("level_shift", parse_bool, getenv_bool("QIC_LEVEL_SHIFT", DEFAULT_CONFIGS["LEVEL_SHIFT"]))


def run_encode(settings: Settings) -> None:
    image = settings.get("image")
    q = settings.get("q", positive_int)
    if image is None or q is None:
        raise UsageError("encode needs --image and --q")
    result = pipeline.cmd_encode(
        image,
        q,
        settings.get("scheme", pipeline.check_scheme, "mtgsc"),
        _out_dir(settings),
        level_shift=_level_shift(settings),
        quirk=settings.get("quirk", parse_bool, False),
    )
    stats = result["stats"]
    print(f"{stats.scheme}: {stats.total_gates} gates, {stats.gates_per_pixel:.4f} gates per pixel")
    for path in result["written"].values():
        print(f"wrote {path}")


def run_decode(settings: Settings) -> None:
    args = settings.args
    dims = None
    if args.width or args.height:
        if not (args.width and args.height):
            raise UsageError("pass both --width and --height")
        dims = (args.width, args.height)
    result = pipeline.cmd_decode(
        args.circuit,
        out_path=settings.get("out"),
        dims=dims,
        q=settings.get("q", positive_int),
        original=settings.get("image"),
        level_shift=_level_shift(settings),
    )
    report = result["quality"]
    if report is not None:
        value = "inf" if report.psnr == float("inf") else f"{report.psnr:.2f} dB"
        print(f"mse {report.mse:.4f}, psnr {value}")
    for path in result["written"].values():
        print(f"wrote {path}")


def run_verify(settings: Settings) -> None:
    args = settings.args
    result = pipeline.cmd_verify(
        args.circuit,
        demo=args.demo,
        out_dir=_out_dir(settings),
        samples=settings.get("samples", int),
    )
    report = result["report"]
    for block in report["blocks"]:
        print(
            f"block {tuple(block['block'])}: tv {block['tv_distance']:.6g}, "
            f"equivalent {block['equivalent']}, decodes equal {block['decodes_equal']}"
        )
    for block in report["skipped"]:
        print(f"block {tuple(block['block'])}: skipped ({block['reason']})")
    for path in result["written"].values():
        print(f"wrote {path}")


def sweep_config(settings: Settings) -> pipeline.SweepConfig:
    preset = settings.get("q_preset", default="default")
    if preset not in ("default", "extended"):
        raise UsageError(f"unknown q preset {preset!r}")
    q_default = DEFAULT_CONFIGS["EXTENDED_Q_FACTORS" if preset == "extended" else "Q_FACTORS"]
    schemes = settings.get("scheme", default=None)
    manifest = settings.get("manifest")
    return pipeline.SweepConfig(
        images=parse_str_list(settings.get("images", default="")),
        q_factors=list(settings.get("q", positive_int_list, q_default)),
        schemes=parse_str_list(schemes) if schemes else list(DEFAULT_CONFIGS["SCHEMES"]),
        output_dir=_out_dir(settings),
        manifest=Path(manifest) if manifest else None,
        level_shift=_level_shift(settings),
        emit_circuits=settings.get("emit_circuits", parse_bool, DEFAULT_CONFIGS["EMIT_CIRCUITS"]),
        emit_recon=settings.get("emit_recon", parse_bool, DEFAULT_CONFIGS["EMIT_RECON"]),
        workers=settings.get("workers", int, getenv_int("QIC_WORKERS", DEFAULT_CONFIGS["WORKERS"])),
    )


def run_sweep(settings: Settings) -> int:
    outcome = pipeline.cmd_sweep(sweep_config(settings))
    print(f"{len(outcome.records)} result row(s)")
    for line in outcome.summary_lines():
        print(line)
    for path in outcome.written.values():
        print(f"wrote {path}")
    # every job failed: nothing usable was produced
    return 1 if outcome.failures and not outcome.records else 0


COMMANDS = {
    "encode": run_encode,
    "decode": run_decode,
    "verify": run_verify,
    "sweep": run_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        setup_logging("DEBUG")
    elif args.quiet:
        setup_logging("WARNING")
    else:
        setup_logging()
    try:
        settings = Settings(args)
        return COMMANDS[args.command](settings) or 0
    except UsageError as e:
        print(f"error: UsageError: {e}", file=sys.stderr)
        return 2
    except (QicError, OSError) as e:
        logger.debug("command failed", exc_info=True)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
