"""Command-line entry point: ``python -m xrdfilter <command> ...``."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from . import __version__, settings
from .cli.handler import CommandHandler
from .errors import EXIT_DATA, XrdFilterError
from .utils.logging import get_logger, set_level

logger = get_logger(__name__)


def _common_options(seed_default: Optional[int] = 0) -> argparse.ArgumentParser:
    """Options shared by every command; each call builds fresh actions."""
    common = argparse.ArgumentParser(add_help=False)
    seed_help = "Seed for every random stream (default 0)"
    if seed_default is None:
        seed_help = "Overrides the config master_seed"
    common.add_argument("--seed", type=int, default=seed_default, help=seed_help)
    common.add_argument(
        "--units",
        choices=("degrees", "radians"),
        default=settings.DEFAULT_ANGLE_UNITS,
        help="Angle units of profile files",
    )
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="xrdfilter", description="HLSVD-PRO filtering of powder diffraction profiles"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", parents=[common], help="Synthesize a noiseless profile")
    synth.add_argument("--config", help="SampleSpec JSON")
    synth.add_argument("--preset", choices=("2nm", "3nm", "4nm"), help="Built-in size preset")
    synth.add_argument("--normalize", action="store_true", help="Normalize size weights over the shells")
    synth.add_argument("--out", required=True)

    noise = sub.add_parser("noise", parents=[common], help="Add Poisson counting noise")
    noise.add_argument("--in", dest="input", required=True)
    noise.add_argument("--F", type=float, default=1.0, help="Intensity scaling factor")
    noise.add_argument("--noise-seed", type=int, default=None, help="Overrides --seed for the noise stream")
    noise.add_argument("--out", required=True)

    flt = sub.add_parser("filter", parents=[common], help="Filter a profile")
    flt.add_argument("--in", dest="input", required=True)
    order = flt.add_mutually_exclusive_group()
    order.add_argument("--K", type=int, default=None, help="Model order")
    order.add_argument("--auto", action="store_true", help="Select K from the order scan (default)")
    order.add_argument("--cutoff", type=float, default=None, help="Keep components with |f| below this (rad^-1)")
    flt.add_argument("--kmax", type=int, default=settings.DEFAULT_KMAX)
    flt.add_argument("--gap", type=float, default=settings.DEFAULT_GAP_DECADES, help="Minimum drop in decades")
    flt.add_argument("--out", required=True)
    flt.add_argument("--report", help="JSON report with every estimated component")
    flt.add_argument("--residual", help="Also write measured minus filtered")

    scan = sub.add_parser("order", parents=[common], help="Order scan and K selection")
    scan.add_argument("--in", dest="input", required=True)
    scan.add_argument("--kmax", type=int, default=settings.DEFAULT_KMAX)
    scan.add_argument("--gap", type=float, default=settings.DEFAULT_GAP_DECADES)
    scan.add_argument("--out", required=True, help="(|f|, singular value) series")
    scan.add_argument("--svg", help="Log-scale scatter of the scan")
    scan.add_argument("--dft", help="DFT amplitude series for comparison")

    ratio = sub.add_parser("nsr", parents=[common], help="Noise-to-signal ratio")
    ratio.add_argument("--in", dest="input", required=True)
    ratio.add_argument("--mode", choices=("deterministic", "realization", "measured"), default="deterministic")
    ratio.add_argument("--curve", help="Comma-separated factors F for an NSR-vs-F series")
    ratio.add_argument("--out", help="Series file for --curve")

    bench = sub.add_parser(
        "bench", parents=[_common_options(seed_default=None)], help="Monte Carlo filter benchmark"
    )
    bench.add_argument("--config", help="BenchConfig JSON")
    bench.add_argument("--out", required=True, help="Output directory")
    bench.add_argument("--runs", type=int, default=None)
    bench.add_argument("--workers", type=int, default=None)
    bench.add_argument("--table", choices=("1", "2", "both"), default="both")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.log_level:
            set_level(args.log_level)
        return CommandHandler(args).handle()
    except XrdFilterError as exc:
        sys.stderr.write(f"error: {exc} [{exc.code}]\n")
        return exc.exit_code
    except ValidationError as exc:
        first = exc.errors()[0]
        sys.stderr.write(f"error: {'.'.join(str(p) for p in first.get('loc', ()))}: {first.get('msg')}\n")
        return EXIT_DATA
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
