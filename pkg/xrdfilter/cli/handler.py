from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .. import settings
from ..errors import EXIT_OK, BenchFailure, NoTransition, UsageError
from ..models.bench import BenchConfig, NoiseSpec
from ..models.profile import IntensityProfile
from ..models.sample import size_preset
from ..services.bench import failed_cells, format_table, run_table1, run_table2
from ..services.debye import total_intensity
from ..services.estimator import filter_with_cutoff, hlsvd_filter, residual
from ..services.model_order import dft_spectrum, order_scan, select_order
from ..services.noise import measured_nsr, nsr, nsr_curve, poissonize
from ..utils.logging import get_logger
from . import plot
from .protocol import (
    load_bench_config,
    load_sample_spec,
    read_profile,
    write_bench_csv,
    write_profile,
    write_report,
    write_series,
)

logger = get_logger(__name__)


def _parse_factors(text: str) -> List[float]:
    try:
        factors = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"--curve expects comma-separated numbers: {exc}") from exc
    if not factors or any(f <= 0 for f in factors):
        raise UsageError("--curve factors must be positive")
    return factors


class CommandHandler:
    """Runs one parsed command line and returns its exit code."""

    def __init__(self, args: argparse.Namespace, stdout=None):
        self.args = args
        self.stdout = stdout or sys.stdout

    def handle(self) -> int:
        command = getattr(self, f"_handle_{self.args.command}", None)
        if command is None:
            raise UsageError(f"unknown command {self.args.command!r}")
        return command()

    def _print(self, text: str) -> None:
        self.stdout.write(text + "\n")

    def _read(self, path) -> IntensityProfile:
        return read_profile(path, self.args.units)

    def _write(self, path, profile: IntensityProfile, header) -> None:
        write_profile(path, profile, self.args.units, header)
        logger.info("Wrote %s", path)

    def _handle_synth(self) -> int:
        args = self.args
        if (args.config is None) == (args.preset is None):
            raise UsageError("synth needs exactly one of --config or --preset")
        spec = load_sample_spec(args.config) if args.config else size_preset(args.preset)
        if args.normalize:
            spec = spec.model_copy(update={"normalize": True})
        profile = total_intensity(spec)
        self._write(args.out, profile, [f"synthetic profile: {spec.label}"])
        return EXIT_OK

    def _handle_noise(self) -> int:
        args = self.args
        if not args.F > 0:
            raise UsageError(f"--F must be positive, got {args.F}")
        seed = args.noise_seed if args.noise_seed is not None else args.seed
        if seed < 0:
            raise UsageError(f"noise seed must be nonnegative, got {seed}")
        spec = NoiseSpec(F=args.F, seed=seed)
        noisy = poissonize(self._read(args.input), spec)
        self._write(args.out, noisy, [f"poisson noise F={spec.F!r} seed={spec.seed}"])
        return EXIT_OK

    def _handle_filter(self) -> int:
        args = self.args
        profile = self._read(args.input)
        extra = {}
        if args.K is not None:
            if args.K < 1:
                raise UsageError(f"--K must be >= 1, got {args.K}")
            filtered, report = hlsvd_filter(profile, args.K, seed=args.seed)
        elif args.cutoff is not None:
            filtered, report = filter_with_cutoff(profile, args.cutoff, args.kmax, seed=args.seed)
            extra["f_cutoff"] = args.cutoff
        else:
            scan = order_scan(profile, args.kmax, seed=args.seed)
            decision = select_order(scan, g_min=args.gap)
            self._print(f"K={decision.K} f_cutoff={decision.f_cutoff:.6g}")
            filtered, report = hlsvd_filter(profile, decision.K, seed=args.seed)
            extra.update({"f_cutoff": decision.f_cutoff, "gap_decades": decision.score})
        self._write(args.out, filtered, [f"filtered with K={report.model.order}"])
        if args.report:
            write_report(args.report, report, profile.grid, extra)
        if args.residual:
            self._write(args.residual, residual(profile, filtered), ["measured minus filtered"])
        return EXIT_OK

    def _handle_order(self) -> int:
        args = self.args
        profile = self._read(args.input)
        scan = order_scan(profile, args.kmax, seed=args.seed)
        write_series(
            args.out,
            [[p.frequency for p in scan.pairs], [p.singular_value for p in scan.pairs]],
            [f"order scan k_max={scan.k_max}", "columns: |f| (rad^-1) singular_value"],
        )
        cutoff: Optional[float] = None
        try:
            decision = select_order(scan, g_min=args.gap)
            cutoff = decision.f_cutoff
            self._print(f"K={decision.K} f_cutoff={decision.f_cutoff:.6g}")
        except NoTransition as exc:
            logger.warning("%s", exc)
            self._print("K=none")
        if args.svg:
            plot.order_scan_svg(args.svg, scan, cutoff)
        if args.dft:
            frequencies, amplitudes = dft_spectrum(profile)
            write_series(args.dft, [frequencies, amplitudes], ["columns: f (rad^-1) |DFT|/N"])
            if args.svg:
                plot.spectrum_svg(Path(args.svg).with_suffix(".dft.svg"), (frequencies, amplitudes))
        return EXIT_OK

    def _handle_nsr(self) -> int:
        args = self.args
        profile = self._read(args.input)
        if args.curve:
            if args.mode == "measured":
                raise UsageError("--curve works with the deterministic or realization mode")
            curve = nsr_curve(profile, _parse_factors(args.curve), args.mode, args.seed)
            if args.out:
                write_series(args.out, [[c[0] for c in curve], [c[1] for c in curve]], ["columns: F NSR"])
            for F, value in curve:
                self._print(f"{F!r} {value!r}")
            return EXIT_OK
        if args.mode == "measured":
            value = measured_nsr(profile)
        else:
            value = nsr(profile, args.mode, args.seed)
        self._print(f"NSR={value:.6g}")
        return EXIT_OK

    def _bench_config(self) -> BenchConfig:
        args = self.args
        config = load_bench_config(args.config) if args.config else BenchConfig(
            runs=settings.DEFAULT_BENCH_RUNS, workers=settings.DEFAULT_BENCH_WORKERS
        )
        update = {}
        if args.seed is not None:
            update["master_seed"] = args.seed
        if args.runs is not None:
            update["runs"] = args.runs
        if args.workers is not None:
            update["workers"] = args.workers
        return BenchConfig.model_validate({**config.model_dump(), **update})

    def _handle_bench(self) -> int:
        args = self.args
        config = self._bench_config()
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        text = []
        failed = []
        if args.table in ("1", "both"):
            table1 = run_table1(config)
            write_bench_csv(out / "table1.csv", table1)
            text.append(format_table(table1, "Filter performance by size and NSR"))
            failed += failed_cells(table1)
        if args.table in ("2", "both"):
            table2 = run_table2(config)
            write_bench_csv(out / "table2.csv", table2)
            text.append(format_table(table2, "Filter performance around the selected order"))
            failed += failed_cells(table2)
        (out / "tables.txt").write_text("\n".join(text), encoding="utf-8")
        logger.info("Bench tables written to %s", out)
        if failed:
            for cell in failed:
                logger.error("Cell %s NSR=%.3f K=%d excluded %d runs", cell.size, cell.nsr, cell.K, cell.excluded)
            raise BenchFailure(f"{len(failed)} bench cell(s) exceeded the excluded-run limit")
        return EXIT_OK
