"""Monte Carlo filter benchmarks over sample size, NSR and model order."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigError, InvalidK, XrdFilterError
from ..models.bench import BenchCell, BenchConfig, BenchSample, BenchTable, KPolicy, NoiseSpec
from ..models.profile import IntensityProfile
from ..models.sample import SampleSpec, size_preset
from ..utils.logging import get_logger
from .debye import total_intensity
from .estimator import hlsvd_filter
from .model_order import auto_order
from .noise import nsr, performance_measure, poissonize, run_seed

logger = get_logger(__name__)

CSV_COLUMNS = ("size", "nsr", "K", "mean", "std", "runs", "excluded")


def resolve_sample(sample: BenchSample) -> SampleSpec:
    if sample.spec is not None:
        return sample.spec
    if sample.preset is None:
        raise ConfigError(f"bench sample {sample.label!r} has neither a spec nor a preset")
    return size_preset(sample.preset)


def calibrate_F(spec: SampleSpec, target_nsr: float, truth: Optional[IntensityProfile] = None) -> float:
    """F such that the deterministic NSR of F * I equals ``target_nsr``."""
    if not 0.0 < target_nsr < 1.0:
        raise ConfigError(f"target NSR must lie in (0, 1), got {target_nsr!r}")
    truth = truth if truth is not None else total_intensity(spec)
    return (nsr(truth) / target_nsr) ** 2


def run_seeds(config: BenchConfig) -> List[int]:
    return [run_seed(config.master_seed, r) for r in range(config.runs)]


def select_K(truth: IntensityProfile, F: float, seed: int, policy: KPolicy) -> int:
    """Order for a cell: fixed, or chosen once from the first realization."""
    if policy.mode == "fixed":
        return policy.K
    noisy = poissonize(truth, NoiseSpec(F=F, seed=seed))
    try:
        decision, _ = auto_order(noisy, k_max=policy.k_max, g_min=policy.gap)
    except XrdFilterError as exc:
        logger.warning("Automatic order selection failed (%s); using K=%d", exc, policy.K)
        return policy.K
    return decision.K


def _single_run(truth: IntensityProfile, F: float, seed: int, K: int) -> Optional[float]:
    noisy = poissonize(truth, NoiseSpec(F=F, seed=seed))
    try:
        filtered, _ = hlsvd_filter(noisy, K)
        return performance_measure(noisy, filtered, truth.scaled(F))
    except XrdFilterError as exc:
        logger.warning("Excluding run (seed %d, K=%d): %s", seed, K, exc)
        return None


def evaluate_runs(
    truth: IntensityProfile, F: float, seeds: Sequence[int], K: int, workers: int = 1
) -> List[Optional[float]]:
    """Performance measure per seed, in seed order; None marks an excluded run."""
    if workers <= 1:
        return [_single_run(truth, F, seed, K) for seed in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda seed: _single_run(truth, F, seed, K), seeds))


def aggregate(
    size: str, target: float, K: int, F: float, results: Iterable[Optional[float]], max_excluded_fraction: float
) -> BenchCell:
    results = list(results)
    valid = np.array([r for r in results if r is not None], dtype=float)
    excluded = len(results) - valid.size
    mean = float(np.mean(valid)) if valid.size else float("nan")
    std = float(np.std(valid, ddof=1)) if valid.size >= 2 else 0.0
    return BenchCell(
        size=size,
        nsr=target,
        K=K,
        F=F,
        mean=mean,
        std=std,
        runs=int(valid.size),
        excluded=excluded,
        K_runs=(K,) * int(valid.size),
        max_excluded_fraction=max_excluded_fraction,
    )


def _cell_inputs(config: BenchConfig) -> List[Tuple[str, IntensityProfile, SampleSpec]]:
    inputs = []
    for sample in config.samples:
        spec = resolve_sample(sample)
        truth = total_intensity(spec)
        inputs.append((sample.label, truth, spec))
    return inputs


def run_table1(config: BenchConfig) -> BenchTable:
    """Rows per sample size, columns per target NSR."""
    seeds = run_seeds(config)
    table: BenchTable = []
    for label, truth, spec in _cell_inputs(config):
        row = []
        for target in config.nsr_targets:
            F = calibrate_F(spec, target, truth)
            K = select_K(truth, F, seeds[0], config.k_policy)
            results = evaluate_runs(truth, F, seeds, K, config.workers)
            cell = aggregate(label, target, K, F, results, config.max_excluded_fraction)
            logger.info(
                "Cell %s NSR=%.3f K=%d: E=%.3f (std %.3f, stderr %.3f; %d runs, %d excluded)",
                label, target, K, cell.mean, cell.std, cell.stderr, cell.runs, cell.excluded,
            )
            row.append(cell)
        table.append(row)
    return table


def run_table2(config: BenchConfig) -> BenchTable:
    """Rows per (NSR, size); columns at K + offset with one shared seed list."""
    seeds = run_seeds(config)
    inputs = _cell_inputs(config)
    offsets = config.k_policy.offsets
    table: BenchTable = []
    for target in config.nsr_targets:
        for label, truth, spec in inputs:
            F = calibrate_F(spec, target, truth)
            K = select_K(truth, F, seeds[0], config.k_policy)
            if K + min(offsets) < 1:
                raise InvalidK(f"order {K} too small for offsets {offsets}")
            row = []
            for offset in offsets:
                results = evaluate_runs(truth, F, seeds, K + offset, config.workers)
                row.append(aggregate(label, target, K + offset, F, results, config.max_excluded_fraction))
            logger.info(
                "Cell %s NSR=%.3f: %s",
                label, target, ", ".join(f"K={c.K} E={c.mean:.3f}" for c in row),
            )
            table.append(row)
    return table


def failed_cells(table: BenchTable) -> List[BenchCell]:
    return [cell for row in table for cell in row if cell.failed]


def table_rows(table: BenchTable) -> List[Tuple]:
    """CSV rows in ``CSV_COLUMNS`` order."""
    return [
        (c.size, repr(c.nsr), c.K, repr(c.mean), repr(c.std), c.runs, c.excluded)
        for row in table
        for c in row
    ]


def format_table(table: BenchTable, title: str) -> str:
    """Plain-text layout: one line per row, "NSR K: mean (std)" per cell."""
    lines = [title, "=" * len(title)]
    for row in table:
        if not row:
            continue
        head = f"{row[0].size:>8}"
        cells = "  ".join(f"{100.0 * c.nsr:4.1f}% K={c.K:<2d}: {c.mean:6.3f} ({c.std:5.3f})" for c in row)
        lines.append(f"{head}  {cells}")
    return "\n".join(lines) + "\n"
