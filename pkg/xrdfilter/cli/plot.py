"""Static SVG renderings of already-computed series."""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..models.estimate import OrderScan  # noqa: E402

# fixed element ids keep the SVG bytes identical between runs
matplotlib.rcParams["svg.hashsalt"] = "xrdfilter"


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def order_scan_svg(path, scan: OrderScan, f_cutoff: Optional[float] = None) -> None:
    """Log-scale scatter of (|f|, singular value) with the cutoff marked."""
    frequencies = [p.frequency for p in scan.pairs]
    values = [max(p.singular_value, 1e-300) for p in scan.pairs]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.scatter(frequencies, values, s=14, color="black")
    ax.set_yscale("log")
    ax.set_xlabel("|f| (rad$^{-1}$)")
    ax.set_ylabel("singular value")
    if f_cutoff is not None:
        ax.axvline(f_cutoff, color="tab:red", linestyle="--", linewidth=1.0)
        ax.set_title(f"f_cutoff = {f_cutoff:.3g} rad$^{{-1}}$")
    fig.tight_layout()
    _save(fig, path)


def spectrum_svg(path, series: Tuple[Sequence[float], Sequence[float]]) -> None:
    frequencies, amplitudes = series
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(frequencies, amplitudes, color="black", linewidth=0.8)
    ax.set_yscale("log")
    ax.set_xlabel("f (rad$^{-1}$)")
    ax.set_ylabel("|DFT| / N")
    fig.tight_layout()
    _save(fig, path)
