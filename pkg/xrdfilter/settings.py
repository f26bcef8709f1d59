"""Environment-backed defaults. Values can be overridden in a .env file."""

from __future__ import annotations

import os

from dotenv import load_dotenv

load_dotenv()

DEFAULT_KMAX = int(os.getenv("XRDFILTER_KMAX", "50"))
# Minimum log10 gap (decades) accepted as the signal/noise transition
DEFAULT_GAP_DECADES = float(os.getenv("XRDFILTER_GAP_DECADES", "0.7"))
DEFAULT_LANCZOS_TOL = float(os.getenv("XRDFILTER_LANCZOS_TOL", "1e-10"))
# 0 means "as many steps as the Krylov space allows"
DEFAULT_LANCZOS_MAX_ITER = int(os.getenv("XRDFILTER_LANCZOS_MAX_ITER", "0"))
DEFAULT_BENCH_RUNS = int(os.getenv("XRDFILTER_BENCH_RUNS", "100"))
DEFAULT_BENCH_WORKERS = int(os.getenv("XRDFILTER_BENCH_WORKERS", "1"))
DEFAULT_ANGLE_UNITS = os.getenv("XRDFILTER_ANGLE_UNITS", "degrees")
LOG_LEVEL = os.getenv("XRDFILTER_LOG_LEVEL", "INFO")
