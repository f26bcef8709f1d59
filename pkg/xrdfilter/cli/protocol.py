"""File formats: whitespace-column profiles and series, JSON reports and configs."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, List, Literal, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from ..errors import ConfigError, NegativeIntensity, NonUniformGrid, ParseError
from ..models.bench import BenchConfig, BenchTable
from ..models.estimate import EstimationReport
from ..models.profile import AngularGrid, IntensityProfile
from ..models.sample import SampleSpec
from ..services.bench import CSV_COLUMNS, table_rows

Units = Literal["degrees", "radians"]

GRID_TOLERANCE = 1e-9
NUMBER_FORMAT = "%.17g"

ModelT = TypeVar("ModelT", bound=BaseModel)


def to_radians(values, units: Units):
    if units == "radians":
        return np.asarray(values, dtype=float)
    if units == "degrees":
        return np.deg2rad(values)
    raise ValueError(f"unknown angle units {units!r}")


def from_radians(values, units: Units):
    if units == "radians":
        return np.asarray(values, dtype=float)
    if units == "degrees":
        return np.rad2deg(values)
    raise ValueError(f"unknown angle units {units!r}")


def _parse_grid_header(line: str) -> Optional[AngularGrid]:
    """'# grid theta0=<rad> dtheta=<rad> n=<count>' written by write_profile."""
    fields = line.lstrip("#").split()
    if not fields or fields[0] != "grid":
        return None
    try:
        entries = dict(field.split("=", 1) for field in fields[1:])
        return AngularGrid(theta0=float(entries["theta0"]), dtheta=float(entries["dtheta"]), n=int(entries["n"]))
    except (KeyError, ValueError, ValidationError):
        return None


def _infer_grid(angles: np.ndarray) -> AngularGrid:
    n = angles.shape[0]
    steps = np.diff(angles)
    if np.any(steps <= 0):
        raise NonUniformGrid("angles must be strictly increasing")
    dtheta = float((angles[-1] - angles[0]) / (n - 1))
    worst = float(np.max(np.abs(steps - dtheta)))
    if worst > GRID_TOLERANCE * dtheta:
        raise NonUniformGrid(f"angular step varies by {worst:.3e} rad (step {dtheta:.6e} rad)")
    return AngularGrid(theta0=float(angles[0]), dtheta=dtheta, n=n)


def read_profile(path, units: Units = "degrees") -> IntensityProfile:
    """Read 'angle intensity [sigma]' rows; angles are converted to radians."""
    rows: List[List[float]] = []
    header_grid: Optional[AngularGrid] = None
    width: Optional[int] = None
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                header_grid = _parse_grid_header(line) or header_grid
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ParseError(f"expected 2 or 3 columns, found {len(parts)}", lineno)
            if width is not None and len(parts) != width:
                raise ParseError("column count changes between rows", lineno)
            width = len(parts)
            try:
                values = [float(p) for p in parts]
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from exc
            if not all(math.isfinite(v) for v in values):
                raise ParseError("non-finite number", lineno)
            rows.append(values)
    if len(rows) < 2:
        raise ParseError("a profile needs at least two data rows")

    data = np.array(rows)
    angles = to_radians(data[:, 0], units)
    grid = _infer_grid(angles)
    if header_grid is not None and header_grid.n == grid.n:
        # the header carries the exact grid; the columns only have to agree with it
        if np.max(np.abs(header_grid.angles - angles)) <= GRID_TOLERANCE * header_grid.dtheta * grid.n:
            grid = header_grid
    intensity = data[:, 1]
    if np.any(intensity < 0):
        raise NegativeIntensity(f"negative intensity at row {int(np.argmax(intensity < 0)) + 1}")
    sigma = data[:, 2] if data.shape[1] == 3 else None
    if sigma is not None and np.any(sigma < 0):
        raise ParseError("sigma column must be nonnegative")
    return IntensityProfile(grid=grid, values=intensity, sigma=sigma)


def _header_lines(header: Iterable[str]) -> List[str]:
    return [f"# {line}" for line in header]


def write_series(path, columns: Sequence[Sequence[float]], header: Iterable[str] = ()) -> None:
    """Whitespace-separated numeric columns, 17 significant digits."""
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns]) if columns else np.zeros((0, 0))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in _header_lines(header):
            handle.write(line + "\n")
        for row in data:
            handle.write(" ".join(NUMBER_FORMAT % v for v in row) + "\n")


def write_profile(path, profile: IntensityProfile, units: Units = "degrees", header: Iterable[str] = ()) -> None:
    grid = profile.grid
    lines = list(header)
    lines.append(f"grid theta0={grid.theta0!r} dtheta={grid.dtheta!r} n={grid.n}")
    lines.append(f"columns: angle ({units}) intensity" + (" sigma" if profile.sigma is not None else ""))
    columns = [from_radians(grid.angles, units), profile.values]
    if profile.sigma is not None:
        columns.append(profile.sigma)
    write_series(path, columns, lines)


def _dump_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_report(path, report: EstimationReport, grid: AngularGrid, extra: Optional[dict] = None) -> None:
    """Estimated components, singular values and diagnostics as JSON."""
    payload = {"grid": grid.model_dump(), "report": report.model_dump()}
    if extra:
        payload.update(extra)
    _dump_json(path, payload)


def read_report(path) -> Tuple[AngularGrid, EstimationReport]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
        return AngularGrid.model_validate(payload["grid"]), EstimationReport.model_validate(payload["report"])
    except (OSError, ValueError, KeyError, ValidationError) as exc:
        raise ConfigError(f"cannot read report {path}: {exc}") from exc


def _load_model(path, model: Type[ModelT]) -> ModelT:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return model.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(p) for p in first.get("loc", ()))
        raise ConfigError(f"{path}: {location or 'config'}: {first.get('msg')}") from exc


def load_sample_spec(path) -> SampleSpec:
    return _load_model(path, SampleSpec)


def load_bench_config(path) -> BenchConfig:
    return _load_model(path, BenchConfig)


def write_bench_csv(path, table: BenchTable) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(table_rows(table))
