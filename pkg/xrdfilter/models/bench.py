from __future__ import annotations

import math
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .sample import SampleSpec


class NoiseSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    F: float = Field(default=1.0, gt=0.0, description="Intensity scaling factor")
    seed: int = Field(default=0, ge=0, lt=2**64)


class KPolicy(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: Literal["auto", "fixed"] = "auto"
    K: int = Field(default=9, ge=1, description="Order for fixed mode, fallback for auto")
    offsets: Tuple[int, ...] = (-2, 0, 2)
    k_max: int = Field(default=50, ge=2, le=64)
    gap: float = Field(default=0.7, gt=0.0)


class BenchSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    preset: Optional[str] = None
    spec: Optional[SampleSpec] = None


class BenchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    samples: Tuple[BenchSample, ...] = (
        BenchSample(label="2 nm", preset="2nm"),
        BenchSample(label="3 nm", preset="3nm"),
        BenchSample(label="4 nm", preset="4nm"),
    )
    nsr_targets: Tuple[float, ...] = (0.02, 0.05, 0.10)
    runs: int = Field(default=100, ge=2)
    master_seed: int = Field(default=0, ge=0)
    k_policy: KPolicy = KPolicy()
    workers: int = Field(default=1, ge=1)
    # Cells whose excluded share is above this fail the bench
    max_excluded_fraction: float = Field(default=0.01, ge=0.0, le=1.0)

    @field_validator("nsr_targets")
    @classmethod
    def _targets(cls, value):
        if not value or any(not (0.0 < t < 1.0) for t in value):
            raise ValueError("NSR targets must lie in (0, 1)")
        return value


class BenchCell(BaseModel):
    model_config = ConfigDict(frozen=True)

    size: str
    nsr: float
    K: int
    F: float
    mean: float
    std: float = Field(ge=0.0)
    runs: int
    excluded: int = 0
    K_runs: Tuple[int, ...] = ()
    max_excluded_fraction: float = 0.01

    @property
    def failed(self) -> bool:
        attempted = self.runs + self.excluded
        return attempted == 0 or self.excluded > self.max_excluded_fraction * attempted

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.runs) if self.runs else math.inf


BenchTable = List[List[BenchCell]]
