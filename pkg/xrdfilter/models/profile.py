from __future__ import annotations

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def frozen_array(values, dtype=float) -> np.ndarray:
    """Copy ``values`` into a read-only 1-D array."""
    array = np.array(values, dtype=dtype).reshape(-1)
    array.setflags(write=False)
    return array


class AngularGrid(BaseModel):
    """Uniform sampling of the scattering angle, in radians."""

    model_config = ConfigDict(frozen=True)

    theta0: float = Field(description="Start angle (rad)")
    dtheta: float = Field(gt=0.0, description="Angular step (rad)")
    n: int = Field(ge=2, description="Sample count")

    @property
    def angles(self) -> np.ndarray:
        # theta_k = theta0 + k * dtheta, evaluated the same way everywhere
        return self.theta0 + np.arange(self.n, dtype=float) * self.dtheta

    @property
    def theta_last(self) -> float:
        return self.theta0 + (self.n - 1) * self.dtheta

    @property
    def span(self) -> float:
        return self.n * self.dtheta

    @property
    def nyquist(self) -> float:
        return 1.0 / (2.0 * self.dtheta)

    def shifted(self, delta: float) -> "AngularGrid":
        return AngularGrid(theta0=self.theta0 + delta, dtheta=self.dtheta, n=self.n)


class IntensityProfile(BaseModel):
    """Intensity samples on an angular grid with optional measured errors."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: AngularGrid
    values: np.ndarray
    sigma: Optional[np.ndarray] = None

    @field_validator("values", mode="before")
    @classmethod
    def _values_array(cls, value):
        return frozen_array(value)

    @field_validator("sigma", mode="before")
    @classmethod
    def _sigma_array(cls, value):
        if value is None:
            return None
        return frozen_array(value)

    @model_validator(mode="after")
    def _check_lengths(self) -> "IntensityProfile":
        if self.values.shape[0] != self.grid.n:
            raise ValueError(f"values length {self.values.shape[0]} != grid.n {self.grid.n}")
        if self.sigma is not None:
            if self.sigma.shape[0] != self.grid.n:
                raise ValueError("sigma length differs from grid.n")
            if np.any(self.sigma < 0):
                raise ValueError("sigma entries must be nonnegative")
        return self

    @property
    def angles(self) -> np.ndarray:
        return self.grid.angles

    def with_values(self, values, sigma=None) -> "IntensityProfile":
        return IntensityProfile(grid=self.grid, values=values, sigma=sigma)

    def scaled(self, factor: float) -> "IntensityProfile":
        sigma = None if self.sigma is None else self.sigma * abs(factor)
        return IntensityProfile(grid=self.grid, values=self.values * factor, sigma=sigma)
