from __future__ import annotations

import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import ConfigError
from .profile import AngularGrid

# Reference nearest-neighbour distance shared by every cluster family
NN_DISTANCE = 1.0 / math.sqrt(2.0)


class StructureType(str, Enum):
    CUBOCTAHEDRAL = "cuboctahedral"
    ICOSAHEDRAL = "icosahedral"
    DECAHEDRAL = "decahedral"


class SizeDistribution(BaseModel):
    model_config = ConfigDict(frozen=True)

    xi: float = Field(gt=0.0, description="Mode (shell index)")
    s: float = Field(gt=0.0, description="Logarithmic width")


class StrainParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    n0: float
    omega: float = 1.0
    xi_cap: float = 1.0
    w: float = Field(gt=0.0)


class ScatteringModel(BaseModel):
    """A(q') = I0 * [T(q') f(q')]^2 with optional Debye-Waller and form factor terms."""

    model_config = ConfigDict(frozen=True)

    i0: float = Field(default=1.0, gt=0.0)
    debye_waller_b: float = Field(default=0.0, ge=0.0, description="B in nm^2")
    # f(q') = sum a_i exp(-b_i (q'/2)^2) + c, b_i in nm^2
    form_a: Tuple[float, ...] = ()
    form_b: Tuple[float, ...] = ()
    form_c: float = 0.0

    @property
    def has_form_factor(self) -> bool:
        return bool(self.form_a) or self.form_c != 0.0


class StructureSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    type: StructureType
    fraction: float = Field(ge=0.0)
    max_shell: int = Field(default=12, ge=1, le=20)
    size: SizeDistribution
    strain: StrainParams


class SampleSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str = "sample"
    structures: Tuple[StructureSpec, ...]
    wavelength: float = Field(default=0.15418, gt=0.0, description="nm")
    lattice_constant: float = Field(default=0.40786, gt=0.0, description="fcc bulk constant, nm")
    scattering: ScatteringModel = ScatteringModel()
    grid: AngularGrid
    normalize: bool = False
    # Distance grouping quantum as a fraction of the nearest-neighbour distance
    distance_quantum: float = Field(default=1e-9, ge=0.0)

    @model_validator(mode="after")
    def _check(self) -> "SampleSpec":
        if not self.structures:
            raise ValueError("at least one structure type is required")
        total = sum(s.fraction for s in self.structures)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"structure fractions sum to {total!r}, expected 1")
        types = [s.type for s in self.structures]
        if len(set(types)) != len(types):
            raise ValueError("each structure type may appear once")
        if self.grid.theta0 <= 0.0 or self.grid.theta_last >= math.pi / 2:
            raise ValueError("scattering angles must lie in (0, pi/2)")
        return self


class Cluster(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    type: StructureType
    shells: int
    positions: np.ndarray

    @field_validator("positions", mode="before")
    @classmethod
    def _positions(cls, value):
        array = np.array(value, dtype=float)
        if array.ndim != 2 or array.shape[1] != 3:
            raise ValueError("positions must be an (n, 3) array")
        array.setflags(write=False)
        return array

    @property
    def n_atoms(self) -> int:
        return int(self.positions.shape[0])


class DistanceHistogram(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    distances: np.ndarray
    multiplicities: np.ndarray
    n_atoms: int

    @field_validator("distances", mode="before")
    @classmethod
    def _distances(cls, value):
        array = np.array(value, dtype=float).reshape(-1)
        array.setflags(write=False)
        return array

    @field_validator("multiplicities", mode="before")
    @classmethod
    def _multiplicities(cls, value):
        array = np.array(value, dtype=np.int64).reshape(-1)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check(self) -> "DistanceHistogram":
        if self.distances.shape != self.multiplicities.shape:
            raise ValueError("distances and multiplicities differ in length")
        if int(self.multiplicities.sum()) != self.n_atoms * (self.n_atoms - 1):
            raise ValueError("multiplicities must sum to N(N-1)")
        return self


def mixture_structures(max_shell: int = 12, xi: float = 5.0) -> List[StructureSpec]:
    """The three-family mixture used for the synthetic Au samples."""
    size = SizeDistribution(xi=xi, s=0.3)
    return [
        StructureSpec(
            type=t, fraction=1.0 / 3.0, max_shell=max_shell, size=size,
            strain=StrainParams(n0=n0, omega=1.0, xi_cap=1.0, w=0.5),
        )
        for t, n0 in (
            (StructureType.CUBOCTAHEDRAL, 4.0),
            (StructureType.ICOSAHEDRAL, 4.0),
            (StructureType.DECAHEDRAL, 6.0),
        )
    ]


def default_grid() -> AngularGrid:
    """500 samples over theta = 0.30 ... 0.42 rad, the Au (111) and (200) window.

    The 0.24 mrad step puts Nyquist at about 2083 rad^-1.
    """
    return AngularGrid(theta0=0.30, dtheta=0.00024, n=500)


def size_preset(label: str, grid: Optional[AngularGrid] = None) -> SampleSpec:
    """2, 3 and 4 nm presets: the mode shell index is scaled with the diameter."""
    presets = {"2nm": (3.5, 10), "3nm": (5.0, 12), "4nm": (6.5, 15)}
    if label not in presets:
        raise ConfigError(f"unknown size preset {label!r}; choose from {sorted(presets)}")
    xi, max_shell = presets[label]
    return SampleSpec(
        label=label,
        structures=tuple(mixture_structures(max_shell=max_shell, xi=xi)),
        grid=grid or default_grid(),
    )
