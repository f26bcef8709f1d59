from __future__ import annotations

import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class DampedSinusoid(BaseModel):
    """One term a * exp(i*phi) * exp((-d + 2*pi*i*f) * theta)."""

    model_config = ConfigDict(frozen=True)

    amplitude: float = Field(ge=0.0)
    phase: float
    damping: float
    frequency: float

    @classmethod
    def from_complex(cls, coefficient: complex, damping: float, frequency: float) -> "DampedSinusoid":
        """Build the canonical form (a >= 0, phase in (-pi, pi]) from a complex amplitude."""
        amplitude = abs(coefficient)
        phase = math.atan2(coefficient.imag, coefficient.real) if amplitude > 0 else 0.0
        if phase == -math.pi:
            phase = math.pi
        return cls(amplitude=amplitude, phase=phase, damping=damping, frequency=frequency)

    @classmethod
    def signed(cls, amplitude: float, phase: float, damping: float, frequency: float) -> "DampedSinusoid":
        """Fold a negative amplitude into the phase."""
        if amplitude < 0:
            amplitude, phase = -amplitude, phase + math.pi
        phase = math.remainder(phase, 2.0 * math.pi)
        if phase == -math.pi:
            phase = math.pi
        return cls(amplitude=amplitude, phase=phase, damping=damping, frequency=frequency)

    @property
    def coefficient(self) -> complex:
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))

    @property
    def exponent(self) -> complex:
        return complex(-self.damping, 2.0 * math.pi * self.frequency)

    def pole(self, dtheta: float) -> complex:
        return complex(np.exp(self.exponent * dtheta))


class ModelEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    components: Tuple[DampedSinusoid, ...] = ()
    conjugate_closed: bool = False

    @property
    def order(self) -> int:
        return len(self.components)

    def __add__(self, other: "ModelEstimate") -> "ModelEstimate":
        return ModelEstimate(
            components=self.components + other.components,
            conjugate_closed=self.conjugate_closed and other.conjugate_closed,
        )

    def frequencies(self) -> np.ndarray:
        return np.array([c.frequency for c in self.components], dtype=float)

    def dampings(self) -> np.ndarray:
        return np.array([c.damping for c in self.components], dtype=float)

    def coefficients(self) -> np.ndarray:
        return np.array([c.coefficient for c in self.components], dtype=complex)


class PartialSVD(BaseModel):
    """Leading singular triplets of a Hankel operator."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    iterations: int = 0
    residuals: Optional[np.ndarray] = None

    @field_validator("U", "V", mode="before")
    @classmethod
    def _basis(cls, value):
        array = np.array(value, dtype=complex)
        if array.ndim != 2:
            raise ValueError("singular vector blocks must be 2-D")
        array.setflags(write=False)
        return array

    @field_validator("S", mode="before")
    @classmethod
    def _values(cls, value):
        array = np.array(value, dtype=float).reshape(-1)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check(self) -> "PartialSVD":
        k = self.S.shape[0]
        if self.U.shape[1] != k or self.V.shape[1] != k:
            raise ValueError("U, S, V disagree on the number of triplets")
        if np.any(self.S < 0) or np.any(np.diff(self.S) > 0):
            raise ValueError("singular values must be nonnegative and descending")
        return self

    @property
    def k(self) -> int:
        return int(self.S.shape[0])


class EstimationDiagnostics(BaseModel):
    model_config = ConfigDict(frozen=True)

    residual_norm: float = 0.0
    shift_condition: float = 1.0
    amplitude_condition: float = 1.0
    ill_conditioned: bool = False
    growing: Tuple[int, ...] = ()
    coincident_poles: bool = False
    nonfinite_amplitudes: Tuple[int, ...] = ()
    lanczos_iterations: int = 0


class EstimationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: ModelEstimate
    singular_values: Tuple[float, ...]
    pairing: Tuple[int, ...] = ()
    diagnostics: EstimationDiagnostics = EstimationDiagnostics()

    @model_validator(mode="after")
    def _descending(self) -> "EstimationReport":
        values = np.asarray(self.singular_values)
        if values.size and np.any(np.diff(values) > 0):
            raise ValueError("singular values must be descending")
        return self


class ScanPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    frequency: float = Field(ge=0.0, description="|f| in rad^-1")
    singular_value: float = Field(ge=0.0)
    component: int


class OrderScan(BaseModel):
    model_config = ConfigDict(frozen=True)

    pairs: Tuple[ScanPair, ...]
    k_max: int

    @model_validator(mode="after")
    def _length(self) -> "OrderScan":
        if len(self.pairs) != self.k_max:
            raise ValueError("scan must hold one pair per component")
        return self

    def series(self) -> List[Tuple[float, float]]:
        return [(p.frequency, p.singular_value) for p in self.pairs]


class OrderDecision(BaseModel):
    model_config = ConfigDict(frozen=True)

    K: int = Field(ge=1)
    f_cutoff: float
    score: float
    manual: bool = False
