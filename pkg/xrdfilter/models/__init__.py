"""Pydantic models for profiles, estimates, samples and bench results."""

from .bench import BenchCell, BenchConfig, BenchSample, KPolicy, NoiseSpec
from .estimate import (
    DampedSinusoid,
    EstimationDiagnostics,
    EstimationReport,
    ModelEstimate,
    OrderDecision,
    OrderScan,
    PartialSVD,
    ScanPair,
)
from .profile import AngularGrid, IntensityProfile
from .sample import (
    Cluster,
    DistanceHistogram,
    SampleSpec,
    ScatteringModel,
    SizeDistribution,
    StrainParams,
    StructureSpec,
    StructureType,
)

__all__ = [
    "AngularGrid",
    "BenchCell",
    "BenchConfig",
    "BenchSample",
    "Cluster",
    "DampedSinusoid",
    "DistanceHistogram",
    "EstimationDiagnostics",
    "EstimationReport",
    "IntensityProfile",
    "KPolicy",
    "ModelEstimate",
    "NoiseSpec",
    "OrderDecision",
    "OrderScan",
    "PartialSVD",
    "SampleSpec",
    "ScanPair",
    "ScatteringModel",
    "SizeDistribution",
    "StrainParams",
    "StructureSpec",
    "StructureType",
]
