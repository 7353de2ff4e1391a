"""Zipper hidden-variable fractal interpolation with shape-preserving factor bounds."""
from .errors import (
    ContractionViolation,
    DegenerateDenominator,
    DenominatorCollapse,
    DepthTooLarge,
    EmptyInterval,
    LengthMismatch,
    MissingKnot,
    NonFiniteValue,
    NonIncreasingKnots,
    SpecViolation,
    ToleranceNotReached,
    ValidationError,
    XOutOfDomain,
    ZipfifError,
)
from .model import ExtendedDataSet, FactorFunction, ScalingFamily, Signature, validate
from .render import (
    CurveSample,
    evaluate_at,
    evaluate_many,
    refine_orbit,
    sample_uniform,
)
from .shape import (
    FeasibleInterval,
    ShapeSpec,
    SlopeAuxiliaries,
    check_family,
    feasible_interval,
)
from .system import ZipperSystem, build_system

__version__ = "0.1.0"

__all__ = [
    "ContractionViolation",
    "CurveSample",
    "DegenerateDenominator",
    "DenominatorCollapse",
    "DepthTooLarge",
    "ExtendedDataSet",
    "FactorFunction",
    "FeasibleInterval",
    "LengthMismatch",
    "EmptyInterval",
    "MissingKnot",
    "NonFiniteValue",
    "NonIncreasingKnots",
    "ScalingFamily",
    "ShapeSpec",
    "Signature",
    "SlopeAuxiliaries",
    "SpecViolation",
    "ToleranceNotReached",
    "ValidationError",
    "XOutOfDomain",
    "ZipfifError",
    "ZipperSystem",
    "build_system",
    "check_family",
    "evaluate_at",
    "evaluate_many",
    "feasible_interval",
    "refine_orbit",
    "sample_uniform",
    "validate",
]
