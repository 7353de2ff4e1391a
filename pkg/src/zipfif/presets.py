"""Ready-made configurations: the six worked examples and the reduced ZFIF baseline.

Knots are the exact thirds ``-1, -2/3, ..., 1``; the four-decimal abscissae
printed alongside the data are roundings of these.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ExtendedDataSet, ScalingFamily, Signature
from .shape import ShapeSpec
from .system import ZipperSystem, build_system

KNOTS = tuple(np.linspace(-1.0, 1.0, 7))
ALTERNATING = Signature((0, 1, 0, 1, 0, 1))


@dataclass(frozen=True)
class Preset:
    name: str
    data: ExtendedDataSet
    sig: Signature
    fam: ScalingFamily
    spec: ShapeSpec | None = None
    relaxed: bool = False
    description: str = ""

    def system(self) -> ZipperSystem:
        return build_system(self.data, self.sig, self.fam, relaxed=self.relaxed)


def _data(y, z) -> ExtendedDataSet:
    return ExtendedDataSet(KNOTS, tuple(y), tuple(z))


_WEIERSTRASS_Y = (-2, 0.5, -0.5, 2, -0.5, 0.5, -2)
_EX1_P = (-0.8, -0.6, -0.7, -0.5, -0.7, -0.6)

_EX2_FAM = ScalingFamily.constant(
    (0.5, -0.18, 0.53, -0.17, 0.52, 0.48),
    (0.17, -0.054, 0.053, -0.034, 0.23, 0.14),
    (0.36, -0.21, 0.33, -0.18, 0.34, 0.37),
    (0.29, -0.05, 0.22, -0.14, 0.38, 0.23),
)
_EX2_DATA = _data((-4, 2, 0, 3, 1, 4, -2), (-3, 1, -2, 4, 3, 6, 2))
_SLOPES_45 = (18, -6, 9, -6, 9, -18)

EXAMPLE1 = Preset(
    "example1",
    _data(_WEIERSTRASS_Y, (-4, 1, -1, 3, -1.2, 0.9, -3)),
    ALTERNATING,
    ScalingFamily.constant(
        _EX1_P,
        (0.4, 0.3, 0.4, 0.3, 0.3, 0.3),
        (0.8, 0.6, 0.7, 0.6, 0.7, 0.6),
        (-0.4, -0.3, -0.4, -0.3, -0.4, -0.3),
    ),
    relaxed=True,
    description="Weierstrass samples, hidden-variable system (norm sums exceed 1)",
)

EXAMPLE1_ZFIF = Preset(
    "example1-zfif",
    _data(_WEIERSTRASS_Y, (0,) * 7),
    ALTERNATING,
    ScalingFamily.constant(_EX1_P, (0,) * 6, (0,) * 6, (0,) * 6),
    description="Weierstrass samples, plain affine zipper FIF (q = p~ = q~ = 0, z = 0)",
)

EXAMPLE2 = Preset(
    "example2",
    _EX2_DATA,
    ALTERNATING,
    _EX2_FAM,
    ShapeSpec("rectangle", k1=-10, k2=10, kt1=-6, kt2=8, omega=0.9),
    description="graph inside [-1, 1] x [-10, 10]",
)

EXAMPLE3 = Preset(
    "example3",
    _data((2, 1.4, 1.5, 1.2, 2.1, 1.6, 1.3), (1, 1.6, 4, 0.3, 2, 4.2, 2.1)),
    ALTERNATING,
    _EX2_FAM,
    ShapeSpec("positivity", omega=0.9),
    description="positive data, positive interpolant",
)

EXAMPLE4 = Preset(
    "example4",
    _EX2_DATA,
    ALTERNATING,
    ScalingFamily.constant(
        (-0.1, 0.48, -0.09, 0.45, -0.08, 0.4),
        (-0.00096, 0.0007, -0.002, 0.0017, -0.0045, 0.0035),
        (-0.78, 0.41, -0.79, 0.44, -0.81, 0.48),
        (-0.899, 0.8991, -0.895, 0.897, 0.893, 0.895),
    ),
    ShapeSpec("above", slopes=_SLOPES_45, b1=(12, -4, 1, 1, -4, 14), omega=0.9),
    description="curve above piecewise lines placed under the data",
)

EXAMPLE5 = Preset(
    "example5",
    _EX2_DATA,
    Signature((1, 0, 1, 0, 1, 0)),
    ScalingFamily.constant(
        (0.1, -0.48, 0.09, -0.45, 0.08, -0.4),
        (0.00096, -0.0007, 0.002, -0.0017, 0.0045, -0.0035),
        (0.78, -0.41, 0.79, -0.44, 0.81, -0.48),
        (0.899, -0.8991, 0.895, -0.897, 0.893, -0.895),
    ),
    ShapeSpec("below", slopes=_SLOPES_45, b2=(16, 0, 5, 5, 0, 18), omega=0.9),
    description="curve below piecewise lines placed over the data",
)

EXAMPLE6 = Preset(
    "example6",
    _data((5, -2, 3, 0, 1, -3, 2), (2, -4, -2, -3, 2, 0, 5)),
    ALTERNATING,
    ScalingFamily.constant(
        (0.15, -0.14, 0.1355, -0.13, 0.135, -0.155),
        (0.006, -0.015, 0.018, -0.02, 0.018, -0.002),
        (0.7, -0.75, 0.74, -0.7, 0.76, -0.74),
        (0.89, -0.85, 0.8, -0.8, 0.88, -0.89),
    ),
    ShapeSpec(
        "between",
        slopes=(-21, 15, -9, 3, -12, 15),
        b1=(-17.5, 6.5, -1.5, -1.5, 3.5, -14.5),
        b2=(-14.5, 9.5, 1.5, 1.5, 6.5, -11.5),
        omega=0.9,
    ),
    description="curve between two families of piecewise lines",
)

PRESETS = {
    p.name: p
    for p in (EXAMPLE1, EXAMPLE1_ZFIF, EXAMPLE2, EXAMPLE3, EXAMPLE4, EXAMPLE5, EXAMPLE6)
}
SHAPE_PRESETS = (EXAMPLE2, EXAMPLE3, EXAMPLE4, EXAMPLE5, EXAMPLE6)
