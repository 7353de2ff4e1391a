"""Domain types: extended data sets, signatures and vertical scaling factors.

All types are immutable once constructed. Per-type invariants are enforced in
``__post_init__``; cross-type invariants (lengths agree, contraction bound)
are enforced by :func:`validate`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    ContractionViolation,
    LengthMismatch,
    NonFiniteValue,
    NonIncreasingKnots,
)

#: S̄ must not exceed ``1 - CONTRACTION_MARGIN``.
CONTRACTION_MARGIN = 1e-12

FACTOR_NAMES = ("p", "q", "pt", "qt")


def _floats(name: str, values: Iterable[float]) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not all(math.isfinite(v) for v in out):
        raise NonFiniteValue(f"{name} contains a non-finite value")
    return out


@dataclass(frozen=True)
class ExtendedDataSet:
    """Interpolation data ``(x_i, y_i, z_i)``, ``i = 0..n``.

    ``z`` holds the hidden-variable ordinates; they are free parameters of the
    construction and must be supplied explicitly.
    """

    knots: tuple[float, ...]
    y: tuple[float, ...]
    z: tuple[float, ...]

    def __post_init__(self):
        knots = _floats("knots", self.knots)
        y = _floats("y", self.y)
        z = _floats("z", self.z)
        if len(knots) < 3:
            raise LengthMismatch(f"need at least 3 knots (n >= 2), got {len(knots)}")
        if len(y) != len(knots) or len(z) != len(knots):
            raise LengthMismatch(
                f"knots/y/z lengths differ: {len(knots)}/{len(y)}/{len(z)}"
            )
        for i in range(1, len(knots)):
            if not knots[i - 1] < knots[i]:
                raise NonIncreasingKnots(
                    f"knots must be strictly increasing: x[{i - 1}]={knots[i - 1]!r}"
                    f" >= x[{i}]={knots[i]!r}"
                )
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        """Number of subintervals."""
        return len(self.knots) - 1

    @cached_property
    def xs(self) -> np.ndarray:
        a = np.array(self.knots)
        a.flags.writeable = False
        return a

    @cached_property
    def ys(self) -> np.ndarray:
        a = np.array(self.y)
        a.flags.writeable = False
        return a

    @cached_property
    def zs(self) -> np.ndarray:
        a = np.array(self.z)
        a.flags.writeable = False
        return a

    @property
    def interval(self) -> tuple[float, float]:
        return self.knots[0], self.knots[-1]

    def subinterval(self, i: int) -> tuple[float, float]:
        """Endpoints of ``I_{i+1}`` for the 0-based interval index ``i``."""
        return self.knots[i], self.knots[i + 1]


@dataclass(frozen=True)
class Signature:
    """Zipper signature: ``eps[i] == 1`` makes the i-th interval map reverse orientation."""

    eps: tuple[int, ...]

    def __post_init__(self):
        eps = tuple(int(e) for e in self.eps)
        if any(e not in (0, 1) for e in eps):
            raise LengthMismatch(f"signature entries must be 0 or 1, got {self.eps!r}")
        object.__setattr__(self, "eps", eps)

    def __len__(self) -> int:
        return len(self.eps)

    @classmethod
    def identity(cls, n: int) -> Signature:
        return cls((0,) * n)

    def flipped(self, i: int) -> Signature:
        eps = list(self.eps)
        eps[i] = 1 - eps[i]
        return Signature(tuple(eps))


@dataclass(frozen=True)
class FactorFunction:
    """Affine vertical scaling factor ``t -> c0 + c1*t`` on one subinterval."""

    c0: float
    c1: float = 0.0

    def __post_init__(self):
        c0, c1 = _floats("factor coefficients", (self.c0, self.c1))
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "c1", c1)

    def __call__(self, t):
        return self.c0 + self.c1 * t

    @property
    def lipschitz(self) -> float:
        return abs(self.c1)

    def extremes(self, lo: float, hi: float) -> tuple[float, float]:
        """Minimum and maximum over ``[lo, hi]`` (attained at the endpoints)."""
        a, b = self(lo), self(hi)
        return min(a, b), max(a, b)

    def sup_norm(self, lo: float, hi: float) -> float:
        return max(abs(self(lo)), abs(self(hi)))


def _factor(v) -> FactorFunction:
    if isinstance(v, FactorFunction):
        return v
    if isinstance(v, (int, float)):
        return FactorFunction(float(v))
    return FactorFunction(*v)


@dataclass(frozen=True)
class ScalingFamily:
    """The four factor lists ``p, q, p~, q~`` (``pt``/``qt`` hold the tilded ones)."""

    p: tuple[FactorFunction, ...]
    q: tuple[FactorFunction, ...]
    pt: tuple[FactorFunction, ...]
    qt: tuple[FactorFunction, ...]

    def __post_init__(self):
        lists = [tuple(_factor(v) for v in getattr(self, k)) for k in FACTOR_NAMES]
        if len({len(l) for l in lists}) != 1:
            raise LengthMismatch(
                "factor lists differ in length: "
                + ", ".join(f"{k}={len(l)}" for k, l in zip(FACTOR_NAMES, lists))
            )
        for k, l in zip(FACTOR_NAMES, lists):
            object.__setattr__(self, k, l)

    @classmethod
    def constant(
        cls,
        p: Sequence[float],
        q: Sequence[float],
        pt: Sequence[float],
        qt: Sequence[float],
    ) -> ScalingFamily:
        return cls(*(tuple(FactorFunction(float(v)) for v in vals) for vals in (p, q, pt, qt)))

    @property
    def n(self) -> int:
        return len(self.p)

    def factors(self, name: str) -> tuple[FactorFunction, ...]:
        return getattr(self, name)

    @cached_property
    def coeffs(self) -> np.ndarray:
        """Array of shape ``(4, n, 2)`` holding ``(c0, c1)`` for p, q, pt, qt."""
        a = np.array([[(f.c0, f.c1) for f in getattr(self, k)] for k in FACTOR_NAMES])
        a.flags.writeable = False
        return a

    def norms(self, data: ExtendedDataSet) -> np.ndarray:
        """Sup norms over each subinterval, shape ``(4, n)``."""
        return np.array(
            [
                [f.sup_norm(*data.subinterval(i)) for i, f in enumerate(getattr(self, k))]
                for k in FACTOR_NAMES
            ]
        )

    def lipschitz(self) -> np.ndarray:
        return np.abs(self.coeffs[:, :, 1])


class Validated(NamedTuple):
    data: ExtendedDataSet
    sig: Signature
    fam: ScalingFamily
    sbar: float


def contraction_aggregate(data: ExtendedDataSet, fam: ScalingFamily) -> float:
    """S̄: the largest column sum ``||p_i|| + ||p~_i||`` or ``||q_i|| + ||q~_i||``."""
    nrm = fam.norms(data)
    return float(max((nrm[0] + nrm[2]).max(), (nrm[1] + nrm[3]).max()))


def validate(
    data: ExtendedDataSet,
    sig: Signature,
    fam: ScalingFamily,
    *,
    relaxed: bool = False,
) -> Validated:
    """Check the cross-type construction hypotheses and report S̄.

    With ``relaxed=True`` the per-interval norm-sum bound is not enforced; the
    system may then fail to be contractive and downstream quantities that
    depend on it (envelope, θ, κ) are unavailable.
    """
    n = data.n
    if len(sig) != n:
        raise LengthMismatch(f"signature has {len(sig)} entries, data has n={n}")
    if fam.n != n:
        raise LengthMismatch(f"scaling family has {fam.n} entries per list, data has n={n}")
    sbar = contraction_aggregate(data, fam)
    if not relaxed and sbar > 1.0 - CONTRACTION_MARGIN:
        nrm = fam.norms(data)
        sums = np.maximum(nrm[0] + nrm[2], nrm[1] + nrm[3])
        i = int(sums.argmax())
        raise ContractionViolation(
            f"S̄ = {sbar:.6g} >= 1: interval {i + 1} has "
            f"||p||+||p~|| = {nrm[0, i] + nrm[2, i]:.6g}, "
            f"||q||+||q~|| = {nrm[1, i] + nrm[3, i]:.6g}"
        )
    return Validated(data, sig, fam, sbar)
