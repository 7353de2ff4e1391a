"""Empirical checks of the shape guarantees on rendered curves, plus L1 error metrics."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import MissingKnot
from .model import ExtendedDataSet
from .render import DEDUP_TOL, CurveSample, evaluate_many, interval_index
from .system import ZipperSystem

#: Default slack for the geometric checks.
CHECK_SLACK = 1e-9
SIDES = ("above", "below", "between")

Curve = Union[CurveSample, ZipperSystem, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one check; ``passed`` holds iff ``worst_violation <= slack``."""

    property: str
    passed: bool
    worst_violation: float
    worst_x: float
    samples_checked: int
    slack: float

    def to_dict(self) -> dict:
        return asdict(self)

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict} {self.property}: worst violation {self.worst_violation:.3g}"
            f" at x={self.worst_x:.6g} ({self.samples_checked} samples, slack {self.slack:g})"
        )


def _report(name: str, viol: np.ndarray, x: np.ndarray, slack: float) -> VerificationReport:
    if len(viol) == 0:
        return VerificationReport(name, True, -np.inf, float("nan"), 0, slack)
    k = int(np.argmax(viol))
    worst = float(viol[k])
    return VerificationReport(name, worst <= slack, worst, float(x[k]), len(viol), slack)


def check_interpolation(
    sample: CurveSample, data: ExtendedDataSet, slack: float = CHECK_SLACK
) -> VerificationReport:
    """Worst ``|f1(x_i) - y_i|`` and ``|f2(x_i) - z_i|`` over the knots."""
    xs = sample.x
    knots = data.xs
    tol = DEDUP_TOL * max(1.0, float(np.abs(knots).max()))
    pos = np.clip(np.searchsorted(xs, knots), 0, len(xs) - 1)
    left = np.clip(pos - 1, 0, len(xs) - 1)
    pos = np.where(np.abs(xs[left] - knots) < np.abs(xs[pos] - knots), left, pos)
    miss = np.abs(xs[pos] - knots) > tol
    if miss.any():
        raise MissingKnot(f"knot x={knots[np.argmax(miss)]!r} is not in the sample")
    viol = np.maximum(np.abs(sample.f1[pos] - data.ys), np.abs(sample.f2[pos] - data.zs))
    return _report("interpolation", viol, knots, slack)


def check_rectangle(
    sample: CurveSample, k1: float, k2: float, component: str = "f1", slack: float = CHECK_SLACK
) -> VerificationReport:
    """Graph of the component inside ``I x [k1, k2]``."""
    v = sample.component(component)
    return _report(f"rectangle[{component}]", np.maximum(k1 - v, v - k2), sample.x, slack)


def check_positive(
    sample: CurveSample, component: str = "f1", slack: float = CHECK_SLACK
) -> VerificationReport:
    v = sample.component(component)
    return _report(f"positive[{component}]", -v, sample.x, slack)


def line_values(knots, m: Sequence[float], b: Sequence[float], x) -> np.ndarray:
    """``m_i x + b_i`` with ``i`` chosen by the left-closed interval rule."""
    i = interval_index(np.asarray(knots, dtype=float), x)
    return np.asarray(m, dtype=float)[i] * x + np.asarray(b, dtype=float)[i]


def check_lines(
    sample: CurveSample,
    knots,
    m: Sequence[float],
    b: Sequence[float],
    side: str,
    b2: Sequence[float] | None = None,
    *,
    component: str = "f1",
    slack: float = CHECK_SLACK,
) -> VerificationReport:
    """Signed violation of the piecewise lines.

    ``above`` means the curve lies above ``m_i x + b_i``; ``below`` means it
    lies under them; ``between`` uses ``b`` as the lower and ``b2`` as the
    upper intercepts.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    x = sample.x
    v = sample.component(component)
    line = line_values(knots, m, b, x)
    if side == "above":
        viol = line - v
    elif side == "below":
        viol = v - line
    else:
        if b2 is None:
            raise ValueError("side 'between' needs the upper intercepts b2")
        viol = np.maximum(line - v, v - line_values(knots, m, b2, x))
    return _report(f"lines-{side}[{component}]", viol, x, slack)


def check_envelope(
    sample: CurveSample, U: float, Ut: float, slack: float = 1e-10
) -> VerificationReport:
    """``|f1| <= U`` and ``|f2| <= U~`` at every sample."""
    viol = np.maximum(np.abs(sample.f1) - U, np.abs(sample.f2) - Ut)
    return _report("envelope", viol, sample.x, slack)


def weierstrass(x, terms: int = 30):
    """Partial sum ``sum_{s < terms} 0.5^s cos(3^s pi x)``; the tail is below ``2^(1-terms)``."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for s in range(terms):
        out += 0.5**s * np.cos(3.0**s * np.pi * x)
    return out if out.ndim else float(out)


def _values(f: Curve, x: np.ndarray, component: str, tol: float) -> np.ndarray:
    if isinstance(f, CurveSample):
        return np.interp(x, f.x, f.component(component))
    if isinstance(f, ZipperSystem):
        kw = {} if f.has_bounds else {"depth": 64}
        f1, f2 = evaluate_many(f, x, tol, **kw)
        return f1 if component == "f1" else f2
    return np.asarray(f(x), dtype=float)


def l1_error(
    f: Curve,
    reference: Curve,
    m: int = 10**5,
    interval: tuple[float, float] | None = None,
    *,
    component: str = "f1",
    tol: float = 1e-6,
    chunk: int = 1 << 18,
) -> float:
    """Normalized L1 distance ``(1/|I|) * integral |f - reference|`` by the midpoint rule.

    Either argument may be a :class:`CurveSample` (linearly interpolated), a
    :class:`ZipperSystem` (evaluated pointwise to ``tol``) or a vectorized
    callable. ``interval`` defaults to the domain of the first non-callable.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    if interval is None:
        for g in (f, reference):
            if isinstance(g, CurveSample):
                interval = (float(g.x[0]), float(g.x[-1]))
                break
            if isinstance(g, ZipperSystem):
                interval = g.data.interval
                break
        else:
            raise ValueError("interval is required when both arguments are callables")
    x0, xn = interval
    h = (xn - x0) / m
    total = 0.0
    for s in range(0, m, chunk):
        x = x0 + (np.arange(s, min(s + chunk, m)) + 0.5) * h
        diff = _values(f, x, component, tol) - _values(reference, x, component, tol)
        total += float(np.abs(diff).sum())
    return total / m
