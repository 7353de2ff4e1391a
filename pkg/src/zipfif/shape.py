"""Closed-form feasibility intervals for the vertical scaling factors.

Each shape mode bounds the factors of one subinterval at a time and in a
fixed order: ``p`` first, then ``q`` given the chosen ``p``, then ``pt``
given ``p`` and ω, then ``qt`` given ``q``, ``pt`` and ω. A chosen factor
enters later stages through its extremes ``(min, max)`` on the subinterval.

Modes:

``rectangle``  f1 stays in ``[k1, k2]``.
``positivity`` f1 stays nonnegative (nonnegative data).
``above``      f1 stays above the lines ``m_i x + b1_i`` placed below the data.
``below``      f1 stays below the lines ``m_i x + b2_i`` placed above the data.
``between``    f1 stays between both line families.

The bounds are meant as sufficient conditions. With ``corrected=False`` the
formulas are used exactly as published. Those rely on bounds for ``f2``
(``[kt1, kt2]``, ``k~``, ``l~``) that nothing in the construction enforces,
and the rectangle ``q`` bounds use ``kt2 - max{z_0, z_n}`` where the case
analysis needs ``kt2 - min{z_0, z_n}``. With ``corrected=True`` every bound
on ``f2`` is replaced by the proven bound ``B2`` of
:func:`zipfif.system.fixed_point_bounds` (stored in ``aux.Ut``), ``U`` is
replaced by ``B1``, the ``above`` mode uses ``B1`` for ``M``, and the
``between`` mode takes ``y_max`` from the upper lines, since ``f1`` may rise
to them. The corrected ``positivity`` mode guarantees ``f1 >= 0`` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import DenominatorCollapse, EmptyInterval, SpecViolation
from .model import ExtendedDataSet, ScalingFamily, Signature, contraction_aggregate

MODES = ("rectangle", "positivity", "above", "below", "between")
STAGES = ("p", "q", "pt", "qt")
DEFAULT_OMEGA = (0.95 + 1) / 2
# modes whose bounds use M
_NEEDS_M = ("positivity", "above")

Extremes = tuple[float, float]


def _div(num: float, den: float) -> float:
    if den == 0:
        return math.inf if num >= 0 else -math.inf
    return num / den


@dataclass(frozen=True)
class FeasibleInterval:
    lo: float
    hi: float
    lo_strict: bool = True
    hi_strict: bool = True

    @property
    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and (self.lo_strict or self.hi_strict)

    def below_hi(self, v: float) -> bool:
        return v < self.hi if self.hi_strict else v <= self.hi

    def above_lo(self, v: float) -> bool:
        return v > self.lo if self.lo_strict else v >= self.lo

    def contains(self, vmin: float, vmax: float | None = None) -> bool:
        vmax = vmin if vmax is None else vmax
        return self.above_lo(vmin) and self.below_hi(vmax)

    def clipped(self, bound: float = 1.0) -> FeasibleInterval:
        """Intersect with the open interval ``(-bound, bound)``."""
        lo, lo_s = (self.lo, self.lo_strict) if self.lo > -bound else (-bound, True)
        hi, hi_s = (self.hi, self.hi_strict) if self.hi < bound else (bound, True)
        return FeasibleInterval(lo, hi, lo_s, hi_s)

    def pick(self, frac: float = 0.5, delta: float = 1e-9) -> float:
        """A value at relative position ``frac``, kept ``delta`` away from the ends."""
        if self.empty:
            raise ValueError("cannot pick from an empty interval")
        lo, hi = self.lo + delta, self.hi - delta
        if lo > hi:
            return 0.5 * (self.lo + self.hi)
        return lo + frac * (hi - lo)

    def __str__(self) -> str:
        if self.empty:
            return f"empty ({self.lo:.6g}, {self.hi:.6g})"
        lb = "(" if self.lo_strict else "["
        rb = ")" if self.hi_strict else "]"
        return f"{lb}{self.lo:.6g}, {self.hi:.6g}{rb}"


@dataclass(frozen=True)
class ShapeSpec:
    """Shape constraint plus the ω with ``S̄ < ω < 1``.

    ``slopes`` defaults to the data chord slopes. ``b1`` holds the intercepts
    of the lines below the data, ``b2`` those of the lines above.
    """

    mode: str
    k1: float | None = None
    k2: float | None = None
    kt1: float | None = None
    kt2: float | None = None
    slopes: tuple[float, ...] | None = None
    b1: tuple[float, ...] | None = None
    b2: tuple[float, ...] | None = None
    omega: float = DEFAULT_OMEGA
    corrected: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise SpecViolation(f"unknown shape mode {self.mode!r}; expected one of {MODES}")
        for name in ("slopes", "b1", "b2"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(float(t) for t in v))
        if not 0 < self.omega < 1:
            raise SpecViolation(f"omega must lie in (0, 1), got {self.omega}")

    def line_slopes(self, data: ExtendedDataSet) -> np.ndarray:
        if self.slopes is not None:
            return np.array(self.slopes)
        return np.diff(data.ys) / np.diff(data.xs)

    def lines(self, data: ExtendedDataSet, which: str) -> tuple[np.ndarray, np.ndarray]:
        """Slopes and intercepts of the lower (``"b1"``) or upper (``"b2"``) lines."""
        b = getattr(self, which)
        if b is None:
            raise SpecViolation(f"mode {self.mode!r} needs intercepts {which}")
        m = self.line_slopes(data)
        if len(m) != data.n or len(b) != data.n:
            raise SpecViolation(f"need {data.n} slopes and intercepts")
        return m, np.array(b)

    def check(self, data: ExtendedDataSet) -> None:
        """Raise :class:`SpecViolation` if the data break the mode's preconditions."""
        y, z = data.ys, data.zs
        if self.mode == "rectangle":
            if None in (self.k1, self.k2, self.kt1, self.kt2):
                raise SpecViolation("rectangle mode needs k1, k2, kt1, kt2")
            if not (self.k1 < y.min() and self.k2 > y.max()):
                raise SpecViolation(
                    f"[k1, k2] = [{self.k1}, {self.k2}] must strictly contain y in"
                    f" [{y.min()}, {y.max()}]"
                )
            if not (self.kt1 < z.min() and self.kt2 > z.max()):
                raise SpecViolation(
                    f"[kt1, kt2] = [{self.kt1}, {self.kt2}] must strictly contain z in"
                    f" [{z.min()}, {z.max()}]"
                )
        elif self.mode == "positivity":
            if y.min() < 0 or z.min() < 0:
                raise SpecViolation("positivity mode needs y_i >= 0 and z_i >= 0")
        else:
            g1, g2 = line_gaps(data, self)
            if self.mode == "above" and not np.all(g1 > 0):
                raise SpecViolation("data must lie strictly above the lines m_i x + b1_i")
            if self.mode == "below" and not np.all(g2 > 0):
                raise SpecViolation("data must lie strictly below the lines m_i x + b2_i")
            if self.mode == "between":
                if not (np.all(g1 >= 0) and np.all(g2 >= 0)):
                    raise SpecViolation("data must lie between the two line families")
                if not (g1[0] > 0 and g2[0] > 0):
                    raise SpecViolation("y_0 must lie strictly between the lines at x_0")


def line_gaps(data: ExtendedDataSet, spec: ShapeSpec) -> tuple[np.ndarray | None, np.ndarray | None]:
    """Vertical clearance between data and lines, per subinterval.

    ``g1_i`` is the smaller of ``y - (m_i x + b1_i)`` at the two knots of
    ``I_i``; ``g2_i`` likewise for ``(m_i x + b2_i) - y``. For lines parallel
    to the data chords these equal ``y_0 - m_1 x_0 - b1_1`` and
    ``m_1 x_0 + b2_1 - y_0`` whenever the clearance is the same everywhere.
    """
    x, y = data.xs, data.ys
    out = []
    for which, sign in (("b1", 1.0), ("b2", -1.0)):
        if getattr(spec, which) is None:
            out.append(None)
            continue
        m, b = spec.lines(data, which)
        left = sign * (y[:-1] - (m * x[:-1] + b))
        right = sign * (y[1:] - (m * x[1:] + b))
        out.append(np.minimum(left, right))
    return out[0], out[1]


def line_extent(data: ExtendedDataSet, spec: ShapeSpec, which: str) -> tuple[float, float]:
    """Min and max of the line values at every left knot plus the last line at ``x_n``."""
    m, b = spec.lines(data, which)
    x = data.xs
    vals = np.append(m * x[:-1] + b, m[-1] * x[-1] + b[-1])
    return float(vals.min()), float(vals.max())


def line_values_at(data: ExtendedDataSet, spec: ShapeSpec, which: str) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints of every line segment, in order, for plotting."""
    m, b = spec.lines(data, which)
    x = np.column_stack([data.xs[:-1], data.xs[1:]])
    return x.ravel(), (m[:, None] * x + b[:, None]).ravel()


@dataclass(frozen=True)
class SlopeAuxiliaries:
    """Auxiliary bounds; fields not applicable to the mode stay ``None``."""

    y_min: float | None = None
    y_max: float | None = None
    M: float | None = None
    k_tilde: float | None = None
    l_tilde: float | None = None
    U: float | None = None
    Ut: float | None = None

    def need(self, name: str) -> float:
        v = getattr(self, name)
        if v is None:
            raise ValueError(f"auxiliary bound {name!r} is not available")
        return v


def norm_bound(data: ExtendedDataSet, fam: ScalingFamily) -> float:
    """``max_i (max(||p_i||, ||q_i||) + max(||p~_i||, ||q~_i||))``."""
    nrm = fam.norms(data)
    return float((np.maximum(nrm[0], nrm[1]) + np.maximum(nrm[2], nrm[3])).max())


def compute_slope_aux(
    data: ExtendedDataSet,
    spec: ShapeSpec,
    *,
    fam: ScalingFamily | None = None,
    sig: Signature | None = None,
    norm_sum: float | None = None,
    U: float | None = None,
    Ut: float | None = None,
) -> SlopeAuxiliaries:
    """Compute ``y_min``, ``y_max``, ``M``, ``k~`` and ``l~`` where they apply.

    A collapsed ``M`` denominator is only an error in the modes that use ``M``.

    ``M`` needs either a factor family or ``norm_sum`` (a candidate value of
    ``max_i(omega_i + omega~_i)``). ``U`` and ``Ut`` are taken from the
    envelope of the system built from ``fam`` and ``sig`` unless given (its
    proven bounds on f in the corrected form).
    """
    y, z = data.ys, data.zs
    w = spec.omega
    if 1 - w <= 0:
        raise DenominatorCollapse(f"1 - omega = {1 - w} <= 0")
    if norm_sum is None and fam is not None:
        norm_sum = norm_bound(data, fam)
    M = None
    if norm_sum is not None:
        if 1 - norm_sum <= 0:
            if spec.mode in _NEEDS_M and not spec.corrected:
                raise DenominatorCollapse(f"1 - max(omega_i + omega~_i) = {1 - norm_sum} <= 0")
        else:
            M = (
                y.max() + z.max() - norm_sum * (min(y[0], y[-1]) + min(z[0], z[-1]))
            ) / (1 - norm_sum)
    if (U is None or Ut is None) and fam is not None and sig is not None:
        from .system import build_system

        sys = build_system(data, sig, fam, relaxed=True)
        # the corrected form needs proven bounds on f; the printed one uses U, U~
        bU, bUt = sys.f_bounds if spec.corrected else (sys.U, sys.Utilde)
        if math.isfinite(bU) and math.isfinite(bUt):
            U = bU if U is None else U
            Ut = bUt if Ut is None else Ut
    y_min = y_max = None
    if spec.mode in ("above", "between"):
        y_min, y_max = line_extent(data, spec, "b1")
        if spec.mode == "between" and spec.corrected:
            # f1 may rise to the upper lines, so y_max must come from them
            y_max = line_extent(data, spec, "b2")[1]
    elif spec.mode == "below":
        y_min, y_max = line_extent(data, spec, "b2")
    s = np.abs(y + z)
    head = s.max() - w * min(s[0], s[-1])
    k_tilde = None if y_min is None else float((head - (1 - w) * y_min) / (1 - w))
    l_tilde = None if U is None else float((head - (1 - w) * U) / (1 - w))
    return SlopeAuxiliaries(
        y_min=y_min,
        y_max=y_max,
        M=None if M is None else float(M),
        k_tilde=k_tilde,
        l_tilde=l_tilde,
        U=U,
        Ut=Ut,
    )


def _given(given: Mapping[str, Extremes] | None, name: str) -> Extremes:
    if not given or name not in given:
        raise ValueError(f"stage needs the chosen extremes of {name!r}")
    v = given[name]
    if isinstance(v, (int, float)):
        return float(v), float(v)
    lo, hi = v
    return float(lo), float(hi)


def _ends(data: ExtendedDataSet, i: int):
    y, z = data.ys, data.zs
    return (
        float(min(y[i], y[i + 1])),
        float(max(y[i], y[i + 1])),
        float(max(y[0], y[-1])),
        float(min(y[0], y[-1])),
        float(max(z[0], z[-1])),
        float(min(z[0], z[-1])),
    )


def _omega_terms(w: float, ext: Extremes) -> float:
    return min(w - ext[1], w + ext[0])


def _interval(lo_terms, hi_terms, strict: bool) -> FeasibleInterval:
    return FeasibleInterval(-min(lo_terms), min(hi_terms), strict, strict).clipped()


def rectangle_intervals(
    data: ExtendedDataSet,
    spec: ShapeSpec,
    stage: str,
    i: int,
    given: Mapping[str, Extremes] | None = None,
    aux: SlopeAuxiliaries | None = None,
) -> FeasibleInterval:
    """Bounds keeping ``f1`` inside ``[k1, k2]`` (``f2`` inside ``[kt1, kt2]``).

    The corrected form needs ``aux.Ut``.
    """
    spec.check(data)
    k1, k2, kt1, kt2, w = spec.k1, spec.k2, spec.kt1, spec.kt2, spec.omega
    lo_i, hi_i, y0max, y0min, z0max, z0min = _ends(data, i)
    y0, yn = float(data.ys[0]), float(data.ys[-1])
    ra = _div(lo_i - k1, k2 - y0min)
    rb = _div(k2 - hi_i, y0max - k1)
    rc = _div(lo_i - k1, y0max - k1)
    rd = _div(k2 - hi_i, k2 - y0min)
    # range assumed for f2, then the denominators of the q-type bounds
    if spec.corrected:
        if aux is None:
            raise ValueError("corrected rectangle bounds need aux.Ut")
        zl, zu = -aux.need("Ut"), aux.need("Ut")
        d_top = zu - z0min
    else:
        zl, zu = kt1, kt2
        d_top = zu - z0max
    d_bot = z0max - zl

    def gaps(ext: Extremes):
        mn, mx = ext
        g1 = (lo_i - k1) - max(mx * (y0 - k1), mx * (yn - k1), -mn * (k2 - y0), -mn * (k2 - yn))
        g2 = (k2 - hi_i) - max(mx * (k2 - y0), mx * (k2 - yn), -mn * (y0 - k1), -mn * (yn - k1))
        return g1, g2

    if stage == "p":
        return _interval((ra, rb), (rc, rd), True)
    if stage == "q":
        g1, g2 = gaps(_given(given, "p"))
        return _interval((_div(g1, d_top), _div(g2, d_bot)), (_div(g1, d_bot), _div(g2, d_top)), False)
    if stage == "pt":
        wp = _omega_terms(w, _given(given, "p"))
        return _interval((wp, ra, rb), (wp, rc, rd), True)
    if stage == "qt":
        wq = _omega_terms(w, _given(given, "q"))
        g1, g2 = gaps(_given(given, "pt"))
        return _interval(
            (wq, _div(g1, d_top), _div(g2, d_bot)), (wq, _div(g1, d_bot), _div(g2, d_top)), False
        )
    raise ValueError(f"unknown stage {stage!r}")


def positivity_intervals(
    data: ExtendedDataSet,
    spec: ShapeSpec,
    stage: str,
    i: int,
    aux: SlopeAuxiliaries,
    given: Mapping[str, Extremes] | None = None,
) -> FeasibleInterval:
    """Bounds keeping ``f1`` (and, as printed, ``f2``) nonnegative.

    The printed form uses the bound ``M``. The corrected form keeps only
    ``f1 >= 0``: it assumes ``f1`` in ``[0, B1]`` and ``f2`` in ``[-B2, B2]``
    (``aux.U``, ``aux.Ut``) and bounds ``pt``, ``qt`` by the ω terms alone.
    """
    spec.check(data)
    w = spec.omega
    lo_i, _, y0max, y0min, z0max, z0min = _ends(data, i)

    if spec.corrected:
        B1, B2 = aux.need("U"), aux.need("Ut")
        if stage == "p":
            return _interval((_div(lo_i, B1 - y0min),), (_div(lo_i, y0max),), True)
        if stage == "q":
            mn, mx = _given(given, "p")
            g = lo_i + min(v * t for v in (mn, mx) for t in (-y0max, B1 - y0min))
            return _interval((_div(g, B2 - z0min),), (_div(g, B2 + z0max),), False)
        if stage in ("pt", "qt"):
            t = _omega_terms(w, _given(given, "p" if stage == "pt" else "q"))
            return FeasibleInterval(-t, t, False, False).clipped()
        raise ValueError(f"unknown stage {stage!r}")

    M = aux.need("M")

    def q_terms(ext: Extremes):
        mn, mx = ext
        low = (
            _div(lo_i + mn * (M - y0min), M - z0min),
            _div(lo_i - mx * y0min, M - z0min),
        )
        high = (
            _div(lo_i - mx * y0max, z0max),
            _div(lo_i + mn * (M - y0max), z0max),
        )
        return low, high

    p_low, p_high = _div(lo_i, M - y0min), _div(lo_i, y0max)
    if stage == "p":
        return _interval((p_low,), (p_high,), True)
    if stage == "q":
        return _interval(*q_terms(_given(given, "p")), False)
    if stage == "pt":
        wp = _omega_terms(w, _given(given, "p"))
        return _interval((wp, p_low), (wp, p_high), True)
    if stage == "qt":
        wq = _omega_terms(w, _given(given, "q"))
        low, high = q_terms(_given(given, "pt"))
        return _interval((wq, *low), (wq, *high), False)
    raise ValueError(f"unknown stage {stage!r}")


def slope_intervals(
    data: ExtendedDataSet,
    spec: ShapeSpec,
    stage: str,
    i: int,
    aux: SlopeAuxiliaries,
    given: Mapping[str, Extremes] | None = None,
) -> FeasibleInterval:
    """Bounds keeping ``f1`` above, below or between piecewise lines (``spec.mode``)."""
    spec.check(data)
    if spec.mode not in ("above", "below", "between"):
        raise SpecViolation(f"slope intervals need a line mode, got {spec.mode!r}")
    w = spec.omega
    _, _, y0max, y0min, z0max, z0min = _ends(data, i)
    g1s, g2s = line_gaps(data, spec)

    if stage in ("pt", "qt"):
        base = "p" if stage == "pt" else "q"
        t = _omega_terms(w, _given(given, base))
        return FeasibleInterval(-t, t, False, False).clipped()

    if spec.mode == "above":
        g = float(g1s[i])
        U, y_min = aux.need("U"), aux.need("y_min")
        kt = aux.need("Ut") if spec.corrected else aux.need("k_tilde")
        if stage == "p":
            return _interval((_div(g, U - y0min),), (_div(g, y0max - y_min),), True)
        if stage == "q":
            mn, mx = _given(given, "p")
            upper = U if spec.corrected else aux.need("M")
            low = (
                _div(g + mn * (U - y0min), kt - z0min),
                _div(g - mx * (y0max - y_min), kt - z0min),
            )
            high = (
                _div(g - mx * (y0max - y_min), z0max + kt),
                _div(g + mn * (upper - y0min), z0max + kt),
            )
            return _interval(low, high, False)

    elif spec.mode == "below":
        g = float(g2s[i])
        U, y_max = aux.need("U"), aux.need("y_max")
        lt = aux.need("Ut") if spec.corrected else aux.need("l_tilde")
        if stage == "p":
            return _interval((_div(g, U + y0max),), (_div(g, y_max - y0min),), True)
        if stage == "q":
            mn, mx = _given(given, "p")
            low = (
                _div(g + mn * (U + y0max), z0max + lt),
                _div(g - mx * (y_max - y0min), z0max + lt),
            )
            high = (
                _div(g + mn * (y0max + U), lt - z0min),
                _div(g - mx * (y_max - y0min), lt - z0min),
            )
            return _interval(low, high, False)

    else:
        g1, g2 = float(g1s[i]), float(g2s[i])
        y_min, y_max = aux.need("y_min"), aux.need("y_max")
        kt = aux.need("Ut") if spec.corrected else aux.need("k_tilde")
        up, dn = y_max - y0min, y0max - y_min
        if stage == "p":
            return _interval((_div(g1, up), _div(g2, dn)), (_div(g1, dn), _div(g2, up)), True)
        if stage == "q":
            mn, mx = _given(given, "p")
            d = z0max + kt if spec.corrected else z0max - kt
            e = kt - z0min
            low = (
                _div(g1 + mn * up, e),
                _div(g2 + mn * dn, d),
                _div(g1 - mx * dn, e),
                _div(g2 - mx * up, d),
            )
            high = (
                _div(g1 - mx * dn, d),
                _div(g2 - mx * up, e),
                _div(g1 + mn * up, d),
                _div(g2 + mn * dn, e),
            )
            return _interval(low, high, False)
    raise ValueError(f"unknown stage {stage!r}")


def feasible_interval(
    data: ExtendedDataSet,
    spec: ShapeSpec,
    stage: str,
    i: int,
    aux: SlopeAuxiliaries | None = None,
    given: Mapping[str, Extremes] | None = None,
) -> FeasibleInterval:
    """Dispatch on ``spec.mode``."""
    if spec.mode == "rectangle":
        return rectangle_intervals(data, spec, stage, i, given, aux)
    if aux is None:
        raise ValueError(f"mode {spec.mode!r} needs auxiliary bounds")
    if spec.mode == "positivity":
        return positivity_intervals(data, spec, stage, i, aux, given)
    return slope_intervals(data, spec, stage, i, aux, given)


@dataclass(frozen=True)
class FactorCheck:
    interval: int  # 1-based subinterval number
    factor: str
    bounds: FeasibleInterval
    vmin: float
    vmax: float
    passed: bool
    binding: str | None = None


@dataclass(frozen=True)
class FamilyReport:
    checks: tuple[FactorCheck, ...]
    sbar: float
    omega: float
    omega_ok: bool = field(default=True)

    @property
    def passed(self) -> bool:
        return self.omega_ok and all(c.passed for c in self.checks)

    def failures(self) -> list[FactorCheck]:
        return [c for c in self.checks if not c.passed]


def _judge(i: int, name: str, bounds: FeasibleInterval, ext: Extremes) -> FactorCheck:
    vmin, vmax = ext
    binding = None
    if bounds.empty:
        binding = f"{name}_{i + 1}: feasible interval is empty {bounds}"
    elif not bounds.below_hi(vmax):
        op = "<" if bounds.hi_strict else "<="
        binding = f"{name}_{i + 1} max {vmax:.6g} violates {name}_max {op} {bounds.hi:.6g}"
    elif not bounds.above_lo(vmin):
        op = ">" if bounds.lo_strict else ">="
        binding = f"{name}_{i + 1} min {vmin:.6g} violates {name}_min {op} {bounds.lo:.6g}"
    return FactorCheck(i + 1, name, bounds, vmin, vmax, binding is None, binding)


def check_family(
    data: ExtendedDataSet,
    fam: ScalingFamily,
    spec: ShapeSpec,
    aux: SlopeAuxiliaries | None = None,
    *,
    sig: Signature | None = None,
) -> FamilyReport:
    """Re-evaluate every bound for a concrete family; report-only, never raises on failure."""
    if aux is None and (spec.mode != "rectangle" or spec.corrected):
        aux = compute_slope_aux(data, spec, fam=fam, sig=sig)
    checks = []
    for i in range(data.n):
        seg = data.subinterval(i)
        ext = {k: fam.factors(k)[i].extremes(*seg) for k in STAGES}
        for name, deps in (("p", ()), ("q", ("p",)), ("pt", ("p",)), ("qt", ("q", "pt"))):
            bounds = feasible_interval(data, spec, name, i, aux, {d: ext[d] for d in deps})
            checks.append(_judge(i, name, bounds, ext[name]))
    sbar = contraction_aggregate(data, fam)
    return FamilyReport(tuple(checks), sbar, spec.omega, sbar < spec.omega)


def _stage_aux(data, spec, sig, vals) -> SlopeAuxiliaries | None:
    if spec.mode == "rectangle" and not spec.corrected:
        return None
    fam = ScalingFamily.constant(*(vals[k] for k in STAGES))
    return compute_slope_aux(data, spec, fam=fam, sig=sig)


def choose_family(
    data: ExtendedDataSet,
    spec: ShapeSpec,
    sig: Signature,
    fracs=0.5,
    *,
    delta: float = 1e-9,
) -> ScalingFamily:
    """Constant factors picked stage by stage from their feasibility intervals.

    ``fracs`` is a scalar or an ``(n, 4)`` array of relative positions inside
    each interval (columns p, q, pt, qt). Auxiliary bounds that depend on the
    family are recomputed from the factors chosen so far, so the result should
    be re-checked with :func:`check_family`. Raises :class:`EmptyInterval`.
    """
    n = data.n
    fr = np.broadcast_to(np.asarray(fracs, dtype=float), (n, 4))
    vals = {k: [0.0] * n for k in STAGES}
    deps = {"p": (), "q": ("p",), "pt": ("p",), "qt": ("q", "pt")}
    for i in range(n):
        for col, stage in enumerate(STAGES):
            aux = _stage_aux(data, spec, sig, vals)
            given = {d: vals[d][i] for d in deps[stage]}
            iv = feasible_interval(data, spec, stage, i, aux, given)
            if iv.empty:
                raise EmptyInterval(f"{stage}_{i + 1}: {iv}")
            vals[stage][i] = iv.pick(fr[i, col], delta)
    return ScalingFamily.constant(*(vals[k] for k in STAGES))


def with_omega(spec: ShapeSpec, omega: float) -> ShapeSpec:
    return replace(spec, omega=omega)


def stage_table(
    data: ExtendedDataSet,
    spec: ShapeSpec,
    stage: str,
    aux: SlopeAuxiliaries | None = None,
    given: Sequence[Mapping[str, Extremes]] | None = None,
) -> list[FeasibleInterval]:
    """One interval per subinterval for ``stage``; ``given[i]`` feeds interval ``i``."""
    return [
        feasible_interval(data, spec, stage, i, aux, None if given is None else given[i])
        for i in range(data.n)
    ]
