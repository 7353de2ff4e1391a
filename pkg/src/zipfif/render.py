"""Exact sampling and pointwise evaluation of the fixed point ``f = (f1, f2)``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DepthTooLarge, ToleranceNotReached, XOutOfDomain
from .system import DOMAIN_SLACK, ZipperSystem, factor_values, shear

DEFAULT_MAX_POINTS = 10**7
DEDUP_TOL = 1e-12
#: Level cap for the backward recursion in :func:`evaluate_many`.
MAX_LEVELS = 2048
# Knot snapping: the recursion amplifies rounding in x by 1/|a_i| per level,
# so the snap radius follows that amplification up to a hard cap.
_SNAP_FACTOR = 16 * np.finfo(float).eps
_SNAP_CAP = 1e-7


@dataclass(frozen=True, eq=False)
class CurveSample:
    """Samples ``(x, f1(x), f2(x))`` sorted by ``x``."""

    x: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    raw_count: int = 0

    def __post_init__(self):
        for name in ("x", "f1", "f2"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not self.raw_count:
            object.__setattr__(self, "raw_count", len(self.x))

    def __len__(self) -> int:
        return len(self.x)

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.f1, self.f2])

    def component(self, name: str) -> np.ndarray:
        return {"f1": self.f1, "f2": self.f2}[name]

    @classmethod
    def from_unsorted(cls, x, f1, f2, *, tol: float = DEDUP_TOL) -> CurveSample:
        order = np.argsort(x, kind="stable")
        x, f1, f2 = x[order], f1[order], f2[order]
        keep = np.ones(len(x), dtype=bool)
        keep[1:] = np.diff(x) > tol
        return cls(x[keep], f1[keep], f2[keep], raw_count=len(order))


def interval_index(knots: np.ndarray, x) -> np.ndarray:
    """Subinterval index under the ``[x_{i-1}, x_i)`` rule; ``x_n`` belongs to the last one."""
    n = len(knots) - 1
    return np.clip(np.searchsorted(knots, x, side="right") - 1, 0, n - 1)


def projected_points(n: int, depth: int) -> int:
    return (n + 1) * n**depth


def refine_orbit(
    sys: ZipperSystem, depth: int, *, max_points: int = DEFAULT_MAX_POINTS
) -> CurveSample:
    """Apply the Hutchinson operator ``depth`` times to the interpolation points."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    count = projected_points(sys.n, depth)
    if count > max_points:
        raise DepthTooLarge(f"depth {depth} yields {count} points (cap {max_points})")
    d = sys.data
    x, y, z = np.array(d.xs), np.array(d.ys), np.array(d.zs)
    for _ in range(depth):
        parts = [shear(sys, i, x, y, z) for i in range(sys.n)]
        x = np.concatenate([p[0] for p in parts])
        y = np.concatenate([p[1] for p in parts])
        z = np.concatenate([p[2] for p in parts])
        del parts
    return CurveSample.from_unsorted(x, y, z)


def apply_hutchinson(sys: ZipperSystem, sample: CurveSample) -> CurveSample:
    parts = [shear(sys, i, sample.x, sample.f1, sample.f2) for i in range(sys.n)]
    return CurveSample.from_unsorted(*(np.concatenate([p[k] for p in parts]) for k in range(3)))


def orbit_points(sys: ZipperSystem, addresses, start) -> np.ndarray:
    """Exact attractor points ``omega_{a_1} o ... o omega_{a_k}(x_j, y_j, z_j)``.

    ``addresses`` has shape ``(N, k)`` (interval indices, outermost map first)
    and ``start`` holds the ``N`` knot indices ``j``. Returns ``(N, 3)``.
    """
    addresses = np.atleast_2d(np.asarray(addresses, dtype=int))
    start = np.asarray(start, dtype=int)
    d = sys.data
    x, y, z = d.xs[start], d.ys[start], d.zs[start]
    for col in range(addresses.shape[1] - 1, -1, -1):
        x, y, z = shear(sys, addresses[:, col], x, y, z)
    return np.column_stack([x, y, z])


def _linear_data(sys: ZipperSystem, x):
    d = sys.data
    return np.interp(x, d.xs, d.ys), np.interp(x, d.xs, d.zs)


def _inverse_map(sys: ZipperSystem, i, x):
    """``L_i^{-1}(x)``, computed from knot differences for accuracy."""
    k = sys.data.xs
    lo, hi = sys.lo[i], sys.hi[i]
    xp = k[0] + (x - k[lo]) * ((k[-1] - k[0]) / (k[hi] - k[lo]))
    return np.clip(xp, k[0], k[-1])


def evaluate_many(
    sys: ZipperSystem,
    xs,
    tol: float = 1e-9,
    *,
    depth: int | None = None,
    max_levels: int = MAX_LEVELS,
    amp=1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``(f1, f2)`` at every abscissa in ``xs``.

    Each point is pulled back through ``L_i^{-1}`` while the affine action of
    the shear maps is accumulated, until the backward orbit lands on a knot
    (exact) or the accumulated matrix shrinks the worst-case error of the
    piecewise-linear data interpolant below ``tol``.

    With ``depth`` given the recursion stops after exactly that many levels
    instead, which evaluates the depth-th Picard iterate of the piecewise-linear
    interpolant. This is the only option for systems without a bound on ``f``.

    ``amp`` is the rounding amplification already present in ``xs`` (for
    abscissae produced by ``L_i^{-1}``); it widens the knot snapping radius.
    """
    d = sys.data
    knots = d.xs
    x0, xn = knots[0], knots[-1]
    width = xn - x0
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    slack = DOMAIN_SLACK * width
    if np.any(xs < x0 - slack) or np.any(xs > xn + slack):
        raise XOutOfDomain(f"abscissa outside [{x0}, {xn}]")
    if depth is None and not sys.has_bounds:
        raise ToleranceNotReached("system has no bound on f; pass an explicit depth")
    npts = len(xs)
    cur = np.clip(xs, x0, xn)
    a00 = np.ones(npts)
    a01 = np.zeros(npts)
    a10 = np.zeros(npts)
    a11 = np.ones(npts)
    o1 = np.zeros(npts)
    o2 = np.zeros(npts)
    amp = np.broadcast_to(np.asarray(amp, dtype=float), (npts,)).copy()
    out1 = np.empty(npts)
    out2 = np.empty(npts)
    active = np.arange(npts)
    scale = max(abs(x0), abs(xn), width)
    inv_a = 1.0 / np.abs(sys.a)
    if depth is None:
        e1 = sys.f_bounds[0] + np.abs(d.ys).max()
        e2 = sys.f_bounds[1] + np.abs(d.zs).max()

    def close(sel, v1, v2):
        idx = active[sel]
        out1[idx] = a00[idx] * v1 + a01[idx] * v2 + o1[idx]
        out2[idx] = a10[idx] * v1 + a11[idx] * v2 + o2[idx]

    for level in range(max_levels + 1):
        if active.size == 0:
            break
        xa = cur[active]
        k = np.clip(np.searchsorted(knots, xa), 1, len(knots) - 1)
        k -= (xa - knots[k - 1]) < (knots[k] - xa)
        snap = np.abs(xa - knots[k]) <= np.minimum(
            _SNAP_FACTOR * scale * amp[active], _SNAP_CAP * width
        )
        if snap.any():
            close(snap, d.ys[k[snap]], d.zs[k[snap]])
            active, xa = active[~snap], xa[~snap]
        if depth is not None:
            if level == depth:
                close(slice(None), *_linear_data(sys, xa))
                active = active[:0]
                break
        else:
            idx = active
            err = np.maximum(
                np.abs(a00[idx]) * e1 + np.abs(a01[idx]) * e2,
                np.abs(a10[idx]) * e1 + np.abs(a11[idx]) * e2,
            )
            done = err <= tol
            if done.any():
                close(done, *_linear_data(sys, xa[done]))
                active, xa = active[~done], xa[~done]
        if active.size == 0:
            break
        if level == max_levels:
            raise ToleranceNotReached(
                f"{active.size} points did not reach tol={tol} in {max_levels} levels"
            )
        i = interval_index(knots, xa)
        xp = _inverse_map(sys, i, xa)
        p, q, pt, qt = factor_values(sys, i, xa)
        _, c1, c2 = shear(sys, i, xp, 0.0, 0.0)
        b00, b01, b10, b11 = a00[active], a01[active], a10[active], a11[active]
        o1[active] += b00 * c1 + b01 * c2
        o2[active] += b10 * c1 + b11 * c2
        a00[active] = b00 * p + b01 * pt
        a01[active] = b00 * q + b01 * qt
        a10[active] = b10 * p + b11 * pt
        a11[active] = b10 * q + b11 * qt
        amp[active] *= inv_a[i]
        cur[active] = xp
    return out1, out2


def evaluate_at(sys: ZipperSystem, x: float, tol: float = 1e-9, **kw) -> tuple[float, float]:
    f1, f2 = evaluate_many(sys, [x], tol, **kw)
    return float(f1[0]), float(f2[0])


def sample_uniform(sys: ZipperSystem, m: int, tol: float = 1e-9, **kw) -> CurveSample:
    if m < 2:
        raise ValueError("m must be >= 2")
    x0, xn = sys.data.interval
    x = np.linspace(x0, xn, m)
    f1, f2 = evaluate_many(sys, x, tol, **kw)
    return CurveSample(x, f1, f2)


def apply_operator(sys: ZipperSystem, gx, g1, g2, grid) -> tuple[np.ndarray, np.ndarray]:
    """Read-out operator ``(Tg)(x) = F_i(L_i^{-1}(x), g(L_i^{-1}(x)))`` on ``grid``.

    ``g`` is the piecewise-linear function through ``(gx, g1, g2)``.
    """
    grid = np.asarray(grid, dtype=float)
    i = interval_index(sys.data.xs, grid)
    xp = _inverse_map(sys, i, grid)
    _, t1, t2 = shear(sys, i, xp, np.interp(xp, gx, g1), np.interp(xp, gx, g2))
    return t1, t2


def fixed_point_residual(
    sys: ZipperSystem, sample: CurveSample, tol: float = 1e-12, *, chunk: int = 1 << 20
) -> np.ndarray:
    """``|(f1, f2)(x) - F_i(L_i^{-1}(x), f(L_i^{-1}(x)))|`` (max of both components).

    Knots get residual 0; every other sample uses the subinterval containing it.
    """
    knots = sys.data.xs
    res = np.zeros(len(sample))
    kw = {} if sys.has_bounds else {"depth": 64}
    for s in range(0, len(sample), chunk):
        x = sample.x[s : s + chunk]
        i = interval_index(knots, x)
        interior = (x > knots[i]) & (x < knots[i + 1])
        xi, ii = x[interior], i[interior]
        xp = _inverse_map(sys, ii, xi)
        g1, g2 = evaluate_many(sys, xp, tol, amp=1.0 / np.abs(sys.a[ii]), **kw)
        _, t1, t2 = shear(sys, ii, xp, g1, g2)
        r = np.zeros(len(x))
        r[interior] = np.maximum(
            np.abs(sample.f1[s : s + chunk][interior] - t1),
            np.abs(sample.f2[s : s + chunk][interior] - t2),
        )
        res[s : s + chunk] = r
    return res

