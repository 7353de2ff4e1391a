"""Zipper hidden-variable IFS: interval maps, shear maps and contraction constants.

Interval indices are 0-based throughout: ``i = 0`` is the first subinterval
``[x_0, x_1]``. For interval ``i`` the map ``L_i`` sends ``x_0`` to knot
``lo[i] = i + eps[i]`` and ``x_n`` to knot ``hi[i] = i + 1 - eps[i]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DegenerateDenominator, XOutOfDomain
from .model import ExtendedDataSet, ScalingFamily, Signature, Validated, validate

#: Relative slack when deciding whether an abscissa lies in ``I``.
DOMAIN_SLACK = 1e-12


def endpoint_indices(sig: Signature) -> tuple[np.ndarray, np.ndarray]:
    """Knot indices hit by ``L_i(x_0)`` and ``L_i(x_n)``."""
    eps = np.asarray(sig.eps, dtype=int)
    i = np.arange(len(eps))
    return i + eps, i + 1 - eps


def build_interval_maps(data: ExtendedDataSet, sig: Signature) -> tuple[np.ndarray, np.ndarray]:
    """Slopes ``a`` and intercepts ``b`` of the affine maps ``L_i(x) = a_i x + b_i``."""
    x = data.xs
    lo, hi = endpoint_indices(sig)
    width = x[-1] - x[0]
    a = (x[hi] - x[lo]) / width
    b = (x[lo] * x[-1] - x[hi] * x[0]) / width
    return a, b


def _sup_abs(poly: Polynomial, lo: float, hi: float) -> float:
    cands = [lo, hi]
    # near-degenerate leading coefficients push the root towards infinity
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        roots = poly.deriv().roots()
    for r in roots:
        if np.isfinite(r) and abs(r.imag) < 1e-14 and lo < r.real < hi:
            cands.append(r.real)
    return float(max(abs(poly(c)) for c in cands))


def offset_polynomials(
    data: ExtendedDataSet, sig: Signature, fam: ScalingFamily, i: int
) -> tuple[Polynomial, Polynomial]:
    """The offsets ``r_i`` and ``r~_i`` as polynomials in ``x`` (degree <= 2)."""
    x, y, z = data.xs, data.ys, data.zs
    lo, hi = endpoint_indices(sig)
    lo, hi = lo[i], hi[i]
    w = x[-1] - x[0]
    mu = Polynomial([-x[0] / w, 1.0 / w])
    lx = x[lo] + (x[hi] - x[lo]) * mu
    c = fam.coeffs[:, i]
    p, q, pt, qt = (c[k, 0] + c[k, 1] * lx for k in range(4))
    ends_y = y[0] + (y[-1] - y[0]) * mu
    ends_z = z[0] + (z[-1] - z[0]) * mu
    r = y[lo] + (y[hi] - y[lo]) * mu - p * ends_y - q * ends_z
    rt = z[lo] + (z[hi] - z[lo]) * mu - pt * ends_y - qt * ends_z
    return r, rt


@dataclass(frozen=True, eq=False)
class ZipperSystem:
    """Fully derived ZHVIFS for one data set, signature and factor family.

    ``U``, ``Utilde``, ``theta`` and ``kappa`` are NaN for a relaxed system
    whose envelope denominator is not positive. ``f_bounds`` holds proven
    bounds on ``(||f1||, ||f2||)`` from :func:`fixed_point_bounds`; the
    rectangle ``[-U, U] x [-U~, U~]`` is not always invariant and may not
    contain the graph.
    """

    data: ExtendedDataSet
    sig: Signature
    fam: ScalingFamily
    a: np.ndarray
    b: np.ndarray
    A: float
    Sbar: float
    U: float
    Utilde: float
    theta: float
    kappa: float
    norms: np.ndarray  # (4, n) sup norms of p, q, pt, qt
    r_norms: np.ndarray  # (2, n) sup norms of r_i, r~_i over I
    lipschitz: dict = field(default_factory=dict)
    relaxed: bool = False
    f_bounds: tuple[float, float] = (math.nan, math.nan)

    @property
    def n(self) -> int:
        return self.data.n

    @property
    def lo(self) -> np.ndarray:
        return endpoint_indices(self.sig)[0]

    @property
    def hi(self) -> np.ndarray:
        return endpoint_indices(self.sig)[1]

    @property
    def has_envelope(self) -> bool:
        return math.isfinite(self.U) and math.isfinite(self.Utilde)

    @property
    def has_bounds(self) -> bool:
        return all(math.isfinite(v) for v in self.f_bounds)

    def constants(self) -> dict:
        return {
            "A": self.A,
            "Sbar": self.Sbar,
            "U": self.U,
            "Utilde": self.Utilde,
            "theta": self.theta,
            "kappa": self.kappa,
        }


def compute_envelope(norms: np.ndarray, r_norms: np.ndarray) -> tuple[float, float]:
    """Half-widths ``(U, U~)`` of the invariant rectangle ``E``."""
    p, q, pt, qt = norms
    r, rt = r_norms
    den = (1 - p) * (1 - qt) - pt * q
    if np.any(den <= 0):
        i = int(np.argmin(den))
        raise DegenerateDenominator(
            f"envelope denominator (1-||p||)(1-||q~||) - ||p~||*||q|| = {den[i]:.6g}"
            f" <= 0 on interval {i + 1}"
        )
    U = np.max((q * rt + (1 - qt) * r) / den)
    Ut = np.max((pt * r + (1 - p) * rt) / den)
    return float(U), float(Ut)


def fixed_point_bounds(
    norms: np.ndarray, r_norms: np.ndarray, sbar: float, *, max_iter: int = 100_000
) -> tuple[float, float]:
    """Bounds ``(B1, B2)`` with ``|f1| <= B1`` and ``|f2| <= B2`` on ``I``.

    Two valid bounds are combined componentwise. The first is the least
    ``u = (B1, B2)`` with ``||p_i|| B1 + ||q_i|| B2 + ||r_i|| <= B1`` and
    ``||p~_i|| B1 + ||q~_i|| B2 + ||r~_i|| <= B2`` for every ``i``, found by
    monotone iteration and then certified; it may not exist. The second is
    ``|f1| + |f2| <= max_i(||r_i|| + ||r~_i||) / (1 - S̄)`` when ``S̄ < 1``.
    NaN when neither applies.
    """
    p, q, pt, qt = norms
    r, rt = r_norms
    out = np.full(2, np.inf)
    if sbar < 1:
        out[:] = float((r + rt).max()) / (1 - sbar)

    def G(u):
        return np.array([(p * u[0] + q * u[1] + r).max(), (pt * u[0] + qt * u[1] + rt).max()])

    u = np.zeros(2)
    for _ in range(max_iter):
        v = G(u)
        if not np.all(np.isfinite(v)) or v.max() > 1e300:
            break
        if np.all(v - u <= 1e-14 * (1 + v)):
            # certify a slightly inflated point
            w = v * (1 + 1e-9)
            if np.all(G(w) <= w):
                out = np.minimum(out, w)
            break
        u = v
    return tuple(float(t) if np.isfinite(t) else math.nan for t in out)


def compute_contraction(
    A: float, sbar: float, U: float, Ut: float, lip: dict
) -> tuple[float, float]:
    """Pick θ at half its admissible upper bound and return ``(theta, kappa)``."""
    den = (
        A * U * (lip["p"] + lip["pt"])
        + A * Ut * (lip["q"] + lip["qt"])
        + (lip["r"] + lip["rt"])
    )
    theta = 1.0 if den == 0 else 0.5 * (1 - A) / den
    kappa = max(A + theta * den, sbar)
    return theta, kappa


def build_system(
    data: ExtendedDataSet,
    sig: Signature,
    fam: ScalingFamily,
    *,
    relaxed: bool = False,
) -> ZipperSystem:
    v = validate(data, sig, fam, relaxed=relaxed)
    return system_from_validated(v, relaxed=relaxed)


def system_from_validated(v: Validated, *, relaxed: bool = False) -> ZipperSystem:
    data, sig, fam, sbar = v
    a, b = build_interval_maps(data, sig)
    x0, xn = data.interval
    norms = fam.norms(data)
    r_norms = np.empty((2, data.n))
    lip_r = np.empty((2, data.n))
    for i in range(data.n):
        for k, poly in enumerate(offset_polynomials(data, sig, fam, i)):
            r_norms[k, i] = _sup_abs(poly, x0, xn)
            d = poly.deriv()
            lip_r[k, i] = max(abs(d(x0)), abs(d(xn)))
    flip = fam.lipschitz()
    lip = {
        "p": float(flip[0].max()),
        "q": float(flip[1].max()),
        "pt": float(flip[2].max()),
        "qt": float(flip[3].max()),
        "r": float(lip_r[0].max()),
        "rt": float(lip_r[1].max()),
    }
    A = float(np.abs(a).max())
    try:
        U, Ut = compute_envelope(norms, r_norms)
    except DegenerateDenominator:
        if not relaxed:
            raise
        U = Ut = theta = kappa = math.nan
    else:
        theta, kappa = compute_contraction(A, sbar, U, Ut, lip)
    f_bounds = fixed_point_bounds(norms, r_norms, sbar)
    for arr in (a, b, norms, r_norms):
        arr.flags.writeable = False
    return ZipperSystem(
        data=data,
        sig=sig,
        fam=fam,
        a=a,
        b=b,
        A=A,
        Sbar=sbar,
        U=U,
        Utilde=Ut,
        theta=theta,
        kappa=kappa,
        norms=norms,
        r_norms=r_norms,
        lipschitz=lip,
        relaxed=relaxed,
        f_bounds=f_bounds,
    )


def _check_domain(sys: ZipperSystem, x) -> None:
    x0, xn = sys.data.interval
    slack = DOMAIN_SLACK * (xn - x0)
    xa = np.asarray(x)
    if np.any(xa < x0 - slack) or np.any(xa > xn + slack):
        raise XOutOfDomain(f"abscissa outside [{x0}, {xn}]")


def factor_values(sys: ZipperSystem, i, t) -> np.ndarray:
    """Values of ``p_i, q_i, p~_i, q~_i`` at abscissa ``t`` in ``I_i``; shape ``(4, ...)``."""
    t = np.asarray(t, dtype=float)
    c = sys.fam.coeffs[:, i]
    c0, c1 = c[..., 0], c[..., 1]
    if np.ndim(i) == 0:
        c0 = c0.reshape((4,) + (1,) * t.ndim)
        c1 = c1.reshape((4,) + (1,) * t.ndim)
    return c0 + c1 * t


def shear(sys: ZipperSystem, i, x, y, z):
    """Vectorized ``(L_i(x), F_i(x, y, z))``; ``i`` may be an int or an index array."""
    data = sys.data
    xs, ys, zs = data.xs, data.ys, data.zs
    lo, hi = sys.lo[i], sys.hi[i]
    x = np.asarray(x, dtype=float)
    mu = (x - xs[0]) / (xs[-1] - xs[0])
    lx = (1 - mu) * xs[lo] + mu * xs[hi]
    p, q, pt, qt = factor_values(sys, i, lx)
    dy = np.asarray(y) - ((1 - mu) * ys[0] + mu * ys[-1])
    dz = np.asarray(z) - ((1 - mu) * zs[0] + mu * zs[-1])
    f1 = p * dy + q * dz + ((1 - mu) * ys[lo] + mu * ys[hi])
    f2 = pt * dy + qt * dz + ((1 - mu) * zs[lo] + mu * zs[hi])
    return lx, f1, f2


def apply_map(sys: ZipperSystem, i: int, x, y, z):
    """``omega_i(x, y, z) = (L_i(x), F_i(x, y, z))``."""
    return shear(sys, i, x, y, z)


def eval_offsets(sys: ZipperSystem, i: int, x):
    """``(r_i(x), r~_i(x))``."""
    _check_domain(sys, x)
    _, r, rt = shear(sys, i, x, 0.0, 0.0)
    return r, rt


def eval_F(sys: ZipperSystem, i: int, x, y, z):
    """``F_i(x, y, z) = (F_{i,1}, F_{i,2})``."""
    _check_domain(sys, x)
    _, f1, f2 = shear(sys, i, x, y, z)
    return f1, f2


def rho_theta(p1, p2, theta: float):
    """Metric ``|x1-x2| + theta*(|y1-y2| + |z1-z2|)`` on stacked ``(x, y, z)`` rows."""
    p1 = np.asarray(p1)
    p2 = np.asarray(p2)
    d = np.abs(p1 - p2)
    return d[..., 0] + theta * (d[..., 1] + d[..., 2])
