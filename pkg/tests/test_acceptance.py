"""Acceptance criteria 1-8; each test prints one PASS/FAIL line to the terminal."""
import time

import numpy as np
import pytest

from zipfif.cli import shape_check
from zipfif.config import RunConfig
from zipfif.model import Signature
from zipfif.presets import (
    EXAMPLE1,
    EXAMPLE1_ZFIF,
    EXAMPLE2,
    EXAMPLE3,
    EXAMPLE6,
    PRESETS,
    SHAPE_PRESETS,
)
from zipfif.render import (
    evaluate_many,
    fixed_point_residual,
    orbit_points,
    refine_orbit,
)
from zipfif.shape import (
    compute_slope_aux,
    positivity_intervals,
    rectangle_intervals,
    slope_intervals,
)
from zipfif.system import apply_map, build_system, rho_theta
from zipfif.verify import check_envelope, check_interpolation, l1_error, weierstrass

from .conftest import operator_distance

pytestmark = pytest.mark.acceptance

DEPTH8 = 2 * 10**7


@pytest.fixture
def verdict(request):
    tr = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(num, passed, detail):
        line = f"[criterion {num}] {'PASS' if passed else 'FAIL'}: {detail}"
        if tr is not None:
            tr.write_line("")
            tr.write_line(line)
        else:
            print(line)
        return passed

    return emit


@pytest.fixture(scope="module")
def systems8():
    """Depth-8 renders of every example system, shared by criteria 4, 6 and 7."""
    out = {}
    for name, p in PRESETS.items():
        s = p.system()
        out[name] = (s, refine_orbit(s, 8, max_points=DEPTH8))
    return out


def test_criterion1_feasibility_reproduction(verdict):
    t = time.perf_counter()
    ex2 = [(-0.428, 0.571), (-0.714, 0.571), (-0.714, 0.5), (-0.785, 0.5), (-0.75, 0.428), (-0.571, 0.428)]
    ex3 = [0.7, 0.7, 0.6, 0.6, 0.8, 0.65]
    aux3 = compute_slope_aux(EXAMPLE3.data, EXAMPLE3.spec, fam=EXAMPLE3.fam, sig=EXAMPLE3.sig)
    aux6 = compute_slope_aux(EXAMPLE6.data, EXAMPLE6.spec, fam=EXAMPLE6.fam, sig=EXAMPLE6.sig)
    err = 0.0
    for i in range(6):
        iv = rectangle_intervals(EXAMPLE2.data, EXAMPLE2.spec, "p", i)
        err = max(err, abs(iv.lo - ex2[i][0]), abs(iv.hi - ex2[i][1]))
        iv = positivity_intervals(EXAMPLE3.data, EXAMPLE3.spec, "p", i, aux3)
        err = max(err, abs(iv.hi - ex3[i]))
        iv = slope_intervals(EXAMPLE6.data, EXAMPLE6.spec, "p", i, aux6)
        err = max(err, abs(iv.lo + 0.158), abs(iv.hi - 0.158))
    dt = time.perf_counter() - t
    ok = verdict(1, err <= 1e-3 and dt < 1, f"max deviation {err:.2e} (tol 1e-3), {dt:.3f} s")
    assert ok


def test_criterion2_geometric_guarantees(verdict):
    parts, ok = [], True
    for p in SHAPE_PRESETS:
        t = time.perf_counter()
        s = p.system()
        cfg = RunConfig(None, p.data, p.sig, p.fam, p.spec)
        rep = shape_check(cfg, refine_orbit(s, 6))
        dt = time.perf_counter() - t
        good = rep.worst_violation <= 1e-9 and dt < 10
        ok &= good
        parts.append(f"{p.name} {rep.property} worst {rep.worst_violation:.3g} {'ok' if good else 'FAIL'}")
    verdict(2, ok, "; ".join(parts))
    assert ok


def test_criterion3_weierstrass(verdict):
    t = time.perf_counter()
    ref = lambda x: weierstrass(x, 30)
    got = {}
    for p in (EXAMPLE1, EXAMPLE1_ZFIF):
        c = refine_orbit(p.system(), 8, max_points=DEPTH8)
        got[p.name] = l1_error(c, ref, m=10**5)
    dt = time.perf_counter() - t
    zhv, zfif = got["example1"], got["example1-zfif"]
    ok_zhv = abs(zhv - 0.384) <= 0.1 * 0.384
    ok_zfif = abs(zfif - 0.979) <= 0.1 * 0.979
    ok = ok_zhv and ok_zfif and dt < 60
    verdict(3, ok, f"ZHV error {zhv:.4f} (target 0.384 +-10%), ZFIF error {zfif:.4f} "
                   f"(target 0.979 +-10%), {dt:.1f} s")
    assert ok


def test_criterion4_fixed_point_residual(verdict, systems8):
    worst = {}
    for name, (s, c) in systems8.items():
        worst[name] = float(fixed_point_residual(s, c).max())
    ok = max(worst.values()) <= 1e-8
    verdict(4, ok, ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + " (tol 1e-8)")
    assert ok


def test_criterion5_contraction(verdict):
    rng = np.random.default_rng(2024)
    parts, ok = [], True
    for name, p in PRESETS.items():
        s = p.system()
        if s.has_envelope:
            x0, xn = s.data.interval
            pts = [
                np.column_stack([
                    rng.uniform(x0, xn, 10**4),
                    rng.uniform(-s.U, s.U, 10**4),
                    rng.uniform(-s.Utilde, s.Utilde, 10**4),
                ])
                for _ in range(2)
            ]
            before = rho_theta(pts[0], pts[1], s.theta)
            excess = max(
                float(np.max(rho_theta(np.column_stack(apply_map(s, i, *pts[0].T)),
                                       np.column_stack(apply_map(s, i, *pts[1].T)), s.theta)
                             - s.kappa * before))
                for i in range(s.n)
            )
            maps = f"maps {excess:.2e}"
            ok &= excess <= 1e-10
        else:
            # no invariant rectangle, theta or kappa; the map part does not apply
            assert np.isnan(s.U) and np.isnan(s.theta) and np.isnan(s.kappa)
            maps = "maps n/a (no envelope)"
        grid = np.linspace(*s.data.interval, 2048)
        op = max(DT - s.Sbar * D for DT, D in (operator_distance(s, rng, grid) for _ in range(100)))
        ok &= op <= 1e-9
        parts.append(f"{name} {maps}, operator {op:.2e}")
    verdict(5, ok, "; ".join(parts))
    assert ok


def test_criterion6_envelope(verdict, systems8):
    parts, ok = [], True
    for name, (s, c) in systems8.items():
        if not s.has_envelope:
            assert np.isnan(s.U) and np.isnan(s.Utilde)
            parts.append(f"{name} n/a (no envelope)")
            continue
        rep = check_envelope(c, s.U, s.Utilde)
        ok &= rep.passed
        parts.append(f"{name} {rep.worst_violation:.3g}")
    verdict(6, ok, "; ".join(parts) + " (tol 1e-10)")
    assert ok


def test_criterion7_knot_interpolation(verdict, systems8):
    worst = max(check_interpolation(c, s.data).worst_violation for s, c in systems8.values())
    rng = np.random.default_rng(7)
    for code in rng.choice(2**6, 8, replace=False):
        sig = Signature(tuple((int(code) >> k) & 1 for k in range(6)))
        s = build_system(EXAMPLE2.data, sig, EXAMPLE2.fam)
        worst = max(worst, check_interpolation(refine_orbit(s, 6), s.data).worst_violation)
    ok = verdict(7, worst <= 1e-9, f"worst knot error {worst:.2e} over 7 examples and 8 signatures")
    assert ok


def test_criterion8_cross_oracle(verdict):
    rng = np.random.default_rng(8)
    names = list(PRESETS)
    per = -(-1000 // len(names))
    worst, count = 0.0, 0
    for name in names:
        s = PRESETS[name].system()
        addr = rng.integers(0, s.n, (per, 10))
        start = rng.integers(0, s.n + 1, per)
        pts = orbit_points(s, addr, start)
        kw = {} if s.has_bounds else {"depth": 64}
        f1, f2 = evaluate_many(s, pts[:, 0], 1e-9, **kw)
        worst = max(worst, float(np.max(np.maximum(np.abs(f1 - pts[:, 1]), np.abs(f2 - pts[:, 2])))))
        count += per
    ok = verdict(8, worst <= 1e-6 and count >= 1000, f"worst |evaluate - orbit| {worst:.2e} over {count} points")
    assert ok
