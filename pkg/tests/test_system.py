import math

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from zipfif.errors import ContractionViolation, DegenerateDenominator, XOutOfDomain
from zipfif.model import ExtendedDataSet, ScalingFamily, Signature
from zipfif.presets import ALTERNATING, EXAMPLE1, EXAMPLE2, KNOTS
from zipfif.system import (
    apply_map,
    build_interval_maps,
    build_system,
    compute_contraction,
    compute_envelope,
    endpoint_indices,
    eval_F,
    eval_offsets,
    fixed_point_bounds,
    offset_polynomials,
    rho_theta,
)

from .conftest import systems

# three intervals; p~_3 = 0.9 couples y into z, but the U~ formula maximises
# each interval separately and returns U~ = 0
_COUPLED = build_system(
    ExtendedDataSet((0, 1, 2, 3), (0, 1, 0, 0), (0, 0, 0, 0)),
    Signature((0, 0, 0)),
    ScalingFamily.constant((0, 0, 0), (0, 0, 0), (0, 0, 0.9), (0, 0, 0)),
)


def _random_in_E(sys, rng, size):
    x0, xn = sys.data.interval
    x = rng.uniform(x0, xn, size)
    y = rng.uniform(-sys.U, sys.U, size)
    z = rng.uniform(-sys.Utilde, sys.Utilde, size)
    return x, y, z


def test_interval_maps_first_two_example1():
    a, b = build_interval_maps(EXAMPLE1.data, ALTERNATING)
    # L_1 keeps orientation, L_2 reverses it
    assert a[0] == pytest.approx(1 / 6, abs=1e-15)
    assert b[0] == pytest.approx(-5 / 6, abs=1e-15)
    assert a[1] == pytest.approx(-1 / 6, abs=1e-15)
    assert b[1] == pytest.approx(-1 / 2, abs=1e-15)
    assert a[0] * -1 + b[0] == pytest.approx(-1)
    assert a[0] * 1 + b[0] == pytest.approx(-2 / 3)
    assert a[1] * -1 + b[1] == pytest.approx(-1 / 3)
    assert a[1] * 1 + b[1] == pytest.approx(-2 / 3)


def test_example1_A(ex1_system):
    assert ex1_system.A == pytest.approx(1 / 6, abs=1e-15)
    assert np.allclose(np.abs(ex1_system.a), 1 / 6)


def test_example1_needs_relaxed_flag():
    with pytest.raises(ContractionViolation):
        build_system(EXAMPLE1.data, EXAMPLE1.sig, EXAMPLE1.fam)


def test_example1_has_no_envelope(ex1_system):
    # the denominator (1-||p||)(1-||q~||) - ||p~|| ||q|| is not positive on some intervals
    nrm = ex1_system.norms
    den = (1 - nrm[0]) * (1 - nrm[3]) - nrm[2] * nrm[1]
    assert np.any(den <= 0)
    assert not ex1_system.has_envelope
    assert math.isnan(ex1_system.U) and math.isnan(ex1_system.kappa)


@given(systems())
def test_endpoints_hit_prescribed_knots(sys):
    x = sys.data.xs
    lo, hi = endpoint_indices(sys.sig)
    assert np.all(np.abs(sys.a * x[0] + sys.b - x[lo]) <= 1e-12 * (1 + np.abs(x).max()))
    assert np.all(np.abs(sys.a * x[-1] + sys.b - x[hi]) <= 1e-12 * (1 + np.abs(x).max()))
    assert np.all((sys.a < 0) == np.array(sys.sig.eps, dtype=bool))


@given(systems())
def test_system_constants_in_range(sys):
    assert 0 < sys.A < 1
    assert 0 <= sys.Sbar < 1
    assert sys.U >= 0 and sys.Utilde >= 0
    assert 0 < sys.kappa < 1
    assert sys.theta > 0


def test_offsets_at_ends():
    sys = EXAMPLE2.system()
    d = sys.data
    for i in range(sys.n):
        lo, hi = sys.lo[i], sys.hi[i]
        p, q = sys.fam.p[i].c0, sys.fam.q[i].c0
        r0, _ = eval_offsets(sys, i, d.xs[0])
        rn, _ = eval_offsets(sys, i, d.xs[-1])
        assert r0 == pytest.approx(d.ys[lo] - p * d.ys[0] - q * d.zs[0], abs=1e-13)
        assert rn == pytest.approx(d.ys[hi] - p * d.ys[-1] - q * d.zs[-1], abs=1e-13)


@given(systems(), st.floats(0, 1))
def test_offsets_match_polynomial_form(sys, t):
    x0, xn = sys.data.interval
    x = x0 + t * (xn - x0)
    for i in range(sys.n):
        r, rt = offset_polynomials(sys.data, sys.sig, sys.fam, i)
        assert r.degree() <= 2 and rt.degree() <= 2
        ev = eval_offsets(sys, i, x)
        assert ev[0] == pytest.approx(r(x), abs=1e-10)
        assert ev[1] == pytest.approx(rt(x), abs=1e-10)


@given(systems())
def test_offset_norms_match_dense_sampling(sys):
    xs = np.linspace(*sys.data.interval, 20001)
    for i in range(sys.n):
        r, rt = eval_offsets(sys, i, xs)
        assert np.abs(r).max() <= sys.r_norms[0, i] + 1e-12
        assert np.abs(r).max() >= sys.r_norms[0, i] - 1e-6 * (1 + sys.r_norms[0, i])
        assert np.abs(rt).max() <= sys.r_norms[1, i] + 1e-12


def test_zero_data_gives_zero_offsets_and_linear_F():
    data = ExtendedDataSet(KNOTS, (0,) * 7, (0,) * 7)
    fam = ScalingFamily(
        p=((0.3, 0.1),) * 6, q=((0.2, -0.1),) * 6, pt=((-0.4, 0.05),) * 6, qt=((0.5, 0.0),) * 6
    )
    sys = build_system(data, ALTERNATING, fam)
    x = np.linspace(-1, 1, 11)
    for i in range(6):
        r, rt = eval_offsets(sys, i, x)
        assert np.all(r == 0) and np.all(rt == 0)
        f1, f2 = eval_F(sys, i, x, 1.5, -2.0)
        lx = sys.a[i] * x + sys.b[i]
        p, q, pt, qt = (f(lx) for f in (fam.p[i], fam.q[i], fam.pt[i], fam.qt[i]))
        assert np.allclose(f1, p * 1.5 + q * -2.0, atol=1e-14)
        assert np.allclose(f2, pt * 1.5 + qt * -2.0, atol=1e-14)
    assert sys.U == 0 and sys.Utilde == 0


@given(systems())
def test_join_up(sys):
    d = sys.data
    for i in range(sys.n):
        lo, hi = sys.lo[i], sys.hi[i]
        f = eval_F(sys, i, d.xs[0], d.ys[0], d.zs[0])
        assert abs(f[0] - d.ys[lo]) < 1e-10 and abs(f[1] - d.zs[lo]) < 1e-10
        f = eval_F(sys, i, d.xs[-1], d.ys[-1], d.zs[-1])
        assert abs(f[0] - d.ys[hi]) < 1e-10 and abs(f[1] - d.zs[hi]) < 1e-10


def test_domain_checks():
    sys = EXAMPLE2.system()
    with pytest.raises(XOutOfDomain):
        eval_offsets(sys, 0, 1.5)
    with pytest.raises(XOutOfDomain):
        eval_F(sys, 0, -1.01, 0.0, 0.0)


def test_envelope_small_cases():
    n = 4
    norms = np.array([[0.5] * n, [0.0] * n, [0.0] * n, [0.0] * n])
    r = np.array([[1.0] * n, [0.0] * n])
    assert compute_envelope(norms, r) == pytest.approx((2.0, 0.0))
    r = np.array([[1.0, 3.0, 2.0, 0.5], [0.2, 0.1, 0.7, 0.0]])
    assert compute_envelope(np.zeros((4, n)), r) == pytest.approx((3.0, 0.7))


def test_envelope_degenerate_denominator():
    norms = np.array([[0.9], [0.5], [0.5], [0.9]])
    with pytest.raises(DegenerateDenominator):
        compute_envelope(norms, np.ones((2, 1)))


def test_theta_for_constant_factors():
    sys = EXAMPLE2.system()
    lip = sys.lipschitz
    assert lip["p"] == lip["q"] == lip["pt"] == lip["qt"] == 0
    assert sys.theta == pytest.approx(0.5 * (1 - sys.A) / (lip["r"] + lip["rt"]))
    assert sys.kappa == pytest.approx(max(sys.A + sys.theta * (lip["r"] + lip["rt"]), sys.Sbar))


def test_theta_defaults_to_one_when_bound_vacuous():
    zero = {k: 0.0 for k in ("p", "q", "pt", "qt", "r", "rt")}
    theta, kappa = compute_contraction(0.25, 0.5, 1.0, 1.0, zero)
    assert theta == 1.0 and kappa == 0.5


def test_example2_constants():
    sys = EXAMPLE2.system()
    # largest per-interval norm sum is ||p_1|| + ||p~_1|| = 0.5 + 0.36
    assert sys.Sbar == pytest.approx(0.86)
    assert sys.A == pytest.approx(1 / 6)


@given(systems())
@example(_COUPLED)
def test_envelope_containment(sys):
    rng = np.random.default_rng(0)
    x, y, z = _random_in_E(sys, rng, 10**4)
    for i in range(sys.n):
        f1, f2 = eval_F(sys, i, x, y, z)
        assert np.all(np.abs(f1) <= sys.U + 1e-10)
        assert np.all(np.abs(f2) <= sys.Utilde + 1e-10)


@given(systems())
def test_maps_contract_in_rho_theta(sys):
    rng = np.random.default_rng(1)
    a = np.column_stack(_random_in_E(sys, rng, 10**4))
    b = np.column_stack(_random_in_E(sys, rng, 10**4))
    before = rho_theta(a, b, sys.theta)
    for i in range(sys.n):
        wa = np.column_stack(apply_map(sys, i, *a.T))
        wb = np.column_stack(apply_map(sys, i, *b.T))
        assert np.all(rho_theta(wa, wb, sys.theta) <= sys.kappa * before + 1e-10)


@given(systems(), st.data())
def test_signature_flip_swaps_endpoint_images(sys, draw):
    i = draw.draw(st.integers(0, sys.n - 1))
    a, b = build_interval_maps(sys.data, sys.sig)
    a2, b2 = build_interval_maps(sys.data, sys.sig.flipped(i))
    x0, xn = sys.data.interval
    assert a2[i] == pytest.approx(-a[i], rel=1e-12)
    assert a2[i] * x0 + b2[i] == pytest.approx(a[i] * xn + b[i], abs=1e-12)
    assert a2[i] * xn + b2[i] == pytest.approx(a[i] * x0 + b[i], abs=1e-12)
    others = np.arange(sys.n) != i
    assert np.array_equal(a2[others], a[others]) and np.array_equal(b2[others], b[others])
    assert Signature(sys.sig.eps).flipped(i).flipped(i) == sys.sig


def test_fixed_point_bounds_small_cases():
    norms = np.array([[0.5], [0.0], [0.0], [0.0]])
    B1, B2 = fixed_point_bounds(norms, np.array([[1.0], [0.0]]), 0.5)
    assert B1 == pytest.approx(2.0) and B2 == 0.0
    B1, B2 = fixed_point_bounds(_COUPLED.norms, _COUPLED.r_norms, _COUPLED.Sbar)
    assert B1 == pytest.approx(1.0) and B2 == pytest.approx(0.9)


def test_fixed_point_bounds_without_invariant_rectangle():
    # entrywise maximum of the two factor matrices has spectral radius 1
    norms = np.array([[0.5, 0.4], [0.5, 0.4], [0.4, 0.5], [0.4, 0.5]])
    r = np.array([[1.0, 1.0], [1.0, 1.0]])
    B1, B2 = fixed_point_bounds(norms, r, 0.9)
    assert B1 == pytest.approx(20.0) and B2 == pytest.approx(20.0)


@given(systems())
@example(_COUPLED)
def test_fixed_point_bounds_hold(sys):
    B1, B2 = sys.f_bounds
    assert sys.has_bounds
    p, q, pt, qt = sys.norms
    r, rt = sys.r_norms
    # either the rectangle is invariant under the norm recursion or the l1 bound applies
    rect = np.all(p * B1 + q * B2 + r <= B1 * (1 + 1e-9) + 1e-12) and np.all(
        pt * B1 + qt * B2 + rt <= B2 * (1 + 1e-9) + 1e-12
    )
    l1 = (r + rt).max() / (1 - sys.Sbar)
    assert rect or (B1 <= l1 * (1 + 1e-12) and B2 <= l1 * (1 + 1e-12))
    from zipfif.render import refine_orbit

    c = refine_orbit(sys, 4)
    assert np.all(np.abs(c.f1) <= B1 + 1e-10) and np.all(np.abs(c.f2) <= B2 + 1e-10)
