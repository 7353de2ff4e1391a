"""Shared fixtures and hypothesis strategies."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from zipfif.model import ExtendedDataSet, FactorFunction, ScalingFamily, Signature
from zipfif.presets import EXAMPLE1, EXAMPLE1_ZFIF, PRESETS, SHAPE_PRESETS
from zipfif.render import apply_operator
from zipfif.system import build_system

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")

# systems with an envelope, in the order used by the acceptance criteria
ENVELOPE_PRESETS = (EXAMPLE1_ZFIF,) + SHAPE_PRESETS
ALL_PRESETS = tuple(PRESETS.values())

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@st.composite
def data_sets(draw, n_min=2, n_max=6):
    n = draw(st.integers(n_min, n_max))
    steps = draw(st.lists(st.floats(0.2, 2.0), min_size=n, max_size=n))
    x0 = draw(st.floats(-3, 3))
    knots = x0 + np.concatenate([[0.0], np.cumsum(steps)])
    y = draw(st.lists(finite, min_size=n + 1, max_size=n + 1))
    z = draw(st.lists(finite, min_size=n + 1, max_size=n + 1))
    return ExtendedDataSet(tuple(knots), tuple(y), tuple(z))


@st.composite
def families(draw, data: ExtendedDataSet, affine: bool = True, budget: float = 0.9):
    """Factor families whose per-interval norm sums stay at or below ``budget``."""
    n = data.n
    cols = {k: [] for k in ("p", "q", "pt", "qt")}
    for i in range(n):
        lo, hi = data.subinterval(i)
        for a, b in (("p", "pt"), ("q", "qt")):
            fs = []
            for _ in range(2):
                c0 = draw(st.floats(-1, 1))
                c1 = draw(st.floats(-1, 1)) if affine and draw(st.booleans()) else 0.0
                fs.append(FactorFunction(c0, c1))
            total = sum(f.sup_norm(lo, hi) for f in fs)
            scale = budget / total if total > budget else 1.0
            cols[a].append(FactorFunction(fs[0].c0 * scale, fs[0].c1 * scale))
            cols[b].append(FactorFunction(fs[1].c0 * scale, fs[1].c1 * scale))
    return ScalingFamily(**{k: tuple(v) for k, v in cols.items()})


@st.composite
def signatures(draw, n: int):
    return Signature(tuple(draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))))


@st.composite
def systems(draw, affine: bool = True):
    data = draw(data_sets())
    sig = draw(signatures(data.n))
    fam = draw(families(data, affine=affine))
    return build_system(data, sig, fam)


@pytest.fixture(scope="session")
def ex1_system():
    return EXAMPLE1.system()


@pytest.fixture(scope="session")
def preset_systems():
    return {p.name: p.system() for p in ALL_PRESETS}


def operator_distance(sys, rng, grid):
    """``(D(Tg, Th), D(g, h))`` for two random piecewise-linear pairs matching the end data."""
    d = sys.data
    x0, xn = d.interval

    def random_pl():
        gx = np.concatenate([[x0], np.sort(rng.uniform(x0, xn, 30)), [xn]])
        g1 = rng.uniform(-5, 5, 32)
        g2 = rng.uniform(-5, 5, 32)
        g1[[0, -1]] = d.ys[[0, -1]]
        g2[[0, -1]] = d.zs[[0, -1]]
        return gx, g1, g2

    g, h = random_pl(), random_pl()
    D = np.max(
        np.abs(np.interp(grid, *g[:2]) - np.interp(grid, *h[:2]))
        + np.abs(np.interp(grid, g[0], g[2]) - np.interp(grid, h[0], h[2]))
    )
    # the sup over I is attained on the union of both breakpoint sets
    both = np.union1d(g[0], h[0])
    D = max(
        D,
        np.max(
            np.abs(np.interp(both, *g[:2]) - np.interp(both, *h[:2]))
            + np.abs(np.interp(both, g[0], g[2]) - np.interp(both, h[0], h[2]))
        ),
    )
    t1g, t2g = apply_operator(sys, *g, grid)
    t1h, t2h = apply_operator(sys, *h, grid)
    return np.max(np.abs(t1g - t1h) + np.abs(t2g - t2h)), D
