import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multixfer.errors import DomainError
from multixfer.functions import GridFunction, as_modes
from multixfer.norms import distribution, kolmogorov_norm, lp_norm, weak_norm
from multixfer.spaces import TorusGrid, kolmogorov_constant
from multixfer.weights import constant_weight, random_step_weight, step_weight


def test_lp_of_constant_and_weight():
    g = TorusGrid(1, 16)
    f = GridFunction(g, np.full(16, 3.0))
    assert lp_norm(f, 2) == pytest.approx(3.0)
    assert lp_norm(f, 1, constant_weight(4.0)) == pytest.approx(12.0)


def test_lp_of_trig_polynomial_exact():
    # |cos 2 pi x|^2 integrates to 1/2 exactly on any resolving grid
    t = as_modes([0.5, 0, 0.5])
    assert lp_norm(t, 2) == pytest.approx(np.sqrt(0.5), rel=1e-14)


def test_quasi_norm_exponent_below_one():
    g = TorusGrid(1, 4)
    f = GridFunction(g, [1.0, 0, 0, 0])
    assert lp_norm(f, 0.5) == pytest.approx(0.25**2)


def test_distribution_function():
    g = TorusGrid(1, 8)
    f = GridFunction(g, [3, 1, 1, 2, 0, 0, 3, 1])
    vals, mass = distribution(f)
    assert vals.tolist() == [3, 2, 1, 0]
    assert mass.tolist() == [0.25, 0.375, 0.75, 1.0]


def _weak_oracle(a, m, p):
    # sup over t of t * m(|f| > t), scanning t just below each value
    best = 0.0
    for v in np.unique(a):
        if v <= 0:
            continue
        for t in (v * (1 - 1e-12), v):
            best = max(best, t * m[a > t].sum() ** (1 / p))
    return best


def test_weak_norm_matches_threshold_scan(rng):
    g = TorusGrid(1, 16)
    for _ in range(20):
        a = np.round(rng.exponential(size=16), 1)
        w = random_step_weight(rng, 1, 4)
        m = w.sample(g) * g.cell
        for p in (0.5, 1.0, 2.0):
            assert weak_norm(GridFunction(g, a), p, w) == pytest.approx(_weak_oracle(a, m, p), rel=1e-9)


def test_weak_below_strong(rng):
    g = TorusGrid(1, 32)
    for _ in range(20):
        f = GridFunction(g, rng.standard_normal(32))
        for p in (0.5, 1.0, 3.0):
            assert weak_norm(f, p) <= lp_norm(f, p) * (1 + 1e-12)


def _kolmogorov_oracle(a, m, p, q):
    # exhaustive supremum over all nonempty subsets of the grid
    best = 0.0
    n = len(a)
    for mask in itertools.product([0, 1], repeat=n):
        sel = np.array(mask, dtype=bool)
        if not sel.any():
            continue
        wE = m[sel].sum()
        best = max(best, (np.sum(a[sel] ** q * m[sel])) ** (1 / q) * wE ** (1 / p - 1 / q))
    return best


def test_kolmogorov_norm_equals_exhaustive_supremum(rng):
    g = TorusGrid(1, 8)
    for _ in range(15):
        a = rng.exponential(size=8) * (rng.random(8) < 0.8)
        w = random_step_weight(rng, 1, 8)
        m = w.sample(g) * g.cell
        for p, q in ((1, 0.5), (2, 1), (2 / 3, 1 / 3)):
            got = kolmogorov_norm(GridFunction(g, a), p, q, w)
            assert got == pytest.approx(_kolmogorov_oracle(a, m, p, q), rel=1e-10)


def test_kolmogorov_rejects_q_at_least_p():
    g = TorusGrid(1, 4)
    with pytest.raises(DomainError):
        kolmogorov_norm(GridFunction(g, np.ones(4)), 1, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 0.5), (2, 1), (2 / 3, 1 / 3), (3, 2.5)]))
def test_kolmogorov_sandwich(seed, pq):
    p, q = pq
    r = np.random.default_rng(seed)
    g = TorusGrid(1, 32)
    f = GridFunction(g, np.repeat(r.exponential(size=8) * (r.random(8) < 0.8), 4))
    w = random_step_weight(r, 1, 4)
    lo = weak_norm(f, p, w)
    mid = kolmogorov_norm(f, p, q, w)
    assert lo <= mid * (1 + 1e-12)
    assert mid <= kolmogorov_constant(p, q) * lo * (1 + 1e-12)


def test_zero_function_norms():
    g = TorusGrid(1, 8)
    z = GridFunction(g, np.zeros(8))
    assert lp_norm(z, 1) == 0 and weak_norm(z, 1) == 0 and kolmogorov_norm(z, 1, 0.5) == 0


def test_weight_dimension_mismatch():
    g = TorusGrid(1, 8)
    with pytest.raises(DomainError):
        lp_norm(GridFunction(g, np.ones(8)), 2, step_weight([[1.0, 2.0], [3.0, 4.0]]))
