import numpy as np
import pytest

from multixfer.errors import DomainError, HypothesisViolation
from multixfer.estimation import (SearchConfig, deperiodization_check, deperiodization_factor,
                                  estimate_norm, khintchine_constants, line_ratio, mz_test, ratio,
                                  support_radius, transference_report)
from multixfer.functions import GridFunction, TrigPolynomial, random_trig_polynomial
from multixfer.spaces import FrequencyBox, LineGrid, make_exponents
from multixfer.symbols import (LatticeSymbol, bump_symbol, constant_symbol, dilate,
                               half_space_symbol, modulation_symbol, restrict_lattice,
                               separable_symbol)

SMALL = SearchConfig(restarts=3, steps=40, freq_box=FrequencyBox(1, 3), seed=7)
E22 = make_exponents([2, 2])


def power_iteration_norm(diag, rng, iters=200):
    """L2 operator norm of a diagonal multiplier by power iteration on A*A."""
    x = rng.standard_normal(diag.size) + 1j * rng.standard_normal(diag.size)
    for _ in range(iters):
        x = np.conj(diag) * (diag * x)
        x /= np.linalg.norm(x)
    return float(np.linalg.norm(diag * x))


# -- norm estimation ------------------------------------------------------------

@pytest.mark.parametrize("m", [constant_symbol(), modulation_symbol([0.3, -0.7])])
def test_isometric_symbols_have_unit_norm(m):
    est = estimate_norm(m, E22, cfg=SMALL)
    assert 0.999 <= est.value <= 1 + 1e-9


def test_separable_symbol_against_power_iteration(rng):
    a = lambda s: 1.0 / (1.0 + (s[..., 0] - 1.0) ** 2)
    b = lambda s: np.cos(0.4 * s[..., 0])
    m = separable_symbol([a, b], [1, 1])
    box = SMALL.freq_box
    k = np.arange(-3, 4, dtype=float)[:, None]
    oracle = power_iteration_norm(a(k), rng) * power_iteration_norm(b(k), rng)
    est = estimate_norm(m, E22, cfg=SearchConfig(restarts=8, steps=100, freq_box=box, seed=1))
    assert est.value == pytest.approx(oracle, rel=0.02)
    assert est.value <= oracle * (1 + 1e-9)


def test_scaling_homogeneity():
    m = modulation_symbol([0.25, 0.5])
    base = estimate_norm(m, E22, cfg=SMALL).value
    lat = restrict_lattice(m, SMALL.freq_box).scaled(2.0)
    assert estimate_norm(lat, E22, cfg=SMALL).value == pytest.approx(2 * base, rel=1e-12)


def test_more_budget_never_lowers_estimate():
    m = separable_symbol([lambda s: np.exp(-s[..., 0] ** 2 / 4), lambda s: np.cos(s[..., 0])], [1, 1])
    base = estimate_norm(m, E22, cfg=SMALL).value
    more_steps = SearchConfig(restarts=3, steps=80, freq_box=SMALL.freq_box, seed=7)
    more_restarts = SearchConfig(restarts=5, steps=40, freq_box=SMALL.freq_box, seed=7)
    assert estimate_norm(m, E22, cfg=more_steps).value >= base
    assert estimate_norm(m, E22, cfg=more_restarts).value >= base


def test_trace_is_monotone_and_jobs_invariant():
    m = bump_symbol(2.0)
    est = estimate_norm(m, E22, cfg=SMALL)
    vals = [v for _, v in est.trace]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    par = estimate_norm(m, E22, cfg=SearchConfig(restarts=3, steps=40, freq_box=SMALL.freq_box,
                                                 seed=7, jobs=3))
    assert par.value == est.value


def test_witness_recomputes_estimate():
    m = bump_symbol(2.0)
    est = estimate_norm(m, E22, cfg=SMALL)
    lat = [restrict_lattice(m, SMALL.freq_box)]
    again = ratio(lat, est.witnesses, E22, None, [None, None], "strong", SMALL.grid(2))
    assert abs(again - est.value) <= 1e-10


def test_weak_ratio_below_strong_at_witness():
    m = bump_symbol(2.0)
    est = estimate_norm(m, E22, target="weak", cfg=SMALL)
    lat = [restrict_lattice(m, SMALL.freq_box)]
    grid = SMALL.grid(2)
    strong = ratio(lat, est.witnesses, E22, None, [None, None], "strong", grid)
    # ||f||_{1,inf} <= ||f||_1
    assert est.value <= strong * (1 + 1e-12)


def test_estimate_validation():
    with pytest.raises(DomainError):
        estimate_norm(constant_symbol(), make_exponents([2, 2, 2]), cfg=SMALL)
    with pytest.raises(DomainError):
        estimate_norm(constant_symbol(), E22, target="medium", cfg=SMALL)
    with pytest.raises(DomainError):
        SearchConfig(restarts=0)


def test_default_grid_resolves_outputs():
    cfg = SearchConfig(freq_box=FrequencyBox(1, 40))
    assert cfg.grid(2).n_per_axis > 4 * 40
    assert SearchConfig(freq_box=FrequencyBox(2, 2)).grid(2).n_per_axis == 64


# -- Marcinkiewicz-Zygmund ---------------------------------------------------

def test_khintchine_constants_single_term():
    # with one term the Rademacher average is exact
    A, B = khintchine_constants(np.array([[1.0, -2.0, 3.0]]), 1.0)
    assert A == pytest.approx(1.0) and B == pytest.approx(1.0)


def test_khintchine_two_terms_closed_form():
    # E|r1 + r2| = 1 and (a1^2 + a2^2)^{1/2} = sqrt 2 for a = (1, 1)
    A, B = khintchine_constants(np.array([[1.0], [1.0]]), 1.0)
    assert A == pytest.approx(1 / np.sqrt(2)) and B == pytest.approx(1 / np.sqrt(2))


def test_mz_single_terms_reduce_to_bound(rng):
    m = restrict_lattice(constant_symbol(), FrequencyBox(1, 3))
    f, g = (random_trig_polynomial(rng, 1, 3) for _ in range(2))
    rep = mz_test([m], [f], [g], make_exponents([2, 2]), 1.0)
    assert rep["constant_c"] == pytest.approx(1.0)
    assert rep["ratio"] <= 1 + 1e-12 and rep["pass"]


def test_mz_empty_sequences():
    m = restrict_lattice(constant_symbol(), FrequencyBox(1, 2))
    rep = mz_test([m], [], [], E22, 1.0)
    assert rep["left"] == 0 and rep["right"] == 0 and rep["pass"]


def test_mz_random_instances(rng):
    exps = make_exponents([2, 2])
    for _ in range(10):
        K = 2
        ops = [LatticeSymbol(rng.standard_normal((2 * K + 1,) * 2), 1, 2) for _ in range(3)]
        fs = [random_trig_polynomial(rng, 1, K) for _ in range(3)]
        gs = [random_trig_polynomial(rng, 1, K) for _ in range(3)]
        # L2 x L2 -> L1 bound of a lattice multiplier: sup|m| times the box size
        bound = max(o.sup for o in ops) * (2 * K + 1)
        assert mz_test(ops, fs, gs, exps, bound)["pass"]


def test_mz_rejects_exponents_below_target():
    m = restrict_lattice(constant_symbol(), FrequencyBox(1, 2))
    # a consistent tuple always has p <= p_l, so force an inconsistent one
    with pytest.raises(DomainError):
        mz_test([m], [], [], make_exponents([2, 2, 2]), 1.0)
    exps = make_exponents([2, 2])
    object.__setattr__(exps, "p_list", (0.5, 2.0))
    with pytest.raises(HypothesisViolation):
        mz_test([m], [], [], exps, 1.0)


# -- de-periodization ----------------------------------------------------------

def test_deperiodization_factor_arithmetic():
    assert deperiodization_factor(1, 7, 1, 1) == pytest.approx(8 / 7, rel=1e-15)
    assert deperiodization_factor(1, 1, 2, 2) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        deperiodization_factor(0, 1, 1, 1)


def _bump_kernel(width=0.25):
    kg = LineGrid(2, 0.5, 32)
    a, b = kg.coords()
    inside = (np.abs(a) < width) & (np.abs(b) < width)
    vals = np.where(inside, np.exp(-1 / np.maximum(1e-300, 1 - (a / width) ** 2))
                    * np.exp(-1 / np.maximum(1e-300, 1 - (b / width) ** 2)), 0.0)
    return GridFunction(kg, vals)


def test_deperiodization_constant_inputs_give_kernel_mass():
    K = _bump_kernel()
    one = TrigPolynomial(np.ones(1))
    rep = deperiodization_check(K, one, one, r=1.0, samples=16)
    assert rep["max_identity_error"] <= 1e-10
    assert rep["factors_nonincreasing"]


def test_deperiodization_random_inputs(rng):
    K = _bump_kernel()
    g1, g2 = (random_trig_polynomial(rng, 1, 4, modes=8) for _ in range(2))
    rep = deperiodization_check(K, g1, g2, r=1.0, samples=64, seed=3, periodic_norm=1.5)
    assert rep["max_identity_error"] <= 1e-6
    assert rep["factors"] == pytest.approx([(5 / 4), (9 / 8), (17 / 16)])
    assert rep["transferred_constants"][0] == pytest.approx(1.5 * 5 / 4)


def test_deperiodization_rejects_wide_kernel():
    kg = LineGrid(2, 2.0, 32)
    K = GridFunction(kg, np.ones(kg.shape))
    one = TrigPolynomial(np.ones(1))
    with pytest.raises(DomainError):
        deperiodization_check(K, one, one, r=1.0)


# -- transference ---------------------------------------------------------------

def test_support_radius_from_description():
    assert support_radius(bump_symbol(3.0)) == 3.0
    assert support_radius(dilate(bump_symbol(3.0), 2.0)) == 1.5
    assert support_radius(constant_symbol()) == np.inf


def test_line_ratio_of_constant_witness_is_one():
    one = TrigPolynomial(np.ones(1))
    rep = line_ratio([constant_symbol()], [one, one], E22, None, [None, None], "strong", 4.0)
    assert rep["ratio"] == pytest.approx(1.0, rel=1e-12)


def test_transference_identity_family():
    rep = transference_report([constant_symbol()], E22, cfg=SMALL, s_schedule=(4.0,))
    assert rep["N_T"] == pytest.approx(1.0, abs=1e-3)
    assert rep["rho"] <= 1 + 1e-6 and rep["pass"]
    assert rep["constant_c"] == 1.0


def test_transference_weak_constant():
    rep = transference_report([constant_symbol()], E22, target="weak", cfg=SMALL, s_schedule=(4.0,))
    from multixfer.spaces import weak_constant
    assert rep["constant_c"] == pytest.approx(weak_constant(1.0) * 2.0)


def test_transference_rejects_unnormalized_member():
    with pytest.raises(DomainError, match="not normalized at lattice point"):
        transference_report([half_space_symbol()], E22, cfg=SMALL)
