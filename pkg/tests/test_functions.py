import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multixfer.errors import AliasingError, DomainError
from multixfer.functions import (GridFunction, TrigPolynomial, as_modes, fourier_coefficients,
                                 fourier_transform_at, inverse_line_fourier, line_fourier,
                                 modulate, periodize, random_trig_polynomial, synthesize,
                                 translate)
from multixfer.spaces import FrequencyBox, LineGrid, TorusGrid


def test_from_modes_and_coefficient():
    t = TrigPolynomial.from_modes({3: 2.0, -1: 1j}, dim=1)
    assert t.max_freq == 3
    assert t.coefficient(3) == 2.0 and t.coefficient(-1) == 1j and t.coefficient(0) == 0
    assert t.to_modes() == {3: 2.0, -1: 1j}


def test_synthesize_matches_direct_evaluation(rng):
    t = random_trig_polynomial(rng, 1, 5)
    g = TorusGrid(1, 32)
    x = g.axis()
    # direct exponential sum as oracle
    k = np.arange(-5, 6)
    direct = np.exp(2j * np.pi * np.outer(x, k)) @ t.coeffs
    assert np.allclose(synthesize(t, g).values, direct, atol=1e-12)
    assert np.allclose(t(x), direct, atol=1e-12)


def test_synthesize_2d_matches_call(rng):
    t = random_trig_polynomial(rng, 2, 3)
    g = TorusGrid(2, 16)
    pts = np.stack([c.ravel() for c in g.coords()], axis=1)
    assert np.allclose(synthesize(t, g).values.ravel(), t(pts), atol=1e-12)


def test_coefficient_roundtrip(rng):
    t = random_trig_polynomial(rng, 2, 4)
    g = TorusGrid(2, 16)
    back = fourier_coefficients(synthesize(t, g), FrequencyBox(2, 4))
    assert np.allclose(back.coeffs, t.coeffs, atol=1e-13)


def test_aliasing_is_rejected(rng):
    t = random_trig_polynomial(rng, 1, 4)
    with pytest.raises(AliasingError):
        synthesize(t, TorusGrid(1, 8))
    with pytest.raises(AliasingError):
        fourier_coefficients(synthesize(t, TorusGrid(1, 16)), FrequencyBox(1, 8))


def test_arithmetic(rng):
    a = random_trig_polynomial(rng, 1, 2)
    b = random_trig_polynomial(rng, 1, 4)
    x = np.linspace(0, 1, 7)
    assert np.allclose((a + b)(x), a(x) + b(x))
    assert np.allclose((a - b)(x), a(x) - b(x))
    assert np.allclose((a * 3)(x), 3 * a(x))
    assert np.allclose((-a)(x), -a(x))


def test_coefficients_are_read_only(rng):
    t = random_trig_polynomial(rng, 1, 2)
    with pytest.raises(ValueError):
        t.coeffs[0] = 1


def test_translate_polynomial_real_shift(rng):
    t = random_trig_polynomial(rng, 1, 4)
    x = np.linspace(0, 1, 11)
    assert np.allclose(translate(t, 0.3173)(x), t(x + 0.3173), atol=1e-12)


def test_translate_torus_grid_matches_polynomial(rng):
    t = random_trig_polynomial(rng, 2, 3)
    g = TorusGrid(2, 16)
    y = (3 / 16, 5 / 16)
    lhs = translate(synthesize(t, g), y).values
    rhs = synthesize(translate(t, y), g).values
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_translate_grid_rejects_off_lattice(rng):
    g = TorusGrid(1, 16)
    with pytest.raises(DomainError):
        translate(synthesize(random_trig_polynomial(rng, 1, 2), g), 0.01)


def test_translate_line_zero_fill():
    g = LineGrid(1, 2.0, 16)
    f = GridFunction(g, np.arange(16.0))
    out = translate(f, 0.5).values.real  # two steps to the left
    assert list(out[:14]) == list(np.arange(2.0, 16.0)) and list(out[14:]) == [0, 0]


def test_modulate_shifts_coefficients(rng):
    t = as_modes([0, 0, 1, 0, 0])  # constant 1 with K = 2
    g = TorusGrid(1, 16)
    m = modulate(synthesize(t, g), 1)
    c = fourier_coefficients(m, FrequencyBox(1, 2))
    assert np.allclose(c.coeffs, [0, 1, 0, 0, 0], atol=1e-14)


def test_periodize_sums_translates():
    g = LineGrid(1, 2.0, 32)  # spacing 1/8, covers [-2, 2)
    x = g.axis()
    f = GridFunction(g, np.exp(-x**2))
    per = periodize(f)
    t = per.grid.axis()
    oracle = sum(np.exp(-(t + k) ** 2) * ((t + k >= -2) & (t + k < 2)) for k in range(-3, 4))
    assert np.allclose(per.values.real, oracle, atol=1e-14)


def test_line_fourier_gaussian():
    # e^{-pi x^2} is its own transform
    g = LineGrid(1, 8.0, 256)
    x = g.axis()
    F = line_fourier(GridFunction(g, np.exp(-np.pi * x**2)))
    xi = F.grid.axis()
    assert np.allclose(F.values, np.exp(-np.pi * xi**2), atol=1e-12)


def test_line_fourier_shift_sign_convention():
    g = LineGrid(1, 8.0, 256)
    x = g.axis()
    F = line_fourier(GridFunction(g, np.exp(-np.pi * (x - 1) ** 2)))
    xi = F.grid.axis()
    assert np.allclose(F.values, np.exp(-2j * np.pi * xi) * np.exp(-np.pi * xi**2), atol=1e-12)


def test_line_fourier_parseval_and_inverse(rng):
    g = LineGrid(2, 2.0, 16)
    f = GridFunction(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
    F = line_fourier(f)
    assert np.sum(np.abs(f.values) ** 2) * g.cell == pytest.approx(
        np.sum(np.abs(F.values) ** 2) * F.grid.cell, rel=1e-12)
    assert np.allclose(inverse_line_fourier(F).values, f.values, atol=1e-12)


def test_direct_transform_agrees_with_fft(rng):
    g = LineGrid(1, 2.0, 32)
    f = GridFunction(g, rng.standard_normal(32))
    F = line_fourier(f)
    direct = fourier_transform_at(f, F.grid.axis())
    assert np.allclose(direct, F.values, atol=1e-12)


def test_grid_function_validation():
    g = TorusGrid(1, 8)
    with pytest.raises(DomainError):
        GridFunction(g, np.ones(4))
    with pytest.raises(DomainError):
        GridFunction(g, np.full(8, np.nan))
    with pytest.raises(DomainError):
        GridFunction(g, np.ones(8)) + GridFunction(TorusGrid(1, 16), np.ones(16))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=10, allow_nan=False))
def test_coefficients_are_linear(seed, c):
    r = np.random.default_rng(seed)
    a, b = random_trig_polynomial(r, 1, 3), random_trig_polynomial(r, 1, 3)
    g = TorusGrid(1, 16)
    box = FrequencyBox(1, 3)
    lhs = fourier_coefficients(synthesize(a, g) * c + synthesize(b, g), box).coeffs
    assert np.allclose(lhs, c * a.coeffs + b.coeffs, atol=1e-10)
