import numpy as np
import pytest
from scipy import integrate

from multixfer.errors import DomainError
from multixfer.functions import GridFunction, fourier_transform_at
from multixfer.spaces import FrequencyBox, LineGrid, make_exponents
from multixfer.symbols import (LittlewoodPaleyWindow, bessel_symbol, bump_symbol, classify,
                               closed_form_symbol, cm_check, constant_symbol, dilate,
                               dilate_family, gaussian_profile, half_space_symbol,
                               hormander_class_check, hs_norm, hs_report, lattice_points,
                               modulation_symbol, mollify, multi_indices, normalized_check,
                               product_symbol, restrict_lattice, separable_symbol,
                               symbol_from_description, truncation_family)
from multixfer.weights import power_weight, unit_weight


def gauss(s):
    return lambda x: np.exp(-x[..., 0] ** 2 / (2 * s * s))


def ratio_symbol():
    return symbol_from_description({"form": "homogeneous_ratio"})


# -- lattice restriction and dilation ----------------------------------------

def test_restrict_constant_is_all_ones():
    lat = restrict_lattice(constant_symbol(), FrequencyBox(1, 3))
    assert lat.values.shape == (7, 7)
    assert np.all(lat.values == 1)


def test_restrict_dilated_symbol_samples_rk():
    m = bessel_symbol(-1.0)
    r = 0.37
    lat = restrict_lattice(dilate(m, r), FrequencyBox(1, 2))
    for k1 in range(-2, 3):
        for k2 in range(-2, 3):
            expect = (1 + (r * k1) ** 2 + (r * k2) ** 2) ** -0.5
            assert lat(k1, k2) == pytest.approx(expect, rel=1e-14)


def test_restriction_commutes_with_products():
    a, b = bessel_symbol(-1.0), modulation_symbol([0.3, -0.2])
    box = FrequencyBox(1, 3)
    lhs = restrict_lattice(product_symbol(a, b), box).values
    rhs = restrict_lattice(a, box).values * restrict_lattice(b, box).values
    assert np.allclose(lhs, rhs, atol=1e-15)


def test_lattice_points_order():
    pts = lattice_points(FrequencyBox(1, 1), 2)
    assert pts.shape == (9, 2)
    assert pts[0].tolist() == [-1, -1] and pts[1].tolist() == [-1, 0]


def test_dilation_laws(rng):
    m = bessel_symbol(-1.0)
    x = rng.standard_normal((50, 2))
    assert dilate(m, 1.0) is m
    assert np.allclose(dilate(dilate(m, 1.7), 0.3)(x), dilate(m, 1.7 * 0.3)(x), rtol=1e-14)
    fam = dilate_family(constant_symbol(2.0), [0.1, 1.0, 10.0])
    for member in fam:
        assert np.all(member(x) == 2.0)
    assert fam.bound == 2.0


def test_dilation_rejects_nonpositive():
    with pytest.raises(DomainError):
        dilate_family(constant_symbol(), [1.0, 0.0])
    with pytest.raises(DomainError):
        dilate(constant_symbol(), -1.0)


# -- mollification -------------------------------------------------------------

def test_mollify_constant_gives_mass():
    phi = gaussian_profile(0.5, amplitude=3.0)
    mol = mollify(constant_symbol(2.0), phi)
    x = np.array([[0.0, 0.0], [4.0, -1.0]])
    assert np.allclose(mol(x), 2.0 * 9.0, rtol=1e-7)


def test_mollify_matches_gaussian_convolution_closed_form(rng):
    # Gaussian * Gaussian is a Gaussian of summed variance
    s = 0.5
    m = separable_symbol([gauss(1.0), gauss(1.0)], [1, 1])
    mol = mollify(m, gaussian_profile(s))
    x = rng.uniform(-3, 3, size=(40, 2))
    v = 1 + s * s
    expect = np.prod(np.exp(-x**2 / (2 * v)) / np.sqrt(v), axis=1)
    assert np.max(np.abs(mol(x) - expect)) < 1e-6


def test_mollify_respects_bound(rng):
    m = modulation_symbol([0.7, -1.3])
    mol = mollify(m, gaussian_profile(0.3, amplitude=0.8))
    x = rng.uniform(-20, 20, size=(1000, 2))
    assert np.max(np.abs(mol(x))) <= mol.bound * (1 + 1e-12)


# -- normalization ------------------------------------------------------------

def test_constant_symbol_normalization_error_zero():
    rep = normalized_check(constant_symbol(3.0), [[0, 0], [2, -1]])
    assert rep["verdict"] == "normalized-consistent"
    for p in rep["points"]:
        assert max(p["errors"]) < 1e-12


def test_continuous_symbol_is_normalized():
    rep = normalized_check(bessel_symbol(-1.0), [[0, 0], [1, 2], [-3, 1]])
    assert rep["verdict"] == "normalized-consistent"


def test_half_space_indicator_flagged():
    rep = normalized_check(half_space_symbol(), [[0, 0]])
    assert rep["verdict"] == "not-normalized"
    # the one-dimensional mollified step tends to 1/2 at the jump
    assert rep["points"][0]["errors"][-1] == pytest.approx(0.5, abs=1e-8)


# -- truncated kernels --------------------------------------------------------

def _gauss_kernel(width=0.2):
    g = LineGrid(2, 2.0, 32)
    x, y = g.coords()
    return GridFunction(g, np.exp(-(x**2 + y**2) / (2 * width**2)))


def test_truncation_member_is_masked_kernel_transform(rng):
    K = _gauss_kernel()
    fam = truncation_family(K, [0, 2, 4])
    xi = rng.uniform(-2, 2, size=(10, 2))
    x, y = K.grid.coords()
    for j, member in zip(fam.indices, fam):
        masked = GridFunction(K.grid, np.where(np.hypot(x, y) > 2.0**-j, K.values, 0))
        assert np.allclose(member(xi), fourier_transform_at(masked, xi), atol=1e-14)


def test_truncation_large_j_removes_only_the_origin(rng):
    # with 2^-j below the spacing only the node at y = 0 is cut
    K = _gauss_kernel()
    xi = rng.uniform(-2, 2, size=(10, 2))
    x, y = K.grid.coords()
    at0 = np.hypot(x, y) == 0
    full = fourier_transform_at(K, xi) - K.values[at0].sum() * K.grid.cell
    assert np.allclose(truncation_family(K, [20]).members[0](xi), full, atol=1e-14)


def test_truncation_of_small_support_kernel_vanishes_at_j0(rng):
    g = LineGrid(2, 2.0, 32)
    x, y = g.coords()
    K = GridFunction(g, np.where(np.hypot(x, y) <= 0.5, 1.0, 0.0))
    member = truncation_family(K, [0]).members[0]
    assert np.all(member(rng.standard_normal((5, 2))) == 0)


def test_truncation_sup_bounded_by_l1_mass(rng):
    K = _gauss_kernel()
    l1 = np.abs(K.values).sum() * K.grid.cell
    xi = rng.uniform(-4, 4, size=(200, 2))
    for member in truncation_family(K, range(5)):
        assert np.max(np.abs(member(xi))) <= l1 + 1e-12


def test_truncation_rejects_negative_index():
    with pytest.raises(DomainError):
        truncation_family(_gauss_kernel(), [-1])


# -- derivative class checks ---------------------------------------------------

def test_multi_indices_count():
    # orders 0, 1, 2 in two variables: 1 + 2 + 3
    assert len(multi_indices(2, 2)) == 6


def test_cm_check_constant():
    rep = cm_check(constant_symbol())
    assert rep["verdict"] == "consistent"
    assert rep["orders"]["(0, 0)"]["sup"] == pytest.approx(1.0)
    for key, v in rep["orders"].items():
        if key != "(0, 0)":
            assert v["sup"] == 0


def test_cm_check_homogeneous_ratio_consistent_and_stable():
    rep = cm_check(ratio_symbol())
    assert rep["verdict"] == "consistent"
    for v in rep["orders"].values():
        assert np.isfinite(v["sup"])
        assert v["step_rel_change"] < 1e-3


def test_cm_check_flags_square_root_growth():
    m = closed_form_symbol(lambda x: np.sqrt(np.abs(x[..., 0])), np.inf, label="sqrt")
    rep = cm_check(m)
    assert rep["verdict"] == "inconsistent"
    # |d/dxi xi^{1/2}| (|xi| + |eta|) grows like r^{1/2}
    assert rep["orders"]["(1, 0)"]["slope_high"] == pytest.approx(0.5, abs=0.05)


def test_first_derivative_matches_closed_form():
    # d/dxi (1 + xi^2 + eta^2)^{-1/2} = -xi (1 + |x|^2)^{-3/2}
    m = bessel_symbol(-1.0)
    rep = hormander_class_check(m, -1.0, 1.0, orders=[(1, 0)], radii=[0.5, 1.0, 2.0],
                                sample_count=4)
    from multixfer.symbols import _directions
    dirs = _directions(2, 4, 0)
    pts = np.concatenate([r * dirs for r in (0.5, 1.0, 2.0)])
    s = np.abs(pts).sum(axis=1)
    exact = np.abs(pts[:, 0]) * (1 + (pts**2).sum(axis=1)) ** -1.5 * (1 + s) ** 2
    assert rep["orders"]["(1, 0)"]["sup"] == pytest.approx(exact.max(), rel=1e-6)


def test_hormander_constant_in_every_rho():
    for rho in (0.0, 0.5, 1.0):
        rep = hormander_class_check(constant_symbol(), 0.0, rho)
        assert rep["verdict"] == "consistent"
        assert rep["orders"]["(0, 0)"]["sup"] == pytest.approx(1.0)


@pytest.mark.parametrize("m0", [-1.5, -0.5, 0.0])
def test_bessel_symbol_in_its_class(m0):
    rep = hormander_class_check(bessel_symbol(m0), m0, 1.0)
    assert rep["verdict"] == "consistent"
    assert all(v["step_rel_change"] < 1e-3 for v in rep["orders"].values())


def test_order_zero_symbol_fails_negative_order():
    rep = hormander_class_check(constant_symbol(), -1.0, 1.0)
    assert rep["verdict"] == "inconsistent"
    assert rep["orders"]["(0, 0)"]["slope_high"] == pytest.approx(1.0, abs=0.05)


def test_ratio_symbol_not_in_inhomogeneous_class():
    # smooth away from the origin only: derivatives blow up as |xi| -> 0
    assert hormander_class_check(ratio_symbol(), 0.0, 1.0)["verdict"] == "inconsistent"


def test_check_rejects_high_order():
    with pytest.raises(DomainError):
        cm_check(constant_symbol(), orders=[(2, 1)])


# -- Littlewood-Paley window and Sobolev norms ----------------------------------

def test_window_partition_of_unity(rng):
    W = LittlewoodPaleyWindow(2)
    xi = rng.standard_normal((500, 2)) * np.exp(rng.uniform(-8, 8, size=(500, 1)))
    assert np.max(W.partition_error(xi)) < 1e-8
    assert W.support_ok(rng.uniform(-3, 3, size=(2000, 2)))


def test_hs_norm_of_constant_is_window_norm():
    W = LittlewoodPaleyWindow(2)
    # s = 0: Plancherel turns the norm into the L2 norm of the radial window
    mass = integrate.quad(lambda r: W.radial(r) ** 2 * r, 0.5, 2.0, epsabs=0, limit=200)[0]
    expect = np.sqrt(2 * np.pi * mass)
    vals = [hs_norm(constant_symbol(), k, 0.0) for k in (-4, 0, 3)]
    assert max(vals) - min(vals) <= 1e-10
    assert vals[0] == pytest.approx(expect, rel=1e-6)


def test_hs_report_converges_in_resolution():
    m = bessel_symbol(-2.0)
    lo = hs_report(m, range(-8, 9), 1.2, resolution=256)
    hi = hs_report(m, range(-8, 9), 1.2, resolution=512)
    assert np.isfinite(lo["sup"])
    assert abs(hi["sup"] - lo["sup"]) / hi["sup"] < 0.01


def test_anisotropic_weight_below_isotropic(rng):
    # 1 + x^2 + y^2 <= (1 + x^2)(1 + y^2) <= (1 + x^2 + y^2)^2 pointwise
    s = 1.2
    for _ in range(3):
        a, b = rng.uniform(0.3, 2.0, size=2)
        m = separable_symbol([gauss(a), gauss(b)], [1, 1])
        scalar = hs_norm(m, 0, s / 2)
        tup = hs_norm(m, 0, (s / 2, s / 2))
        assert tup >= scalar * (1 - 1e-12)
        assert tup <= hs_norm(m, 0, s) * (1 + 1e-12)


def test_hs_norm_rejects_wrong_tuple_length():
    with pytest.raises(DomainError):
        hs_norm(constant_symbol(), 0, (1.0, 1.0, 1.0))


# -- classification -----------------------------------------------------------

def test_classify_constant_unweighted():
    u = unit_weight()
    rep = classify(constant_symbol(), make_exponents([2, 2]), [u, u])
    for key in ("coifman_meyer", "hormander_sobolev", "anisotropic_sobolev", "a_vec_p"):
        assert rep[key]["applies"], key
    # the class condition holds; only the strict order inequality m < 0 fails
    assert rep["hormander_class"]["symbol_condition"] == "consistent"


def test_classify_bessel_branch_arithmetic():
    u = unit_weight()
    rep = classify(bessel_symbol(-1.5), make_exponents([2, 2]), [u, u])
    entry = rep["hormander_class"]
    assert entry["m_order"] == pytest.approx(-1.5, abs=0.01)
    # rho = 1 makes the limit (rho - 1) sum d/p_j vanish
    assert entry["order_limit"] == 0
    assert entry["applies"]


def test_classify_singular_weight_blocks_cm():
    w = power_weight(1.5)
    rep = classify(bump_symbol(), make_exponents([2, 2]), [w, w])
    assert not rep["coifman_meyer"]["applies"]
    assert not rep["coifman_meyer"]["A_p0"]["finite"]
    assert "coifman_meyer" not in rep["applicable"]


def test_classify_arity_mismatch():
    u = unit_weight()
    with pytest.raises(DomainError):
        classify(constant_symbol(), make_exponents([2, 2, 2]), [u, u, u])


# -- declarative construction -------------------------------------------------

def test_symbol_from_description_forms(rng):
    x = rng.standard_normal((20, 2))
    sep = symbol_from_description({"form": "separable", "factors": [
        {"kind": "cos", "freq": 0.5}, {"kind": "gaussian", "sigma": 2.0}]})
    assert np.allclose(sep(x), np.cos(np.pi * x[:, 0]) * np.exp(-x[:, 1] ** 2 / 8))
    dil = symbol_from_description({"form": "dilation", "r": 2.0,
                                   "base": {"form": "bessel", "order": -1}})
    assert np.allclose(dil(x), (1 + 4 * (x**2).sum(axis=1)) ** -0.5)
    mod = symbol_from_description({"form": "modulation", "shifts": [0.25, 0.5]})
    assert np.allclose(mod(x), np.exp(2j * np.pi * (0.25 * x[:, 0] + 0.5 * x[:, 1])))
    assert symbol_from_description({"form": "constant", "value": [0, 1]})(x[:1])[0] == 1j


def test_symbol_from_description_rejects_unknown():
    with pytest.raises(DomainError):
        symbol_from_description({"form": "nope"})
    with pytest.raises(DomainError):
        symbol_from_description({"form": "separable", "factors": [{"kind": "x"}, {"kind": "x"}]})
