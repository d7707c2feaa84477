"""The ten acceptance criteria as runnable checks.

Each ``criterion_k`` returns a :class:`CriterionResult`; :func:`run_all`
runs them in order. Tolerances and time budgets are fixed here.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .estimation import SearchConfig, deperiodization_check, estimate_norm, mz_test, transference_report
from .functions import GridFunction, random_trig_polynomial
from .norms import kolmogorov_norm, weak_norm
from .operators import mollification_domination
from .spaces import FrequencyBox, LineGrid, TorusGrid, kolmogorov_constant, make_exponents
from .symbols import (LatticeSymbol, bessel_symbol, bump_profile_fn, bump_symbol, constant_symbol,
                      dilate_family, half_space_symbol, hs_norm, hs_report, modulation_symbol,
                      normalized_check, product_symbol)
from .weights import (Mollifier, ap_constant, approx_identity_multiplier, approx_identity_norm,
                      power_weight, random_step_weight, smooth_weight, unit_weight)

__all__ = ["CriterionResult", "CRITERIA", "run_all", "format_line"] + [f"criterion_{k}" for k in range(1, 11)]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float
    budget: float
    detail: dict = field(default_factory=dict)

    @property
    def within_budget(self) -> bool:
        return self.seconds <= self.budget


def _timed(number, name, budget):
    def wrap(fn):
        def run() -> CriterionResult:
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            return CriterionResult(number, name, bool(ok) and dt <= budget, dt, budget, detail)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


@_timed(1, "identity-symbol norm", 10.0)
def criterion_1():
    """m = 1 on the torus, (2, 2): estimate in [0.999, 1 + 1e-9]."""
    cfg = SearchConfig(restarts=8, steps=200, freq_box=FrequencyBox(1, 8), grid_n=512, seed=0)
    est = estimate_norm(constant_symbol(1.0), make_exponents([2, 2]), cfg=cfg)
    return 0.999 <= est.value <= 1 + 1e-9, {"value": est.value}


@_timed(2, "Kolmogorov sandwich", 5.0)
def criterion_2():
    """weak <= Kolmogorov <= c_{p,q} weak on 1000 random step functions and weights."""
    rng = np.random.default_rng(2)
    grid = TorusGrid(1, 64)
    pairs = ((1.0, 0.5), (2.0, 1.0), (2.0 / 3.0, 1.0 / 3.0))
    violations = 0
    worst = 0.0
    for _ in range(1000):
        cells = int(rng.choice([4, 8, 16]))
        levels = rng.exponential(size=cells) * (rng.random(cells) < 0.85)
        f = GridFunction(grid, np.repeat(levels, 64 // cells))
        w = random_step_weight(rng, 1, int(rng.choice([2, 4, 8])))
        for p, q in pairs:
            a = weak_norm(f, p, w)
            b = kolmogorov_norm(f, p, q, w)
            c = kolmogorov_constant(p, q)
            if not (a <= b * (1 + 1e-12) and b <= c * a * (1 + 1e-12)):
                violations += 1
            if a > 0:
                worst = max(worst, b / (c * a))
    return violations == 0, {"violations": violations, "max_kolmogorov_over_bound": worst}


def _random_kernel(rng, grid: LineGrid):
    y1, y2 = grid.coords()
    c = rng.uniform(-0.08, 0.08, 2)
    a = rng.uniform(0.08, 0.15)
    r2 = ((y1 - c[0]) ** 2 + (y2 - c[1]) ** 2) / a**2
    inside = r2 < 1
    bump = np.where(inside, np.exp(-1.0 / (1.0 - np.where(inside, r2, 0.0))), 0.0)
    tilt = 1 + rng.standard_normal() * y1 + 1j * rng.standard_normal() * y2
    return GridFunction(grid, bump * tilt)


@_timed(3, "de-periodization identity", 60.0)
def criterion_3():
    """Identity within 1e-6 at 64 pairs for 20 kernels; factor nonincreasing in s."""
    rng = np.random.default_rng(3)
    kgrid = LineGrid(2, 0.5, 64)
    worst, mono = 0.0, True
    for i in range(20):
        K = _random_kernel(rng, kgrid)
        g1 = random_trig_polynomial(rng, 1, 8, modes=8)
        g2 = random_trig_polynomial(rng, 1, 8, modes=8)
        rep = deperiodization_check(K, g1, g2, r=0.25, s_schedule=(4, 8, 16), p=1.0,
                                    samples=64, seed=i)
        worst = max(worst, rep["max_identity_error"])
        mono &= rep["factors_nonincreasing"]
    return worst <= 1e-6 and mono, {"max_identity_error": worst, "factors": rep["factors"]}


@_timed(4, "transference ratio", 300.0)
def criterion_4():
    """rho <= 1.05 for the bump dilation family, unweighted and weighted, strong and weak."""
    fam = dilate_family(bump_symbol(3.0), [0.5, 1.0, 2.0])
    exps = make_exponents([2, 2])
    cfg = SearchConfig(restarts=4, steps=150, freq_box=FrequencyBox(1, 4), seed=4)
    w = smooth_weight(power_weight(0.5), Mollifier(1, 0.25))
    rhos = {}
    ok = True
    for label, weight in (("unweighted", None), ("weighted", w)):
        for target in ("strong", "weak"):
            rep = transference_report(fam, exps, weight, [weight, weight], target, cfg,
                                      s_schedule=(4, 8, 16), tol=0.05)
            rhos[f"{label}/{target}"] = rep["rho"]
            ok &= rep["rho"] <= 1.05
    return ok, {"rho": rhos}


@_timed(5, "Marcinkiewicz-Zygmund", 60.0)
def criterion_5():
    """200 random instances with J = 3, K = 3, (p1, p2, p) = (2, 2, 1): zero violations."""
    rng = np.random.default_rng(5)
    grid = TorusGrid(1, 64)
    exps = make_exponents([2, 2])
    violations, worst = 0, 0.0
    for _ in range(200):
        A = rng.standard_normal((3, 7)) + 1j * rng.standard_normal((3, 7))
        B = rng.standard_normal((3, 7)) + 1j * rng.standard_normal((3, 7))
        ops = [LatticeSymbol(np.outer(A[j], B[j]), 1, 2) for j in range(3)]
        bound = (np.sqrt((np.abs(A) ** 2).sum(axis=0).max())
                 * np.sqrt((np.abs(B) ** 2).sum(axis=0).max()))
        fs = [random_trig_polynomial(rng, 1, 3) for _ in range(3)]
        gs = [random_trig_polynomial(rng, 1, 3) for _ in range(3)]
        rep = mz_test(ops, fs, gs, exps, bound, grid)
        violations += not rep["pass"]
        worst = max(worst, rep["ratio"])
    return violations == 0, {"violations": violations, "max_ratio": worst}


@_timed(6, "mollification domination", 60.0)
def criterion_6():
    """100 random (m, phi, f1, f2): left <= right + 1e-6 at every grid point."""
    rng = np.random.default_rng(6)
    grid = LineGrid(1, 8.0, 64)
    x = grid.axis()
    worst = -np.inf
    for _ in range(100):
        m = product_symbol(bump_symbol(rng.uniform(1, 4)), modulation_symbol(rng.uniform(-1, 1, 2)))
        phi = bump_profile_fn(rng.uniform(0.15, 0.35))
        f1 = GridFunction(grid, np.exp(-(x - rng.uniform(-1, 1)) ** 2)
                          * np.exp(2j * np.pi * rng.uniform(-1, 1) * x))
        f2 = GridFunction(grid, np.exp(-(x - rng.uniform(-1, 1)) ** 2 / 2)
                          * np.exp(2j * np.pi * rng.uniform(-1, 1) * x))
        rep = mollification_domination(m, phi, f1, f2, tol=1e-6)
        worst = max(worst, rep["max_left_minus_right"])
    return worst <= 1e-6, {"max_left_minus_right": worst}


@_timed(7, "A_p estimator", 10.0)
def criterion_7():
    """Unit weight gives 1; alpha = +-1/2 stabilizes; alpha = 3/2 doubles per depth.

    The last requirement is checked literally. The discrete A_2 constant of
    ``|sin pi x|^alpha`` grows like ``2^(alpha - 1)`` per depth, i.e. about
    sqrt(2) for alpha = 3/2, so this part is expected to fail; the two-depth
    ratios are reported alongside.
    """
    unit = {p: ap_constant(unit_weight(), p, 6) for p in (1.0, 2.0, 4.0)}
    ok = all(v == 1.0 for v in unit.values())
    depths = range(4, 10)
    detail = {"unit": unit}
    for a in (-0.5, 0.5):
        v = np.array([ap_constant(power_weight(a), 2.0, D) for D in depths])
        r = v[1:] / v[:-1]
        detail[f"alpha={a:g}"] = r.tolist()
        ok &= bool(np.all(r < 1.05))
    v = np.array([ap_constant(power_weight(1.5), 2.0, D) for D in depths])
    two = v[2:] / v[:-2]
    detail["alpha=1.5 per depth"] = (v[1:] / v[:-1]).tolist()
    detail["alpha=1.5 over two depths"] = two.tolist()
    per = v[1:] / v[:-1]
    detail["alpha=1.5 doubles per depth"] = bool(np.all(per >= 2.0))
    ok &= bool(np.all(per >= 2.0))
    return ok, detail


@_timed(8, "Sobolev norms", 30.0)
def criterion_8():
    """m = 1: k-independent hs_norm; (1 + |xi|^2)^-1: finite sup, < 1% change under refinement."""
    one = constant_symbol(1.0)
    vals = [hs_norm(one, k, 1.2, resolution=128) for k in range(-10, 11)]
    var = max(vals) - min(vals)
    dec = bessel_symbol(-2.0)
    sups = [hs_report(dec, range(-8, 9), 1.2, resolution=n)["sup"] for n in (128, 256)]
    change = abs(sups[1] - sups[0]) / sups[1]
    ok = var <= 1e-10 and np.isfinite(sups[1]) and change < 0.01
    return ok, {"variation": var, "sups": sups, "relative_change": change}


@_timed(9, "normalization check", 10.0)
def criterion_9():
    """Continuous symbols pass; the half-space indicator converges to 1/2 on its boundary."""
    pts = np.array([[0.0, 0.0], [1.0, 2.0], [-3.0, 1.0], [2.0, -2.0]])
    ok = True
    for m in (bump_symbol(3.0), bessel_symbol(-2.0), modulation_symbol([0.3, -0.2])):
        rep = normalized_check(m, pts)
        ok &= rep["verdict"] == "normalized-consistent"
    hs = normalized_check(half_space_symbol(), np.array([[0.0, 1.0]]))
    limit = 1.0 - hs["points"][0]["errors"][-1]
    ok &= hs["verdict"] == "not-normalized" and abs(limit - 1.0) > 0.4
    return ok, {"half_space_limit": limit, "half_space_verdict": hs["verdict"]}


@_timed(10, "approximate identity", 30.0)
def criterion_10():
    """sup |hat h_n| <= 1 + 1e-10; hat h_n -> 1 monotonically; weighted norms <= 2^{1/p} + 0.02."""
    xi = np.linspace(0.0, 64.0, 8193)
    sup = float(np.abs(approx_identity_multiplier(1, xi)).max())
    freqs = np.linspace(-3.0, 3.0, 20)
    H = np.array([approx_identity_multiplier(n, freqs) for n in (4, 8, 16, 32, 64, 128)])
    mono = bool(np.all(np.diff(np.abs(1 - H), axis=0) <= 1e-15))
    w = smooth_weight(power_weight(0.5), Mollifier(1, 0.25))
    norms = {}
    ok_norm = True
    for p in (1.0, 2.0):
        for n in (4, 8, 16):
            v = approx_identity_norm(w, p, n)
            norms[f"p={p:g},n={n}"] = v
            ok_norm &= v <= 2 ** (1 / p) + 0.02
    return sup <= 1 + 1e-10 and mono and ok_norm, {"sup": sup, "monotone": mono, "norms": norms}


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def format_line(r: CriterionResult) -> str:
    status = "PASS" if r.passed else "FAIL"
    return f"[{status}] criterion {r.number:2d} {r.name}: {r.seconds:.2f}s (budget {r.budget:g}s)"


def run_all(verbose: bool = True) -> list[CriterionResult]:
    out = []
    for c in CRITERIA:
        r = c()
        if verbose:
            print(format_line(r), flush=True)
        out.append(r)
    return out
