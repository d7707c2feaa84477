"""Periodic weights, dyadic A_p estimates, weight smoothing and approximate identities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, InvariantViolation
from .functions import GridFunction, TrigPolynomial, synthesize
from .spaces import ExponentTuple, LineGrid, TorusGrid

__all__ = [
    "WeightSpec",
    "Mollifier",
    "unit_weight",
    "constant_weight",
    "power_weight",
    "step_weight",
    "weight_power",
    "weight_product",
    "smooth_weight",
    "smoothed_min",
    "ap_constant",
    "ap_refinement",
    "a_vec_p_check",
    "bump_profile",
    "approx_identity_kernel",
    "approx_identity_multiplier",
    "approx_identity_norm",
    "random_step_weight",
]


def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def _bump_mass() -> float:
    val, _ = integrate.quad(lambda t: math.exp(-1.0 / (1.0 - t * t)), -1, 1,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def bump_profile(t):
    """The C-infinity bump on [-1, 1] scaled to unit integral (peak ~0.83)."""
    return _bump(t) / _bump_mass()


@dataclass(frozen=True)
class Mollifier:
    """Nonnegative tensor bump supported in ``[-radius, radius]^d``, unit mass."""

    dim: int = 1
    radius: float = 0.5

    def __post_init__(self):
        if not 0 < self.radius <= 0.5:
            raise DomainError(f"mollifier radius must lie in (0, 1/2], got {self.radius}")

    def sample(self, grid: TorusGrid) -> np.ndarray:
        """Periodic samples centred at the origin, normalized to unit grid mass."""
        return _mollifier_samples(self, grid)


@lru_cache(maxsize=64)
def _mollifier_samples(psi: Mollifier, grid: TorusGrid) -> np.ndarray:
    if grid.dim != psi.dim:
        raise DomainError("mollifier/grid dimension mismatch")
    ax = grid.axis()
    dist = np.minimum(ax, 1.0 - ax)
    prof = _bump(dist / psi.radius)
    out = prof
    for _ in range(psi.dim - 1):
        out = np.multiply.outer(out, prof)
    out = out / (out.sum() * grid.cell)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class WeightSpec:
    """A 1-periodic weight on ``T^d``.

    Use the module constructors (``power_weight``, ``step_weight``, ...);
    ``sample(grid)`` evaluates on a torus grid or a lattice-compatible line grid.
    """

    dim: int
    form: str
    value: float = 1.0
    alphas: tuple = ()
    levels: tuple = ()
    base: "WeightSpec | None" = None
    mollifier: Mollifier | None = None
    parts: tuple = ()
    label: str = ""

    def sample(self, grid) -> np.ndarray:
        return _sample(self, grid)

    @property
    def name(self) -> str:
        return self.label or self.form


def unit_weight(dim: int = 1) -> WeightSpec:
    return WeightSpec(dim, "constant", 1.0, label="unit")


def constant_weight(c: float, dim: int = 1) -> WeightSpec:
    if not (c > 0 and math.isfinite(c)):
        raise DomainError(f"constant weight must be positive and finite, got {c}")
    return WeightSpec(dim, "constant", float(c), label=f"const({c:g})")


def power_weight(alphas) -> WeightSpec:
    """``prod_i |sin(pi x_i)|^{alpha_i}``, sampled half a spacing off the lattice."""
    alphas = tuple(float(a) for a in np.atleast_1d(alphas))
    label = "sinpow(" + ",".join(f"{a:g}" for a in alphas) + ")"
    return WeightSpec(len(alphas), "power", alphas=alphas, label=label)


def _nested(a: np.ndarray):
    if a.ndim == 1:
        return tuple(float(v) for v in a)
    return tuple(_nested(r) for r in a)


def step_weight(levels) -> WeightSpec:
    """Piecewise constant weight: ``levels[i]`` on the cell ``[i/m, (i+1)/m)^d``."""
    lv = np.asarray(levels, dtype=float)
    if lv.ndim not in (1, 2) or len(set(lv.shape)) != 1:
        raise DomainError("step levels must be a 1-d list or a square 2-d table")
    if not np.all((lv > 0) & np.isfinite(lv)):
        raise DomainError("step levels must be positive and finite")
    return WeightSpec(lv.ndim, "step", levels=_nested(lv), label=f"step{lv.shape[0]}")


def weight_power(w: WeightSpec, e: float) -> WeightSpec:
    """The weight ``w^e``."""
    return weight_product([w], [e])


def weight_product(ws: Sequence[WeightSpec], exps: Sequence[float]) -> WeightSpec:
    """The weight ``prod_j w_j^{e_j}``."""
    ws = tuple(ws)
    if not ws or len(ws) != len(exps):
        raise DomainError("weights and exponents must be nonempty and of equal length")
    dims = {w.dim for w in ws}
    if len(dims) != 1:
        raise DomainError("weights of different dimensions")
    parts = tuple((w, float(e)) for w, e in zip(ws, exps))
    label = "*".join(f"{w.name}^{e:g}" for w, e in parts)
    return WeightSpec(ws[0].dim, "composite", parts=parts, label=label)


def smooth_weight(w: WeightSpec, psi: Mollifier) -> WeightSpec:
    """``psi * w``, evaluated by periodic convolution on the sampling grid."""
    if psi.dim != w.dim:
        raise DomainError("mollifier/weight dimension mismatch")
    return WeightSpec(w.dim, "smoothed", base=w, mollifier=psi,
                      label=f"smooth({w.name},r={psi.radius:g})")


def _torus_samples(w: WeightSpec, grid: TorusGrid) -> np.ndarray:
    if w.form == "constant":
        return np.full(grid.shape, w.value)
    if w.form == "power":
        out = np.ones(grid.shape)
        for ax, (c, a) in enumerate(zip(grid.coords(), w.alphas)):
            out = out * np.abs(np.sin(np.pi * (c + 0.5 * grid.spacing))) ** a
        return out
    if w.form == "step":
        lv = np.asarray(w.levels)
        m = lv.shape[0]
        idx = (np.arange(grid.n_per_axis) * m) // grid.n_per_axis
        return lv[np.ix_(*([idx] * w.dim))]
    if w.form == "smoothed":
        base = _sample(w.base, grid)
        psi = w.mollifier.sample(grid)
        conv = np.fft.ifftn(np.fft.fftn(base) * np.fft.fftn(psi)).real * grid.cell
        return conv
    if w.form == "composite":
        out = np.ones(grid.shape)
        for part, e in w.parts:
            out = out * _sample(part, grid) ** e
        return out
    raise DomainError(f"unknown weight form {w.form!r}")


@lru_cache(maxsize=256)
def _sample(w: WeightSpec, grid) -> np.ndarray:
    if grid.dim != w.dim:
        raise DomainError(f"weight dimension {w.dim} != grid dimension {grid.dim}")
    if isinstance(grid, TorusGrid):
        out = _torus_samples(w, grid)
    elif isinstance(grid, LineGrid):
        m = grid.lattice_ratio()
        if w.form == "constant":
            out = np.full(grid.shape, w.value)
        elif m is None or m < 4 or (m & (m - 1)):
            raise DomainError(f"line spacing {grid.spacing} must be 1/m with m a power of two >= 4")
        else:
            base = _torus_samples(w, TorusGrid(w.dim, m))
            idx = (np.arange(grid.n_per_axis) - grid.n_per_axis // 2) % m
            out = base[np.ix_(*([idx] * w.dim))]
    else:
        raise DomainError(f"cannot sample a weight on {type(grid)!r}")
    out = np.array(out, dtype=float)
    if not np.all(np.isfinite(out)) or np.any(out <= 0):
        raise InvariantViolation(f"weight {w.name} is not positive and finite on the grid")
    out.setflags(write=False)
    return out


def smoothed_min(w: WeightSpec, psi: Mollifier, grid: TorusGrid | None = None) -> float:
    """Grid minimum of ``psi * w``; raises if it is not strictly positive."""
    grid = grid or TorusGrid(w.dim, 256 if w.dim == 1 else 64)
    base = np.asarray(_torus_samples(w, grid))
    kern = psi.sample(grid)
    conv = np.fft.ifftn(np.fft.fftn(base) * np.fft.fftn(kern)).real * grid.cell
    val = float(conv.min())
    if not val > 0:
        raise InvariantViolation(f"smoothed weight has nonpositive minimum {val}")
    return val


def _block_means(a: np.ndarray, j: int) -> np.ndarray:
    n = a.shape[0]
    s = n >> j
    shape = []
    for _ in range(a.ndim):
        shape += [1 << j, s]
    b = a.reshape(shape)
    return b.mean(axis=tuple(range(1, 2 * a.ndim, 2)))


def _block_mins(a: np.ndarray, j: int) -> np.ndarray:
    n = a.shape[0]
    s = n >> j
    shape = []
    for _ in range(a.ndim):
        shape += [1 << j, s]
    return a.reshape(shape).min(axis=tuple(range(1, 2 * a.ndim, 2)))


def _ap_from_samples(w: np.ndarray, p: float, depth: int) -> float:
    n = w.shape[0]
    best = 0.0
    for j in range(depth + 1):
        s = n >> j
        if s < 1:
            break
        shifts = [0] if (j == 0 or s < 2) else [0, s // 2]
        for sh in shifts:
            a = np.roll(w, -sh, axis=tuple(range(w.ndim))) if sh else w
            avg = _block_means(a, j)
            if p == 1:
                q = avg / _block_mins(a, j)
            else:
                dual = _block_means(a ** (-1.0 / (p - 1)), j)
                q = avg * dual ** (p - 1)
            best = max(best, float(q.max()))
    return best


def ap_constant(w: WeightSpec, p: float, depth: int, n: int | None = None) -> float:
    """Dyadic estimate of the A_p constant of ``w``.

    Supremum of the A_p quotient over dyadic cubes of side ``2^-j``,
    ``j = 0..depth``, on the standard grid and the grid shifted by half a
    side. ``p = 1`` uses ``avg(w) / min(w)``. The weight is sampled on a torus
    grid with ``n = 2^(depth+2)`` points per axis unless ``n`` is given, so
    refining the depth also refines the resolution.
    """
    if p < 1:
        raise DomainError(f"A_p needs p >= 1, got {p}")
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    if n is None:
        n = 2 ** (depth + 2)
    if n < 2**depth:
        raise DomainError(f"grid n={n} too coarse for depth {depth}")
    samples = w.sample(TorusGrid(w.dim, n))
    if np.all(samples == samples.flat[0]):
        return 1.0
    return _ap_from_samples(np.asarray(samples), float(p), depth)


def ap_refinement(w: WeightSpec, p: float, depths=(4, 5, 6, 7, 8)) -> dict:
    """A_p estimates along a depth schedule with a finiteness verdict.

    The weight is judged finite when the estimate grows by less than 10%
    over the last two depth steps.
    """
    depths = tuple(depths)
    vals = [ap_constant(w, p, d) for d in depths]
    growth = vals[-1] / vals[-3] if len(vals) >= 3 else vals[-1] / vals[0]
    return {"p": p, "depths": list(depths), "values": vals,
            "growth": growth, "finite": bool(growth < 1.1)}


def a_vec_p_check(w_list: Sequence[WeightSpec], exps: ExponentTuple, depth: int = 6) -> dict:
    """Estimate the constants in the multilinear A_{vec p} condition.

    For each j the weight ``w_j^{1 - p_j'}`` is tested against ``A_{N p_j}``
    (``w_j^{1/N}`` against ``A_1`` when ``p_j = 1``), and
    ``v = prod w_j^{p/p_j}`` against ``A_{N p}``. Each entry also carries the
    estimate at ``depth + 2`` so divergence can be read off.
    """
    N = exps.n_linear
    if len(w_list) != N:
        raise DomainError(f"expected {N} weights, got {len(w_list)}")
    entries = []
    for j, (w, pj) in enumerate(zip(w_list, exps.p_list)):
        if pj == 1:
            wt, cls_p = weight_power(w, 1.0 / N), 1.0
        else:
            wt, cls_p = weight_power(w, 1.0 - exps.dual(j)), N * pj
        entries.append(_ap_entry(f"w{j + 1}", wt, cls_p, depth))
    v = weight_product(list(w_list), [exps.p / pj for pj in exps.p_list])
    entries.append(_ap_entry("v", v, N * exps.p, depth))
    return {"entries": entries, "v": v, "finite": all(e["finite"] for e in entries)}


def _ap_entry(name, w, cls_p, depth):
    c0 = ap_constant(w, cls_p, depth)
    c2 = ap_constant(w, cls_p, depth + 2)
    return {"name": name, "weight": w.name, "class_p": cls_p, "constant": c0,
            "refined": c2, "finite": bool(c2 / c0 < 1.1)}


# -- approximate identity h_n(x) = n^d h(n x) ------------------------------

def approx_identity_kernel(n: int, grid: LineGrid) -> GridFunction:
    """Samples of ``h_n`` on a line grid; ``h`` is the tensor unit-mass bump."""
    vals = np.ones(grid.shape)
    for c in grid.coords():
        vals = vals * n * bump_profile(n * c)
    return GridFunction(grid, vals)


@lru_cache(maxsize=None)
def _gl_nodes(count: int = 400):
    return np.polynomial.legendre.leggauss(count)


def approx_identity_multiplier(n: int, xi) -> np.ndarray:
    """``hat h_n(xi) = prod_i hat b(xi_i / n)`` by Gauss-Legendre quadrature.

    ``xi`` has shape (M, d) or (M,) for d = 1.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 1:
        xi = xi[:, None]
    t, wts = _gl_nodes()
    b = bump_profile(t) * wts
    out = np.ones(len(xi))
    for ax in range(xi.shape[1]):
        out = out * (np.cos(2 * np.pi * np.outer(xi[:, ax] / n, t)) @ b)
    return out


def approx_identity_norm(w: WeightSpec, p: float, n: int, grid: TorusGrid | None = None,
                         max_freq: int = 8, restarts: int = 4, steps: int = 200,
                         seed: int = 0) -> float:
    """Lower estimate of the norm of ``f -> h_n * f`` on ``L^p(T^d, w)``.

    The operator acts on trigonometric polynomials by multiplying their
    coefficients by ``hat h_n(k)``; the ratio is maximized by the
    perturbation ascent from a constant start and random restarts.
    """
    from ._search import ascent
    from .norms import lp_norm

    if w.dim not in (1, 2):
        raise DomainError("weights must be 1- or 2-dimensional")
    grid = grid or TorusGrid(w.dim, 64 if w.dim == 1 else 32)
    ws = w.sample(grid)
    if not ws.min() > 0:
        raise DomainError("approx_identity_norm needs a weight with positive minimum")
    shape = (2 * max_freq + 1,) * w.dim
    freqs = np.stack(np.meshgrid(*([np.arange(-max_freq, max_freq + 1)] * w.dim),
                                 indexing="ij"), axis=-1).reshape(-1, w.dim)
    mult = approx_identity_multiplier(n, freqs).reshape(shape)

    def ratio(x):
        g = TrigPolynomial(x[0])
        num = lp_norm(synthesize(TrigPolynomial(x[0] * mult), grid), p, w)
        den = lp_norm(synthesize(g, grid), p, w)
        return num / den if den > 0 else -np.inf

    master = np.random.SeedSequence(seed)
    best = -np.inf
    for r, child in enumerate(master.spawn(restarts)):
        rng = np.random.default_rng(child)
        if r == 0:
            start = np.zeros(shape, dtype=complex)
            start[(max_freq,) * w.dim] = 1.0
        else:
            start = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        val, _, _ = ascent(ratio, [start], steps, rng)
        best = max(best, val)
    return float(best)


def random_step_weight(rng: np.random.Generator, dim: int = 1, cells: int = 8,
                       low: float = 0.1, high: float = 10.0) -> WeightSpec:
    """Step weight with log-uniform levels in [low, high]."""
    lv = np.exp(rng.uniform(np.log(low), np.log(high), size=(cells,) * dim))
    return step_weight(lv)
