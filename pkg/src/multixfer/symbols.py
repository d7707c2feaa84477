"""Multilinear symbols, their lattice restrictions, and numerical class checks.

A symbol on ``R^{Nd}`` is evaluated on arrays of shape ``(..., N*d)`` whose
last axis lists ``xi_1`` (d coordinates), then ``xi_2``, and so on.

Derivative conditions are probed by central finite differences at two step
sizes on log-spaced radii; a report says *consistent* or *inconsistent*,
which is evidence about the sampled region only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special
from scipy.interpolate import RegularGridInterpolator

from .errors import DomainError
from .functions import GridFunction, fourier_transform_at, line_fourier
from .spaces import ExponentTuple, FrequencyBox, LineGrid

__all__ = [
    "SymbolSpec",
    "SymbolFamily",
    "LatticeSymbol",
    "Profile",
    "LittlewoodPaleyWindow",
    "constant_symbol",
    "modulation_symbol",
    "separable_symbol",
    "closed_form_symbol",
    "tabulated_symbol",
    "kernel_symbol",
    "bump_symbol",
    "bessel_symbol",
    "half_space_symbol",
    "product_symbol",
    "scaled_symbol",
    "dilate",
    "gaussian_profile",
    "bump_profile_fn",
    "restrict_lattice",
    "dilate_family",
    "mollify",
    "normalized_check",
    "truncation_family",
    "cm_check",
    "hormander_class_check",
    "hs_norm",
    "hs_report",
    "estimate_order",
    "classify",
    "symbol_from_description",
    "multi_indices",
]

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class SymbolSpec:
    """A bounded function on ``R^{Nd}`` with a stored sup-norm bound."""

    dim: int
    arity: int
    evaluator: Evaluator
    bound: float
    label: str = "symbol"
    description: dict = field(default_factory=dict)

    @property
    def nvars(self) -> int:
        return self.dim * self.arity

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.nvars:
            raise DomainError(f"symbol expects points with last axis {self.nvars}, got {xi.shape}")
        out = np.asarray(self.evaluator(xi), dtype=complex)
        return np.broadcast_to(out, xi.shape[:-1]).copy() if out.shape != xi.shape[:-1] else out


@dataclass(frozen=True, eq=False)
class SymbolFamily:
    """Finite indexed family of symbols sharing dimension and arity."""

    members: tuple
    indices: tuple
    index_meaning: str = "index"

    def __post_init__(self):
        if not self.members:
            raise DomainError("a symbol family needs at least one member")
        if len({(m.dim, m.arity) for m in self.members}) != 1:
            raise DomainError("family members must share dim and arity")
        if len(self.indices) != len(self.members):
            raise DomainError("one index per member required")

    @property
    def dim(self) -> int:
        return self.members[0].dim

    @property
    def arity(self) -> int:
        return self.members[0].arity

    @property
    def bound(self) -> float:
        return max(m.bound for m in self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True, eq=False)
class LatticeSymbol:
    """Values of a symbol at the lattice points of ``[-K, K]^{Nd}``.

    ``values[k_1 + K, ..., k_N + K]`` with each ``k_l`` contributing ``d`` axes.
    """

    values: np.ndarray
    dim: int
    arity: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != self.dim * self.arity or len(set(v.shape)) != 1 or v.shape[0] % 2 != 1:
            raise DomainError(f"lattice table shape {v.shape} inconsistent with d={self.dim}, N={self.arity}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def max_freq(self) -> int:
        return (self.values.shape[0] - 1) // 2

    @property
    def sup(self) -> float:
        return float(np.abs(self.values).max())

    def __call__(self, *ks) -> complex:
        idx = np.concatenate([np.atleast_1d(k) for k in ks]).astype(int) + self.max_freq
        return complex(self.values[tuple(idx)])

    def scaled(self, c: complex) -> "LatticeSymbol":
        return LatticeSymbol(self.values * c, self.dim, self.arity)


# -- constructors -----------------------------------------------------------

def constant_symbol(c: complex = 1.0, dim: int = 1, arity: int = 2) -> SymbolSpec:
    c = complex(c)
    return SymbolSpec(dim, arity, lambda xi: np.full(xi.shape[:-1], c), abs(c),
                      f"const({c.real:g})" if c.imag == 0 else f"const({c})",
                      {"form": "constant", "value": c.real if c.imag == 0 else [c.real, c.imag]})


def modulation_symbol(shifts, dim: int = 1) -> SymbolSpec:
    """``exp(2 pi i sum_l a_l . xi_l)``; ``shifts`` has shape (N, d) or (N,)."""
    a = np.asarray(shifts, dtype=float).reshape(-1)
    if a.size % dim:
        raise DomainError("shift vector length must be a multiple of d")
    arity = a.size // dim
    return SymbolSpec(dim, arity, lambda xi: np.exp(2j * np.pi * (xi @ a)), 1.0,
                      "modulation(" + ",".join(f"{v:g}" for v in a) + ")",
                      {"form": "modulation", "shifts": a.tolist()})


def separable_symbol(factors: Sequence[Callable], bounds: Sequence[float], dim: int = 1,
                     label: str = "separable", description: dict | None = None) -> SymbolSpec:
    """``prod_l a_l(xi_l)``; each factor maps arrays (..., d) to complex (...)."""
    factors = tuple(factors)
    arity = len(factors)

    def ev(xi):
        out = np.ones(xi.shape[:-1], dtype=complex)
        for l, fac in enumerate(factors):
            out = out * fac(xi[..., l * dim:(l + 1) * dim])
        return out

    return SymbolSpec(dim, arity, ev, float(np.prod(bounds)), label,
                      description or {"form": "separable"})


def closed_form_symbol(fn: Evaluator, bound: float, dim: int = 1, arity: int = 2,
                       label: str = "closed_form", description: dict | None = None) -> SymbolSpec:
    return SymbolSpec(dim, arity, fn, float(bound), label, description or {"form": label})


def tabulated_symbol(axes: Sequence[np.ndarray], table: np.ndarray, dim: int = 1) -> SymbolSpec:
    """Multilinear interpolation of samples on a rectilinear frequency grid (0 outside)."""
    table = np.asarray(table, dtype=complex)
    arity = table.ndim // dim
    re = RegularGridInterpolator(tuple(axes), table.real, bounds_error=False, fill_value=0.0)
    im = RegularGridInterpolator(tuple(axes), table.imag, bounds_error=False, fill_value=0.0)

    def ev(xi):
        flat = xi.reshape(-1, xi.shape[-1])
        return (re(flat) + 1j * im(flat)).reshape(xi.shape[:-1])

    return SymbolSpec(dim, arity, ev, float(np.abs(table).max()), "tabulated", {"form": "tabulated"})


def kernel_symbol(K: GridFunction, dim: int = 1) -> SymbolSpec:
    """Fourier transform of a kernel sampled on a line grid of dimension ``N d``."""
    if K.is_periodic:
        raise DomainError("kernel must live on a line grid")
    arity = K.dim // dim
    if arity * dim != K.dim:
        raise DomainError("kernel dimension must be a multiple of d")
    l1 = float(np.abs(K.values).sum() * K.grid.cell)

    def ev(xi):
        flat = xi.reshape(-1, xi.shape[-1])
        return fourier_transform_at(K, flat).reshape(xi.shape[:-1])

    sym = SymbolSpec(dim, arity, ev, l1, "kernel", {"form": "kernel"})
    object.__setattr__(sym, "kernel", K)
    return sym


def _bump_peak1(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def bump_symbol(radius: float = 3.0, dim: int = 1, arity: int = 2) -> SymbolSpec:
    """Radial C-infinity bump with peak 1 supported in ``|xi| < radius``."""
    return SymbolSpec(dim, arity, lambda xi: _bump_peak1(np.linalg.norm(xi, axis=-1) / radius),
                      1.0, f"bump({radius:g})", {"form": "bump", "radius": radius})


def bessel_symbol(order: float, dim: int = 1, arity: int = 2) -> SymbolSpec:
    """``(1 + |xi|^2)^{order/2}`` (bounded for ``order <= 0``)."""
    bound = 1.0 if order <= 0 else math.inf
    return SymbolSpec(dim, arity, lambda xi: (1.0 + np.sum(xi**2, axis=-1)) ** (order / 2.0),
                      bound, f"bessel({order:g})", {"form": "bessel", "order": order})


def half_space_symbol(dim: int = 1, arity: int = 2) -> SymbolSpec:
    """Indicator of ``{xi_1 first coordinate >= 0}`` (value 1 on the boundary)."""
    return SymbolSpec(dim, arity, lambda xi: (xi[..., 0] >= 0).astype(float), 1.0,
                      "half_space", {"form": "half_space"})


def product_symbol(m1: SymbolSpec, m2: SymbolSpec) -> SymbolSpec:
    if (m1.dim, m1.arity) != (m2.dim, m2.arity):
        raise DomainError("product of symbols with different shapes")
    return SymbolSpec(m1.dim, m1.arity, lambda xi: m1(xi) * m2(xi), m1.bound * m2.bound,
                      f"({m1.label})*({m2.label})", {"form": "product"})


def scaled_symbol(m: SymbolSpec, c: float) -> SymbolSpec:
    return SymbolSpec(m.dim, m.arity, lambda xi: c * m(xi), abs(c) * m.bound,
                      f"{c:g}*{m.label}", {"form": "scaled", "c": c, "base": m.description})


def dilate(m: SymbolSpec, r: float) -> SymbolSpec:
    """``xi -> m(r xi)``."""
    if not r > 0:
        raise DomainError(f"dilation factor must be positive, got {r}")
    if r == 1:
        return m
    return SymbolSpec(m.dim, m.arity, lambda xi: m(r * xi), m.bound, f"{m.label}@r={r:g}",
                      {"form": "dilation", "r": r, "base": m.description})


def dilate_family(m: SymbolSpec, r_list: Sequence[float]) -> SymbolFamily:
    r_list = tuple(float(r) for r in r_list)
    for r in r_list:
        if not r > 0:
            raise DomainError(f"dilation factor must be positive, got {r}")
    return SymbolFamily(tuple(dilate(m, r) for r in r_list), r_list, "dilation r")


# -- profiles for mollification ---------------------------------------------

@dataclass(frozen=True, eq=False)
class Profile:
    """Integrable function on ``R^d`` supported in ``[lo, hi]^d``, with quadrature nodes."""

    fn: Callable[[np.ndarray], np.ndarray]
    lo: float
    hi: float
    dim: int = 1
    nodes: int = 64
    label: str = "profile"

    def quadrature(self):
        """Tensor Gauss-Legendre nodes (Q, d) and weights (Q,) on the support box."""
        t, w = np.polynomial.legendre.leggauss(self.nodes)
        x = 0.5 * (self.hi - self.lo) * t + 0.5 * (self.hi + self.lo)
        w = 0.5 * (self.hi - self.lo) * w
        pts = np.array(list(itertools.product(x, repeat=self.dim)))
        wts = np.prod(np.array(list(itertools.product(w, repeat=self.dim))), axis=1)
        return pts, wts

    def l1_mass(self) -> float:
        pts, wts = self.quadrature()
        return float(np.sum(wts * np.abs(self.fn(pts))))


_GAUSS_TAIL_Z = float(special.erfcinv(1e-8) * math.sqrt(2.0))


def gaussian_profile(sigma: float = 1.0, center: float = 0.0, amplitude: float = 1.0,
                     dim: int = 1, nodes: int = 64) -> Profile:
    """Unit-mass Gaussian (times ``amplitude``) truncated where the tail mass is 1e-8."""
    norm = amplitude / (math.sqrt(2 * math.pi) * sigma) ** dim

    def fn(x):
        x = np.asarray(x, dtype=float)
        return norm * np.exp(-np.sum((x - center) ** 2, axis=-1) / (2 * sigma**2))

    half = _GAUSS_TAIL_Z * sigma
    return Profile(fn, center - half, center + half, dim, nodes, f"gauss({sigma:g})")


def bump_profile_fn(radius: float = 1.0, dim: int = 1, nodes: int = 64) -> Profile:
    """Tensor C-infinity bump of peak 1 supported in ``[-radius, radius]^d``."""
    def fn(x):
        x = np.asarray(x, dtype=float)
        return np.prod(_bump_peak1(x / radius), axis=-1)

    return Profile(fn, -radius, radius, dim, nodes, f"bump({radius:g})")


def mollify(m: SymbolSpec, phi: Profile, chunk: int = 64, quadrature=None) -> SymbolSpec:
    """``(phi (x) ... (x) phi) * m`` by tensor Gauss-Legendre quadrature.

    The stored bound is ``||phi||_1^N bound(m)`` with the L1 mass computed by
    the same quadrature, so evaluations respect it exactly. ``quadrature``
    overrides the Gauss-Legendre nodes with explicit ``(points, weights)``.
    """
    if phi.dim != m.dim:
        raise DomainError("profile/symbol dimension mismatch")
    pts, wts = phi.quadrature() if quadrature is None else quadrature
    pts = np.asarray(pts, dtype=float).reshape(len(wts), phi.dim)
    cw = wts * phi.fn(pts)
    N, d = m.arity, m.dim
    combos = np.array(list(itertools.product(range(len(pts)), repeat=N)))
    shifts = np.concatenate([pts[combos[:, l]] for l in range(N)], axis=1)
    coef = np.prod(cw[combos], axis=1)
    keep = coef != 0
    shifts, coef = shifts[keep], coef[keep]

    def ev(xi):
        flat = xi.reshape(-1, xi.shape[-1])
        out = np.empty(len(flat), dtype=complex)
        for s in range(0, len(flat), chunk):
            block = flat[s:s + chunk, None, :] - shifts[None, :, :]
            out[s:s + chunk] = m(block) @ coef
        return out.reshape(xi.shape[:-1])

    bound = float(np.sum(wts * np.abs(phi.fn(pts)))) ** N * m.bound
    return SymbolSpec(d, N, ev, bound, f"mollify({m.label},{phi.label})",
                      {"form": "mollified", "base": m.description, "profile": phi.label})


# -- lattice restriction ----------------------------------------------------

def lattice_points(box: FrequencyBox, arity: int) -> np.ndarray:
    """All points of ``([-K, K]^d)^N`` in C order, shape (M, N d)."""
    r = np.arange(-box.max_freq, box.max_freq + 1)
    grids = np.meshgrid(*([r] * (box.dim * arity)), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def restrict_lattice(m: SymbolSpec, box: FrequencyBox) -> LatticeSymbol:
    """Tabulate ``m(k_1, ..., k_N)`` for every lattice point in the box."""
    if box.dim != m.dim:
        raise DomainError(f"box dimension {box.dim} != symbol dimension {m.dim}")
    pts = lattice_points(box, m.arity).astype(float)
    vals = m(pts).reshape((box.side,) * m.nvars)
    return LatticeSymbol(vals, m.dim, m.arity)


# -- normalization ----------------------------------------------------------

def normalized_check(m: SymbolSpec, lattice_points, n_schedule=(1, 2, 4, 8, 16, 32, 64, 128),
                     tol: float = 1e-3, sigma: float = 1.0, nodes: int = 48) -> dict:
    """Track ``|m * Phi_n(k) - m(k)|`` along ``n_schedule``.

    ``Phi_n`` is the tensor approximate identity ``prod_l n^d g(n xi_l)`` with
    ``g`` a unit-mass Gaussian of width ``sigma`` (the Fourier side of a
    dilated profile with nonnegative unit-mass transform). Quadrature weights
    are renormalized to unit mass so constants are reproduced exactly.

    A point is *normalized-consistent* when its last error is below ``tol``
    and the errors over the second half of the schedule are nonincreasing.
    """
    pts = np.atleast_2d(np.asarray(lattice_points, dtype=float))
    if pts.shape[1] != m.nvars:
        raise DomainError(f"lattice points must have {m.nvars} coordinates")
    base = m(pts)
    errors = []
    for n in n_schedule:
        prof = gaussian_profile(sigma / n, dim=m.dim, nodes=nodes)
        q_pts, q_w = prof.quadrature()
        mass = float(np.sum(q_w * prof.fn(q_pts)))
        moll = mollify(m, prof)
        errors.append(np.abs(moll(pts) / mass ** m.arity - base))
    errors = np.array(errors).T
    per_point = []
    all_ok = True
    half = len(n_schedule) // 2
    for p, err in zip(pts, errors):
        tail = err[half:]
        mono = bool(np.all(np.diff(tail) <= 1e-12 + 1e-9 * tail[:-1]))
        ok = bool(err[-1] < tol and mono)
        all_ok &= ok
        per_point.append({"point": p.tolist(), "errors": err.tolist(),
                          "tail_nonincreasing": mono, "consistent": ok})
    return {"n_schedule": list(n_schedule), "tol": tol, "points": per_point,
            "verdict": "normalized-consistent" if all_ok else "not-normalized"}


# -- truncated kernels -------------------------------------------------------

def truncation_family(K: GridFunction, j_range: Sequence[int], dim: int = 1) -> SymbolFamily:
    """Symbols of ``K chi_{|y| > 2^-j}`` for ``j`` in ``j_range``."""
    radius = np.sqrt(sum(c**2 for c in K.grid.coords()))
    members = []
    for j in j_range:
        if j < 0:
            raise DomainError(f"truncation index must be >= 0, got {j}")
        Kj = GridFunction(K.grid, np.where(radius > 2.0 ** (-j), K.values, 0))
        sym = kernel_symbol(Kj, dim)
        members.append(SymbolSpec(sym.dim, sym.arity, sym.evaluator, sym.bound, f"trunc(j={j})",
                                  {"form": "truncated_kernel", "j": j}))
    return SymbolFamily(tuple(members), tuple(int(j) for j in j_range), "truncation level j")


# -- finite-difference class checks -----------------------------------------

def multi_indices(nvars: int, max_order: int = 2) -> list[tuple]:
    """All derivative multi-indices over ``nvars`` coordinates of total order <= max_order."""
    out = []
    for total in range(max_order + 1):
        for c in itertools.product(range(total + 1), repeat=nvars):
            if sum(c) == total:
                out.append(tuple(c))
    return out


def _fd(m: SymbolSpec, x: np.ndarray, order: tuple, h: np.ndarray) -> np.ndarray:
    """Central finite difference of ``m`` at points ``x`` (M, nvars), steps ``h`` (M,)."""
    axes = [i for i, a in enumerate(order) for _ in range(a)]
    if not axes:
        return m(x)
    if len(axes) == 1:
        e = np.zeros(x.shape[1]); e[axes[0]] = 1
        return (m(x + h[:, None] * e) - m(x - h[:, None] * e)) / (2 * h)
    i, j = axes
    if i == j:
        e = np.zeros(x.shape[1]); e[i] = 1
        return (m(x + h[:, None] * e) - 2 * m(x) + m(x - h[:, None] * e)) / h**2
    ei = np.zeros(x.shape[1]); ei[i] = 1
    ej = np.zeros(x.shape[1]); ej[j] = 1
    hh = h[:, None]
    return (m(x + hh * (ei + ej)) - m(x + hh * (ei - ej)) - m(x - hh * (ei - ej))
            + m(x - hh * (ei + ej))) / (4 * h**2)


def _directions(nvars: int, count: int, seed: int) -> np.ndarray:
    """Unit vectors whose coordinates all have modulus >= 0.1/sqrt(nvars)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        u = rng.standard_normal(nvars)
        u /= np.linalg.norm(u)
        if np.all(np.abs(u) >= 0.1 / np.sqrt(nvars)):
            out.append(u)
    return np.array(out)


def _slope(r, c, floor):
    y = np.log(np.maximum(c, floor))
    return float(np.polyfit(np.log(r), y, 1)[0])


def _derivative_report(m, orders, weight_fn, radii, sample_count, seed, rel_step,
                       check_low_end, slope_tol, gate, inhomogeneous=False):
    if orders is None:
        orders = multi_indices(m.nvars, 2)
    orders = [tuple(int(a) for a in o) for o in orders]
    for o in orders:
        if len(o) != m.nvars or sum(o) > 2 or min(o) < 0:
            raise DomainError(f"order {o} must have {m.nvars} nonnegative entries of total <= 2")
    radii = np.asarray(radii, dtype=float)
    dirs = _directions(m.nvars, sample_count, seed)
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, m.nvars)
    rad = np.repeat(radii, len(dirs))
    out = {}
    ok_all = True
    for o in orders:
        h = rel_step * (1.0 + rad if inhomogeneous else rad)
        d1 = _fd(m, pts, o, h)
        d2 = _fd(m, pts, o, h / 2)
        rich = d2 + (d2 - d1) / 3.0
        wgt = weight_fn(pts, sum(o))
        q1 = np.abs(d1) * wgt
        q = np.abs(rich) * wgt
        # step sizes must agree wherever the weighted derivative is not negligible
        floor = 1e-6 * max(1.0, float(np.nanmax(q)) if q.size else 1.0)
        unstable = int(np.sum(np.abs(d1 - d2) * wgt > gate * q + floor))
        per_r = q.reshape(len(radii), -1).max(axis=1)
        per_r1 = q1.reshape(len(radii), -1).max(axis=1)
        floor = 1e-12 * max(1.0, float(per_r.max()))
        k = min(3, len(radii))
        slope_hi = _slope(radii[-k:], per_r[-k:], floor)
        slope_lo = _slope(radii[:k], per_r[:k], floor) if check_low_end else 0.0
        grows = slope_hi > slope_tol or (check_low_end and slope_lo < -slope_tol)
        consistent = bool(np.all(np.isfinite(q)) and not grows and unstable == 0)
        ok_all &= consistent
        sup = float(per_r.max())
        sup1 = float(per_r1.max())
        out[str(o)] = {"order": list(o), "sup": sup, "sup_coarse_step": sup1,
                       "step_rel_change": abs(sup - sup1) / max(sup, 1e-300) if sup > 0 else 0.0,
                       "by_radius": per_r.tolist(), "slope_high": slope_hi,
                       "slope_low": slope_lo, "unstable_points": unstable,
                       "consistent": consistent}
    return {"radii": radii.tolist(), "orders": out, "consistent": bool(ok_all)}


def _slot_norms(xi, dim, arity):
    return np.stack([np.linalg.norm(xi[..., l * dim:(l + 1) * dim], axis=-1)
                     for l in range(arity)], axis=-1)


def cm_check(m: SymbolSpec, orders=None, sample_count: int = 16, radii=None, seed: int = 0,
             rel_step: float = 2e-3, slope_tol: float = 0.1, gate: float = 0.05) -> dict:
    """Estimate ``C_alpha = sup |d^alpha m| (|xi_1| + ... + |xi_N|)^{|alpha|}``.

    Sampling runs along ``sample_count`` generic directions at ``radii``
    (default 1e-3..1e3). An order is *consistent* when the per-radius maxima
    do not grow at either end (log-log slope within ``slope_tol``) and the two
    step sizes agree to ``gate`` relative error at every sample.
    """
    radii = np.geomspace(1e-3, 1e3, 13) if radii is None else radii

    def weight(x, k):
        return np.sum(_slot_norms(x, m.dim, m.arity), axis=-1) ** k

    rep = _derivative_report(m, orders, weight, radii, sample_count, seed, rel_step,
                             True, slope_tol, gate)
    rep["kind"] = "coifman-meyer"
    rep["verdict"] = "consistent" if rep["consistent"] else "inconsistent"
    return rep


def hormander_class_check(m: SymbolSpec, m_order: float, rho: float, orders=None,
                          sample_count: int = 16, radii=None, seed: int = 0,
                          rel_step: float = 2e-3, slope_tol: float = 0.1,
                          gate: float = 0.05) -> dict:
    """Estimate ``sup |d^alpha m| (1 + sum |xi_l|)^{-m_order + rho |alpha|}``."""
    if not 0 <= rho <= 1:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    radii = np.geomspace(1e-3, 1e4, 15) if radii is None else radii

    def weight(x, k):
        return (1.0 + np.sum(_slot_norms(x, m.dim, m.arity), axis=-1)) ** (-m_order + rho * k)

    rep = _derivative_report(m, orders, weight, radii, sample_count, seed, rel_step,
                             True, slope_tol, gate, inhomogeneous=True)
    rep.update(kind="hormander", m_order=m_order, rho=rho,
               verdict="consistent" if rep["consistent"] else "inconsistent")
    return rep


def estimate_order(m: SymbolSpec, sample_count: int = 16, seed: int = 0) -> float:
    """Growth exponent of ``max |m|`` against ``1 + |xi|`` at large radii (2 decimals)."""
    radii = np.array([1e3, 1e4])
    dirs = _directions(m.nvars, sample_count, seed)
    vals = [np.abs(m(r * dirs)).max() for r in radii]
    if min(vals) == 0:
        return -math.inf
    slope = math.log(vals[1] / vals[0]) / math.log((1 + radii[1]) / (1 + radii[0]))
    return round(slope, 2)


# -- Littlewood-Paley window and Sobolev norms --------------------------------

def _smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class LittlewoodPaleyWindow:
    """Radial window ``psi(xi) = chi(|xi|) - chi(2|xi|)`` on ``R^nvars``.

    ``chi`` is 1 on [0, 1] and 0 on [2, inf), so ``psi`` lives on the annulus
    ``1/2 <= |xi| <= 2`` and the dyadic sum telescopes to 1 off the origin.
    """

    nvars: int = 2

    @staticmethod
    def chi(r):
        return _smooth_step(2.0 - np.asarray(r, dtype=float))

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        return self.chi(r) - self.chi(2.0 * r)

    def __call__(self, xi) -> np.ndarray:
        return self.radial(np.linalg.norm(np.asarray(xi, dtype=float), axis=-1))

    def partition_error(self, xi, kmax: int = 60) -> np.ndarray:
        """``|sum_{|k| <= kmax} psi(xi 2^-k) - 1|`` at the given points."""
        r = np.linalg.norm(np.asarray(xi, dtype=float), axis=-1)
        total = sum(self.radial(r * 2.0 ** (-k)) for k in range(-kmax, kmax + 1))
        return np.abs(total - 1.0)

    def support_ok(self, xi) -> bool:
        r = np.linalg.norm(np.asarray(xi, dtype=float), axis=-1)
        v = self(xi)
        return bool(np.all(v[(r < 0.5) | (r > 2.0)] == 0))


@lru_cache(maxsize=16)
def _hs_grid(nvars: int, resolution: int, half_width: float):
    g = LineGrid(nvars, half_width, resolution)
    pts = np.stack([c.ravel() for c in g.coords()], axis=1)
    dual = g.dual()
    dc = dual.coords()
    return g, pts, dual, dc


def _hs_integrand(m, k, smoothness, window, resolution, half_width):
    if window.nvars != m.nvars:
        raise DomainError(f"window has {window.nvars} variables, symbol has {m.nvars}")
    g, pts, dual, dc = _hs_grid(m.nvars, resolution, half_width)
    vals = m((2.0**k) * pts) * window(pts)
    F = line_fourier(GridFunction(g, vals.reshape(g.shape)))
    if np.ndim(smoothness) == 0:
        wgt = (1.0 + sum(c**2 for c in dc)) ** float(smoothness)
    else:
        s = tuple(float(v) for v in smoothness)
        if len(s) != m.arity:
            raise DomainError(f"need {m.arity} smoothness indices, got {len(s)}")
        wgt = np.ones(dual.shape)
        for l, sl in enumerate(s):
            slot = sum(c**2 for c in dc[l * m.dim:(l + 1) * m.dim])
            wgt = wgt * (1.0 + slot) ** sl
    return wgt * np.abs(F.values) ** 2 * dual.cell, dual


def hs_norm(m: SymbolSpec, k: int, smoothness, window: LittlewoodPaleyWindow | None = None,
            resolution: int = 256, half_width: float = 4.0) -> float:
    """Sobolev norm of ``m_k(xi) = m(2^k xi) psi(xi)``.

    ``smoothness`` is a scalar ``s`` (weight ``(1 + |x|^2)^s``) or a tuple
    ``(s_1, ..., s_N)`` (weight ``prod_l (1 + |x_l|^2)^{s_l}``) applied to the
    Fourier transform of ``m_k``, computed on ``[-half_width, half_width]^{Nd}``.
    """
    window = window or LittlewoodPaleyWindow(m.nvars)
    integ, _ = _hs_integrand(m, k, smoothness, window, resolution, half_width)
    return float(np.sqrt(integ.sum()))


def hs_report(m: SymbolSpec, k_range, smoothness, window=None, resolution: int = 256,
              half_width: float = 4.0) -> dict:
    """Values over ``k_range``, their sup, and the Nyquist-shell share of the integral."""
    window = window or LittlewoodPaleyWindow(m.nvars)
    vals, tails = [], []
    for k in k_range:
        integ, dual = _hs_integrand(m, k, smoothness, window, resolution, half_width)
        total = integ.sum()
        edge = 0.75 * dual.half_width
        outer = np.zeros(dual.shape, dtype=bool)
        for c in dual.coords():
            outer |= np.abs(c) > edge
        vals.append(float(np.sqrt(total)))
        tails.append(float(integ[outer].sum() / total) if total > 0 else 0.0)
    return {"k": list(k_range), "values": vals, "sup": max(vals),
            "nyquist_tail_fraction": max(tails), "resolution": resolution}


# -- applicability of the boundedness criteria --------------------------------

def _weights_common(w_list):
    return all(w == w_list[0] for w in w_list)


def classify(m: SymbolSpec, exps: ExponentTuple, w_list, *, s: float | None = None,
             s_tuple=None, rho: float = 1.0, m_order: float | None = None,
             depth: int = 6, seed: int = 0, hs_resolution: int = 128) -> dict:
    """Report which periodic boundedness criteria apply to ``m`` with the given exponents and weights.

    Runs the Coifman-Meyer, Sobolev (isotropic and anisotropic) and
    ``S^m_{rho,0}`` probes together with the weight conditions each
    criterion needs; every verdict is numerical evidence.
    """
    from .weights import a_vec_p_check, ap_refinement, weight_power

    if exps.n_linear != m.arity:
        raise DomainError(f"symbol arity {m.arity} != number of exponents {exps.n_linear}")
    if len(w_list) != m.arity:
        raise DomainError(f"expected {m.arity} weights, got {len(w_list)}")
    N, d = m.arity, m.dim
    pl = exps.p_list
    p = exps.p
    common = _weights_common(w_list)
    w = w_list[0]
    depths = (depth - 2, depth - 1, depth, depth + 1, depth + 2)
    report = {"symbol": m.label, "exponents": list(pl), "p": p, "weights": [x.name for x in w_list]}

    # Coifman-Meyer
    cm = cm_check(m, seed=seed)
    p0 = min(pl)
    cm_entry = {"symbol_condition": cm["verdict"],
                "constants": {k: v["sup"] for k, v in cm["orders"].items()}, "p0": p0}
    reasons = []
    if cm["verdict"] != "consistent":
        reasons.append("derivative bounds not observed")
    if not common:
        reasons.append("requires a common weight")
    if all(v > 1 for v in pl):
        ap = ap_refinement(w, p0, depths)
        cm_entry["A_p0"] = ap
        if not ap["finite"]:
            reasons.append(f"weight fails A_{p0:g}")
    else:
        ap1 = ap_refinement(w, 1.0, depths)
        cm_entry["A_1"] = ap1
        if not ap1["finite"]:
            reasons.append("weight fails A_1")
    cm_entry["applies"] = not reasons
    cm_entry["reasons"] = reasons
    cm_entry["target"] = "L^p" if all(v > 1 for v in pl) else f"L^({1.0 / N:g},inf)"
    report["coifman_meyer"] = cm_entry

    # Hormander-Sobolev (isotropic)
    nd = N * d
    if s is None:
        s = 0.6 * nd
    hs_entry = {"s": s}
    reasons = []
    if not (nd / 2 < s <= nd):
        reasons.append("s outside (Nd/2, Nd]")
    if not all(v > 1 for v in pl):
        reasons.append("needs all p_l > 1")
    if nd <= 2:
        hs = hs_report(m, range(-6, 7), s, resolution=hs_resolution)
        hs_entry["sup_hs"] = hs["sup"]
        hs_entry["nyquist_tail_fraction"] = hs["nyquist_tail_fraction"]
        finite = bool(np.isfinite(hs["sup"]))
    else:
        finite = False
        reasons.append("Sobolev quadrature limited to N d <= 2")
    if not finite:
        reasons.append("Sobolev sup not finite")
    r = min(pl)
    branch = None
    if not reasons:
        if r > nd / s:
            ap = ap_refinement(w, s * r / N, depths)
            hs_entry["A_sr/N"] = ap
            branch = "r > Nd/s" if ap["finite"] and common else None
        crit = nd / s
        crit_dual = crit / (crit - 1) if crit > 1 else math.inf
        if branch is None and r < crit_dual and 1 < p < math.inf:
            pd = p / (p - 1)
            ap = ap_refinement(weight_power(w, 1 - pd), pd * s / nd, depths)
            hs_entry["A_p's/Nd"] = ap
            branch = "r < (Nd/s)'" if ap["finite"] and common else None
        if branch is None:
            reasons.append("weight/exponent branch conditions fail")
    hs_entry.update(applies=not reasons, branch=branch, reasons=reasons)
    report["hormander_sobolev"] = hs_entry

    # anisotropic Sobolev
    if s_tuple is None:
        s_tuple = tuple([0.6 * d] * N)
    an_entry = {"s": list(s_tuple)}
    reasons = []
    if any(not (d / 2 < sj <= d) for sj in s_tuple):
        reasons.append("s_j outside (d/2, d]")
    if not all(v > 1 for v in pl):
        reasons.append("needs all p_l > 1")
    if nd <= 2:
        hs = hs_report(m, range(-6, 7), tuple(s_tuple), resolution=hs_resolution)
        an_entry["sup_hs"] = hs["sup"]
    else:
        reasons.append("Sobolev quadrature limited to N d <= 2")
    if not reasons:
        aps = []
        for pj, sj, wj in zip(pl, s_tuple, w_list):
            if not pj > d / sj:
                reasons.append("p_j <= d/s_j")
                break
            aps.append(ap_refinement(wj, pj * sj / d, depths))
        an_entry["A_pjsj/d"] = aps
        if any(not a["finite"] for a in aps):
            reasons.append("some w_j fails A_{p_j s_j/d}")
    an_entry.update(applies=not reasons, reasons=reasons)
    report["anisotropic_sobolev"] = an_entry

    # S^m_{rho,0}
    if m_order is None:
        m_order = estimate_order(m, seed=seed)
    # compactly supported symbols lie in every class; probe a finite one
    order_used = max(m_order, -4.0) + 0.01
    hc = hormander_class_check(m, order_used, rho, seed=seed)
    sm_entry = {"m_order": m_order, "rho": rho, "symbol_condition": hc["verdict"],
                "constants": {k: v["sup"] for k, v in hc["orders"].items()}}
    reasons = []
    if hc["verdict"] != "consistent":
        reasons.append(f"not consistent with S^{m_order:g}_{rho:g},0")
    choice = None
    for cand in itertools.product(*[np.linspace(1.0, 2.0, 5)] * N):
        if any(not cj < qj for cj, qj in zip(cand, pl)):
            continue
        limit = (rho - 1) * sum(d / cj for cj in cand)
        if m_order < limit:
            choice = (cand, limit)
            break
    if choice is None:
        reasons.append("no p_j in [1,2] with p_j < q_j and m < (rho-1) sum d/p_j")
    else:
        cand, limit = choice
        sm_entry["p_inner"] = list(cand)
        sm_entry["order_limit"] = limit
        aps = [ap_refinement(wj, qj / cj, depths) for wj, qj, cj in zip(w_list, pl, cand)]
        sm_entry["A_qj/pj"] = aps
        if any(not a["finite"] for a in aps):
            reasons.append("some w_j fails A_{q_j/p_j}")
    sm_entry.update(applies=not reasons, reasons=reasons)
    report["hormander_class"] = sm_entry

    # S^0_{1,0} with A_{vec p}
    av_entry = {}
    reasons = []
    if not (m_order <= 0 and rho == 1 and hc["verdict"] == "consistent"):
        reasons.append("symbol not consistent with S^0_{1,0}")
    avp = a_vec_p_check(list(w_list), exps, depth)
    av_entry["constants"] = {e["name"]: e["constant"] for e in avp["entries"]}
    if not avp["finite"]:
        reasons.append("A_{vec p} condition fails")
    av_entry["target"] = "L^p" if all(v > 1 for v in pl) else "L^(p,inf)"
    av_entry.update(applies=not reasons, reasons=reasons)
    report["a_vec_p"] = av_entry

    names = ["coifman_meyer", "hormander_sobolev", "anisotropic_sobolev", "hormander_class", "a_vec_p"]
    report["applicable"] = [n for n in names if report[n]["applies"]]
    return report


# -- declarative construction -----------------------------------------------

def _factor(desc: dict):
    kind = desc.get("kind")
    if kind == "bump":
        R, c = float(desc.get("radius", 1.0)), float(desc.get("center", 0.0))
        return (lambda x: _bump_peak1((x[..., 0] - c) / R)), 1.0
    if kind == "gaussian":
        s = float(desc.get("sigma", 1.0))
        return (lambda x: np.exp(-x[..., 0] ** 2 / (2 * s * s))), 1.0
    if kind == "cos":
        f = float(desc.get("freq", 1.0))
        return (lambda x: np.cos(2 * np.pi * f * x[..., 0])), 1.0
    if kind == "sign":
        return (lambda x: np.sign(x[..., 0])), 1.0
    raise DomainError(f"unknown separable factor kind {kind!r}")


def symbol_from_description(desc: dict, dim: int = 1, arity: int = 2) -> SymbolSpec:
    """Build a symbol from a JSON-style description (see the README for forms)."""
    form = desc.get("form")
    if form == "constant":
        v = desc.get("value", 1.0)
        c = complex(*v) if isinstance(v, (list, tuple)) else complex(v)
        return constant_symbol(c, dim, arity)
    if form == "modulation":
        return modulation_symbol(desc["shifts"], dim)
    if form == "separable":
        facs = [_factor(f) for f in desc["factors"]]
        if dim != 1:
            raise DomainError("declarative separable symbols are one-dimensional")
        return separable_symbol([f for f, _ in facs], [b for _, b in facs], dim,
                                "separable", dict(desc))
    if form == "bump":
        return bump_symbol(float(desc.get("radius", 3.0)), dim, arity)
    if form == "bessel":
        return bessel_symbol(float(desc["order"]), dim, arity)
    if form == "half_space":
        return half_space_symbol(dim, arity)
    if form == "homogeneous_ratio":
        def ev(xi):
            n = _slot_norms(xi, dim, arity)
            return xi[..., 0] / np.sum(n, axis=-1)
        return closed_form_symbol(ev, 1.0, dim, arity, "homogeneous_ratio", dict(desc))
    if form == "dilation":
        return dilate(symbol_from_description(desc["base"], dim, arity), float(desc["r"]))
    raise DomainError(f"unknown symbol form {form!r}")
