"""Lower estimates of multilinear operator quasi-norms and the transference checks built on them."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._search import ascent
from .errors import DomainError, HypothesisViolation
from .functions import GridFunction, TrigPolynomial, synthesize
from .norms import lp_norm, weak_norm
from .operators import apply_kernel, apply_line, apply_periodic, periodic_coefficients
from .spaces import ExponentTuple, FrequencyBox, LineGrid, TorusGrid, weak_constant
from .symbols import (LatticeSymbol, SymbolFamily, SymbolSpec, kernel_symbol, normalized_check,
                      restrict_lattice)
from .weights import WeightSpec

__all__ = [
    "NormEstimate",
    "SearchConfig",
    "estimate_norm",
    "ratio",
    "khintchine_constants",
    "mz_test",
    "deperiodization_factor",
    "deperiodization_check",
    "line_ratio",
    "support_radius",
    "transference_report",
]


@dataclass(frozen=True)
class SearchConfig:
    """Restart/step budget and input parameterization for :func:`estimate_norm`."""

    restarts: int = 8
    steps: int = 200
    freq_box: FrequencyBox = field(default_factory=lambda: FrequencyBox(1, 8))
    scale: float = 0.5
    min_scale: float = 1e-4
    seed: int = 0
    grid_n: int | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.restarts < 1 or self.steps < 1:
            raise DomainError(f"restarts and steps must be >= 1, got {self.restarts}, {self.steps}")
        if self.jobs < 1:
            raise DomainError(f"jobs must be >= 1, got {self.jobs}")

    def grid(self, arity: int) -> TorusGrid:
        d, K = self.freq_box.dim, self.freq_box.max_freq
        n = self.grid_n
        if n is None:
            n = 8
            while n <= 4 * arity * K:
                n *= 2
            n = max(n, 512 if d == 1 else 64)
        return TorusGrid(d, n)


@dataclass
class NormEstimate:
    """Best ratio found, with the witness tuple realizing it."""

    value: float
    target: str
    witnesses: tuple
    trace: list
    seed: int
    restart_values: list = field(default_factory=list)
    restart_witnesses: list = field(default_factory=list)


def _members(op) -> list:
    if isinstance(op, SymbolFamily):
        return list(op.members)
    if isinstance(op, (SymbolSpec, LatticeSymbol)):
        return [op]
    return list(op)


def _lattice_members(op, box: FrequencyBox) -> list[LatticeSymbol]:
    out = []
    for m in _members(op):
        if isinstance(m, LatticeSymbol):
            if m.max_freq != box.max_freq or m.dim != box.dim:
                raise DomainError("lattice symbol box does not match the search box")
            out.append(m)
        else:
            out.append(restrict_lattice(m, box))
    return out


def _output_norm(vals: GridFunction, p: float, w, target: str) -> float:
    if target == "strong":
        return lp_norm(vals, p, w)
    if target == "weak":
        return weak_norm(vals, p, w)
    raise DomainError(f"target must be 'strong' or 'weak', got {target!r}")


def ratio(lattice: Sequence[LatticeSymbol], inputs: Sequence[TrigPolynomial], exps: ExponentTuple,
          w_out: WeightSpec | None, w_in: Sequence[WeightSpec | None], target: str,
          grid: TorusGrid) -> float:
    """``||sup_j |T_j(g)| ||_out / prod ||g_l||_{L^{p_l}(w_l)}`` on the torus (nan if an input is 0)."""
    den = 1.0
    for g, pl, wl in zip(inputs, exps.p_list, w_in):
        den *= lp_norm(synthesize(g, grid), pl, wl)
    if not den > 0:
        return math.nan
    best = None
    for m in lattice:
        v = np.abs(apply_periodic(m, inputs, grid).values)
        best = v if best is None else np.maximum(best, v)
    return _output_norm(GridFunction(grid, best), exps.p, w_out, target) / den


def _starts(r: int, rng, arity: int, box: FrequencyBox):
    shape = box.shape
    K = box.max_freq
    if r == 0:
        out = []
        for _ in range(arity):
            c = np.zeros(shape, dtype=complex)
            c[(K,) * box.dim] = 1.0
            out.append(c)
        return out
    if r == 1:
        out = []
        for _ in range(arity):
            c = np.zeros(shape, dtype=complex)
            c[tuple(rng.integers(0, 2 * K + 1, box.dim))] = 1.0
            out.append(c)
        return out
    return [rng.standard_normal(shape) + 1j * rng.standard_normal(shape) for _ in range(arity)]


def estimate_norm(op, exps: ExponentTuple, w_out: WeightSpec | None = None,
                  w_in: Sequence[WeightSpec | None] | None = None, target: str = "strong",
                  cfg: SearchConfig | None = None) -> NormEstimate:
    """Lower estimate of the (maximal) periodic operator norm by seeded ascent.

    ``op`` is a symbol, a lattice symbol, a family or a list of these; the
    output is ``sup_j |T_j|``. Restart 0 starts from constants, restart 1
    from single modes, the rest from random coefficients. Restart seeds come
    from ``SeedSequence(cfg.seed).spawn``, so results do not depend on
    ``cfg.jobs`` and adding restarts or steps never lowers the estimate.
    """
    cfg = cfg or SearchConfig()
    box = cfg.freq_box
    lattice = _lattice_members(op, box)
    N = lattice[0].arity
    if exps.n_linear != N:
        raise DomainError(f"operator is {N}-linear but {exps.n_linear} exponents were given")
    w_in = list(w_in) if w_in is not None else [None] * N
    if len(w_in) != N:
        raise DomainError(f"expected {N} input weights, got {len(w_in)}")
    if target not in ("strong", "weak"):
        raise DomainError(f"target must be 'strong' or 'weak', got {target!r}")
    grid = cfg.grid(N)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)

    def objective(arrs):
        return ratio(lattice, [TrigPolynomial(a) for a in arrs], exps, w_out, w_in, target, grid)

    def run(r):
        rng = np.random.default_rng(seeds[r])
        start = _starts(r, rng, N, box)
        return ascent(objective, start, cfg.steps, rng, cfg.scale, cfg.min_scale)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as ex:
            results = list(ex.map(run, range(cfg.restarts)))
    else:
        results = [run(r) for r in range(cfg.restarts)]

    valid = [(i, res) for i, res in enumerate(results) if np.isfinite(res[0])]
    if not valid:
        raise DomainError("no restart produced a nonzero witness")
    best_i, (best, inputs, _) = max(valid, key=lambda t: (t[1][0], -t[0]))
    trace, running, offset = [], -math.inf, 0
    for _, (_, _, tr) in sorted(valid, key=lambda t: t[0]):
        for it, v in tr:
            running = max(running, v)
            trace.append((offset + it, running))
        offset += cfg.steps + 1
    return NormEstimate(
        value=float(best), target=target,
        witnesses=tuple(TrigPolynomial(a) for a in inputs), trace=trace, seed=cfg.seed,
        restart_values=[float(r[0]) for r in results],
        restart_witnesses=[tuple(TrigPolynomial(a) for a in r[1]) for r in results])


# -- Marcinkiewicz-Zygmund ---------------------------------------------------

def _signs(k: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=k))) if k else np.ones((1, 0))


def khintchine_constants(values: np.ndarray, p: float) -> tuple[float, float]:
    """Empirical Khintchine constants for samples ``values`` of shape (K, X).

    Returns ``(A, B)`` with ``A = min_x`` and ``B = max_x`` of
    ``(E |sum_k r_k a_k(x)|^p)^{1/p} / (sum_k |a_k(x)|^2)^{1/2}`` over points
    with nonzero square function, by exhaustive enumeration of signs.
    """
    values = np.asarray(values)
    s = _signs(values.shape[0])
    mom = np.mean(np.abs(s @ values) ** p, axis=0) ** (1.0 / p)
    sq = np.sqrt(np.sum(np.abs(values) ** 2, axis=0))
    ok = sq > 1e-12 * max(1.0, float(sq.max(initial=0.0)))
    if not np.any(ok):
        return 1.0, 1.0
    r = mom[ok] / sq[ok]
    return float(r.min()), float(r.max())


def mz_test(ops: Sequence[LatticeSymbol], f_seq: Sequence[TrigPolynomial],
            g_seq: Sequence[TrigPolynomial], exps: ExponentTuple, norm_bound: float,
            grid: TorusGrid | None = None, tol: float = 1e-9) -> dict:
    """Square-function extension of a maximal bilinear bound on the torus.

    The left side is ``|| sup_j (sum_{k,l} |T_j(f_k, g_l)|^2)^{1/2} ||_p``;
    the right side is ``c N prod_l ||(sum_k |f_{l,k}|^2)^{1/2}||_{p_l}`` with
    ``c = B_{p_1} B_{p_2} / A_p`` from exhaustive sign enumeration on this
    instance (``A_p`` is the bilinear lower constant over all ``(j, x)``).
    """
    if exps.n_linear != 2:
        raise DomainError("mz_test is bilinear")
    p1, p2 = exps.p_list
    p = exps.p
    if p1 < p or p2 < p:
        raise HypothesisViolation(f"need p_1, p_2 >= p, got p_1={p1}, p_2={p2}, p={p}")
    if len(f_seq) > 4 or len(g_seq) > 4:
        raise DomainError("sequence lengths are limited to 4 (exhaustive sign enumeration)")
    if not ops:
        raise DomainError("mz_test needs at least one operator")
    if grid is None:
        grid = TorusGrid(ops[0].dim, 64 if ops[0].dim == 1 else 32)
    if not f_seq or not g_seq:
        return {"left": 0.0, "right": 0.0, "ratio": 0.0, "constant_c": 1.0, "A_p": 1.0,
                "B_p1": 1.0, "B_p2": 1.0, "pass": True}
    F = np.array([synthesize(f, grid).values.ravel() for f in f_seq])
    G = np.array([synthesize(g, grid).values.ravel() for g in g_seq])
    _, B1 = khintchine_constants(F, p1)
    _, B2 = khintchine_constants(G, p2)
    T = np.array([[[apply_periodic(m, [f, g], grid).values.ravel() for g in g_seq] for f in f_seq]
                  for m in ops])  # (J, K1, K2, X)
    s1, s2 = _signs(len(f_seq)), _signs(len(g_seq))
    A = math.inf
    sq = np.sqrt(np.sum(np.abs(T) ** 2, axis=(1, 2)))  # (J, X)
    for j in range(len(ops)):
        combos = np.einsum("ak,bl,klx->abx", s1, s2, T[j])
        mom = np.mean(np.abs(combos) ** p, axis=(0, 1)) ** (1.0 / p)
        ok = sq[j] > 1e-12 * max(1.0, float(sq[j].max()))
        if np.any(ok):
            A = min(A, float((mom[ok] / sq[j][ok]).min()))
    if not np.isfinite(A):
        A = 1.0
    c = B1 * B2 / A
    left = lp_norm(GridFunction(grid, sq.max(axis=0).reshape(grid.shape)), p)
    Sf = np.sqrt(np.sum(np.abs(F) ** 2, axis=0)).reshape(grid.shape)
    Sg = np.sqrt(np.sum(np.abs(G) ** 2, axis=0)).reshape(grid.shape)
    right = c * norm_bound * lp_norm(GridFunction(grid, Sf), p1) * lp_norm(GridFunction(grid, Sg), p2)
    rat = left / right if right > 0 else (0.0 if left == 0 else math.inf)
    return {"left": float(left), "right": float(right), "ratio": float(rat), "constant_c": c,
            "A_p": A, "B_p1": B1, "B_p2": B2, "norm_bound": norm_bound,
            "pass": bool(left <= right * (1 + tol) + tol)}


# -- de-periodization --------------------------------------------------------

def deperiodization_factor(r: float, s: float, d: int, p: float) -> float:
    """``((r + s)/s)^{d/p}``, the volume factor relating periodic and line ratios."""
    if not (r > 0 and s > 0 and p > 0):
        raise DomainError("r, s and p must be positive")
    return ((r + s) / s) ** (d / p)


def _support_half_width(K: GridFunction, d: int, N: int) -> float:
    nz = np.abs(K.values) > 0
    if not np.any(nz):
        return 0.0
    coords = K.grid.coords()
    return float(max(np.abs(c[nz]).max() for c in coords))


def deperiodization_check(K: GridFunction, g1: TrigPolynomial, g2: TrigPolynomial, r: float,
                          s_schedule=(4.0, 8.0, 16.0), p: float = 1.0, samples: int = 64,
                          seed: int = 0, points_per_unit: int | None = None,
                          periodic_norm: float | None = None) -> dict:
    """Check the pointwise identity behind the periodic-to-line transfer.

    (a) ``R_x T_K(g_1, g_2)(theta) = B_K(R_.g_1(theta) chi_{Q_{r+s}},
    R_.g_2(theta) chi_{Q_{r+s}})(x)`` at ``samples`` pairs with ``x`` in
    ``Q_s``: the left side is the periodic operator with symbol the Riemann
    transform of ``K`` (coefficient path), the right side the direct kernel
    sum over the truncated translated inputs.
    (b) the factor ``((r+s)/s)^{d/p}`` along ``s_schedule``, which must be
    nonincreasing toward 1; with ``periodic_norm`` the transferred constants
    ``factor * periodic_norm`` are reported too.
    """
    kg = K.grid
    if not isinstance(kg, LineGrid) or kg.dim != 2 * g1.dim:
        raise DomainError("kernel must live on a LineGrid of dimension 2d")
    d = g1.dim
    if d != 1:
        raise DomainError("deperiodization_check samples one-dimensional inputs")
    if _support_half_width(K, d, 2) >= r:
        raise DomainError(f"kernel support exceeds Q_{r:g} x Q_{r:g}")
    s_schedule = tuple(float(s) for s in s_schedule)
    if any(b <= a for a, b in zip(s_schedule, s_schedule[1:])):
        raise DomainError("s_schedule must be increasing")
    h = kg.spacing
    Kbox = max(1, g1.max_freq, g2.max_freq)
    sym = restrict_lattice(kernel_symbol(K, d), FrequencyBox(d, Kbox))
    out_poly = periodic_coefficients(sym, [g1.padded(Kbox), g2.padded(Kbox)])
    rng = np.random.default_rng(seed)
    s0 = s_schedule[0]
    # input grid covering Q_{r+s0} with the kernel spacing
    half = kg.half_width
    while half < r + s0 + kg.half_width:
        half *= 2
    grid = LineGrid(d, half, int(round(2 * half / h)))
    z = grid.axis()
    inside = np.abs(z) < r + s0
    errs = []
    for _ in range(samples):
        j = int(rng.integers(np.ceil((-s0 + half) / h), np.floor((s0 + half) / h)))
        x = z[j]
        if abs(x) >= s0:
            continue
        theta = float(rng.random())
        lhs = complex(out_poly(np.array([x + theta]))[0])
        G1 = GridFunction(grid, np.where(inside, g1(z + theta), 0))
        G2 = GridFunction(grid, np.where(inside, g2(z + theta), 0))
        rhs = complex(apply_kernel(K, [G1, G2], at=[j])[0])
        errs.append(abs(lhs - rhs))
    factors = [deperiodization_factor(r, s, d, p) for s in s_schedule]
    mono = all(b <= a for a, b in zip(factors, factors[1:]))
    rep = {"max_identity_error": float(max(errs)) if errs else 0.0, "pairs": len(errs),
           "s_schedule": list(s_schedule), "factors": factors, "factors_nonincreasing": mono,
           "limit": 1.0}
    if periodic_norm is not None:
        rep["transferred_constants"] = [f * periodic_norm for f in factors]
    return rep


# -- transference -------------------------------------------------------------

def support_radius(m: SymbolSpec) -> float:
    """Euclidean radius containing the support of ``m`` when known from its description."""
    desc = m.description
    form = desc.get("form")
    if form == "bump":
        return float(desc["radius"])
    if form == "dilation":
        inner = SymbolSpec(m.dim, m.arity, m.evaluator, m.bound, m.label, desc["base"])
        return support_radius(inner) / float(desc["r"])
    return math.inf


def line_ratio(members: Sequence[SymbolSpec], witness: Sequence[TrigPolynomial], exps: ExponentTuple,
               w_out, w_in, target: str, s: float, points_per_unit: int = 32,
               margin: float = 2.0) -> dict:
    """Line-side ratio of the de-periodized witness ``g_l chi_{Q_s}``.

    The line grid has spacing ``1/points_per_unit`` and half-width the
    smallest power of two covering ``s + margin``; frequencies are cut off at
    the members' known support radius.
    """
    d = witness[0].dim
    half = 1.0
    while half < s + margin:
        half *= 2
    grid = LineGrid(d, half, int(2 * half * points_per_unit))
    coords = grid.coords()
    inside = np.ones(grid.shape, dtype=bool)
    pts = np.stack([c.ravel() for c in coords], axis=1)
    for c in coords:
        inside &= np.abs(c) < s
    fs = [GridFunction(grid, np.where(inside, g(pts).reshape(grid.shape), 0)) for g in witness]
    radius = max(support_radius(m) for m in members)
    cutoff = None if not np.isfinite(radius) else radius
    best = None
    for m in members:
        v = np.abs(apply_line(m, fs, cutoff=cutoff).values)
        best = v if best is None else np.maximum(best, v)
    den = 1.0
    for f, pl, wl in zip(fs, exps.p_list, w_in):
        den *= lp_norm(f, pl, wl)
    num = _output_norm(GridFunction(grid, best), exps.p, w_out, target)
    return {"s": s, "ratio": num / den, "half_width": half, "n": grid.n_per_axis, "cutoff": cutoff}


def _check_points(box: FrequencyBox, arity: int, count: int = 9) -> np.ndarray:
    K = box.max_freq
    picks = [-K, 0, K]
    pts = list(itertools.product(picks, repeat=box.dim * arity))
    return np.array(pts[:count] if len(pts) > count else pts, dtype=float)


def transference_report(family, exps: ExponentTuple, w: WeightSpec | None = None,
                        w_list: Sequence[WeightSpec | None] | None = None, target: str = "strong",
                        cfg: SearchConfig | None = None, s_schedule=(4.0, 8.0, 16.0),
                        tol: float = 0.05, witnesses: int = 3, points_per_unit: int = 32,
                        normalized_tol: float = 1e-3) -> dict:
    """Compare periodic and line maximal-operator lower estimates through their witnesses.

    ``N_T`` is the periodic estimate; each of the ``witnesses`` best restart
    witnesses is de-periodized as ``g chi_{Q_s}`` for ``s`` in ``s_schedule``
    and ``N_R`` is the largest line ratio seen. ``rho = N_T / (c N_R)`` with
    ``c = 1`` (strong) or ``weak_constant(p) 2^{1/p}`` (weak). Both estimates
    are lower bounds: the check realizes the witness transfer of the proof,
    not a comparison of true norms.
    """
    cfg = cfg or SearchConfig()
    members = _members(family)
    if any(not isinstance(m, SymbolSpec) for m in members):
        raise DomainError("transference needs symbols on R^{Nd}")
    N = members[0].arity
    w_list = list(w_list) if w_list is not None else [None] * N
    pts = _check_points(cfg.freq_box, N)
    norm_reports = []
    for m in members:
        rep = normalized_check(m, pts, tol=normalized_tol)
        if rep["verdict"] != "normalized-consistent":
            bad = next(q for q in rep["points"] if not q["consistent"])
            raise DomainError(f"member {m.label} is not normalized at lattice point {bad['point']}")
        norm_reports.append(rep["verdict"])
    est = estimate_norm(members, exps, w, w_list, target, cfg)
    c_weak = weak_constant(exps.p)
    c = 1.0 if target == "strong" else c_weak * 2.0 ** (1.0 / exps.p)
    order = np.argsort(-np.array(est.restart_values), kind="stable")[:witnesses]
    wit_reports = []
    n_r = 0.0
    lat = _lattice_members(members, cfg.freq_box)
    grid = cfg.grid(N)
    for i in order:
        wit = est.restart_witnesses[i]
        per = ratio(lat, wit, exps, w, w_list, target, grid)
        lines = [line_ratio(members, wit, exps, w, w_list, target, s, points_per_unit)
                 for s in s_schedule]
        best_line = max(l["ratio"] for l in lines)
        n_r = max(n_r, best_line)
        wit_reports.append({
            "restart": int(i), "periodic_ratio": per, "line_ratios": [l["ratio"] for l in lines],
            "line_at_largest_s": lines[-1]["ratio"],
            "transfer_holds": bool(lines[-1]["ratio"] >= per / c - tol * per),
            "coefficients": [[[z.real, z.imag] for z in g.coeffs.ravel()] for g in wit]})
    rho = est.value / (c * n_r) if n_r > 0 else math.inf
    return {
        "N_T": est.value, "N_R": n_r, "constant_c": c, "rho": rho, "tol": tol,
        "pass": bool(rho <= 1 + tol), "target": target, "p": exps.p, "p_list": list(exps.p_list),
        "factors": {"weak_constant": c_weak if target == "weak" else None,
                    "lemma_factor": 2.0 ** (1.0 / exps.p) if target == "weak" else None},
        "s_schedule": list(s_schedule), "normalization": norm_reports,
        "witnesses": wit_reports, "estimate": est,
        "note": "N_T and N_R are lower estimates; the check transfers witnesses, "
                "it does not compare true norms.",
    }
