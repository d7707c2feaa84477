"""Multilinear multiplier operators on the torus and the line, kernel form and maximal operators."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import AliasingError, DomainError
from .functions import GridFunction, TrigPolynomial, line_fourier, modulate, synthesize
from .spaces import FrequencyBox, LineGrid, TorusGrid
from .symbols import LatticeSymbol, Profile, SymbolFamily, SymbolSpec, mollify, restrict_lattice

__all__ = [
    "periodic_coefficients",
    "apply_periodic",
    "apply_periodic_direct",
    "apply_line",
    "apply_kernel",
    "maximal",
    "lattice_nodes",
    "mollification_domination",
]


def _fit_inputs(m: LatticeSymbol, inputs: Sequence[TrigPolynomial]) -> list[np.ndarray]:
    if len(inputs) != m.arity:
        raise DomainError(f"symbol is {m.arity}-linear, got {len(inputs)} inputs")
    K = m.max_freq
    out = []
    for l, g in enumerate(inputs):
        if not isinstance(g, TrigPolynomial):
            raise TypeError(f"input {l} must be a TrigPolynomial")
        if g.dim != m.dim:
            raise DomainError(f"input {l} has dimension {g.dim}, symbol {m.dim}")
        if g.max_freq > K:
            inner = tuple([slice(g.max_freq - K, g.max_freq + K + 1)] * g.dim)
            trimmed = np.zeros_like(g.coeffs)
            trimmed[inner] = g.coeffs[inner]
            if np.any(trimmed != g.coeffs):
                raise DomainError(f"input {l} has frequencies outside the symbol box [-{K}, {K}]")
            out.append(g.coeffs[inner])
        else:
            out.append(g.padded(K).coeffs)
    return out


def periodic_coefficients(m: LatticeSymbol, inputs: Sequence[TrigPolynomial]) -> TrigPolynomial:
    """Output coefficients ``sum_{k_1+..+k_N = k} m(k_1..k_N) prod g_l^(k_l)`` on ``[-NK, NK]^d``."""
    coeffs = _fit_inputs(m, inputs)
    N, d, K = m.arity, m.dim, m.max_freq
    prod = coeffs[0]
    for c in coeffs[1:]:
        prod = np.multiply.outer(prod, c)
    prod = prod * m.values
    side = 2 * N * K + 1
    r = np.arange(2 * K + 1)
    # index of the sum frequency along each output axis
    idx = []
    for ax in range(d):
        total = 0
        for l in range(N):
            shape = [1] * (N * d)
            shape[l * d + ax] = -1
            total = total + r.reshape(shape)
        idx.append(np.broadcast_to(total, prod.shape).ravel())
    flat = np.ravel_multi_index(tuple(idx), (side,) * d)
    v = prod.ravel()
    acc = (np.bincount(flat, weights=v.real, minlength=side**d)
           + 1j * np.bincount(flat, weights=v.imag, minlength=side**d))
    return TrigPolynomial(acc.reshape((side,) * d))


def apply_periodic(m: LatticeSymbol, inputs: Sequence[TrigPolynomial], grid: TorusGrid) -> GridFunction:
    """Evaluate the periodic multiplier operator on ``grid`` (exact up to rounding).

    Coefficients are accumulated by sum frequency, then synthesized by FFT.
    """
    if grid.dim != m.dim:
        raise DomainError(f"grid dimension {grid.dim} != symbol dimension {m.dim}")
    if grid.n_per_axis <= 2 * m.arity * m.max_freq:
        raise AliasingError(f"grid n={grid.n_per_axis} does not resolve output frequencies "
                            f"up to {m.arity * m.max_freq}")
    return synthesize(periodic_coefficients(m, inputs), grid)


def apply_periodic_direct(m: LatticeSymbol, inputs: Sequence[TrigPolynomial], grid: TorusGrid) -> GridFunction:
    """Direct exponential-sum evaluation over the support product (reference path)."""
    coeffs = _fit_inputs(m, inputs)
    K = m.max_freq
    supports = []
    for c in coeffs:
        nz = np.argwhere(c != 0)
        supports.append([(tuple(i), c[tuple(i)]) for i in nz])
    x = np.stack([c.ravel() for c in grid.coords()], axis=1)
    out = np.zeros(len(x), dtype=complex)
    for combo in _product(supports):
        idx = sum((i for i, _ in combo), ())
        amp = m.values[idx]
        for _, c in combo:
            amp = amp * c
        if amp == 0:
            continue
        k = sum(np.array(i) - K for i, _ in combo)
        out += amp * np.exp(2j * np.pi * (x @ k))
    return GridFunction(grid, out.reshape(grid.shape))


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product(lists[1:]):
            yield (head,) + tail


def _line_grid(inputs) -> LineGrid:
    grid = inputs[0].grid
    if not isinstance(grid, LineGrid):
        raise DomainError("line operators need LineGrid inputs")
    for f in inputs[1:]:
        if f.grid != grid:
            raise DomainError("inputs must share one LineGrid")
    return grid


def apply_line(m: SymbolSpec, inputs: Sequence[GridFunction], cutoff: float | None = None,
               return_info: bool = False):
    """Quadrature of the line multiplier operator on the inputs' grid.

    Inputs are transformed to the dual grid (spacing ``1/(2L)``), multiplied
    by ``m`` sampled on dual-lattice tuples with every ``|xi_l|_inf <= cutoff``,
    collected by sum frequency and inverse-transformed. The result is the
    exact discrete operator; with ``m = 1`` it reproduces ``prod f_l``.
    """
    if len(inputs) != m.arity:
        raise DomainError(f"symbol is {m.arity}-linear, got {len(inputs)} inputs")
    grid = _line_grid(inputs)
    if grid.dim != m.dim:
        raise DomainError(f"grid dimension {grid.dim} != symbol dimension {m.dim}")
    N, d, n = m.arity, m.dim, grid.n_per_axis
    dual = grid.dual()
    delta = dual.spacing
    ks = np.arange(n) - n // 2
    sel = np.arange(n) if cutoff is None else np.nonzero(np.abs(ks * delta) <= cutoff + 1e-12)[0]
    if sel.size == 0:
        raise DomainError(f"cutoff {cutoff} excludes every dual frequency")
    spectra = [line_fourier(f).values[np.ix_(*([sel] * d))] for f in inputs]
    q = sel.size
    kv = ks[sel]
    freq_axes = np.meshgrid(*([kv * delta] * (N * d)), indexing="ij")
    xi = np.stack([a.ravel() for a in freq_axes], axis=1)
    prod = spectra[0]
    for s in spectra[1:]:
        prod = np.multiply.outer(prod, s)
    prod = prod.ravel() * m(xi)
    # fold each axis of the sum frequency modulo n, with the (-1)^k phase of x_0 = -L
    sum_k = []
    for ax in range(d):
        tot = 0
        for l in range(N):
            shape = [1] * (N * d)
            shape[l * d + ax] = -1
            tot = tot + kv.reshape(shape)
        sum_k.append(np.broadcast_to(tot, (q,) * (N * d)).ravel())
    sign = np.ones(prod.shape)
    for k in sum_k:
        sign = sign * np.where(k % 2 == 0, 1.0, -1.0)
    flat = np.ravel_multi_index(tuple(k % n for k in sum_k), (n,) * d)
    v = prod * sign
    H = (np.bincount(flat, weights=v.real, minlength=n**d)
         + 1j * np.bincount(flat, weights=v.imag, minlength=n**d)).reshape((n,) * d)
    out = GridFunction(grid, np.fft.ifftn(H) * n**d * delta ** (N * d))
    if return_info:
        return out, {"cutoff": cutoff, "dual_spacing": delta, "frequencies_per_axis": int(q)}
    return out


def apply_kernel(K: GridFunction, inputs: Sequence[GridFunction], at=None):
    """Quadrature of ``int K(y_1..y_N) prod f_l(x - y_l) dy`` at grid points.

    ``K`` lives on a LineGrid of dimension ``N d`` with the inputs' spacing and
    a half-width no larger than theirs; inputs are zero outside their box.
    ``at`` is an optional array of flat output indices; then a 1-d array of
    values is returned instead of a GridFunction.
    """
    grid = _line_grid(inputs)
    N = len(inputs)
    d = grid.dim
    kg = K.grid
    if not isinstance(kg, LineGrid) or kg.dim != N * d:
        raise DomainError(f"kernel must live on a LineGrid of dimension {N * d}")
    if abs(kg.spacing - grid.spacing) > 1e-12 * grid.spacing:
        raise DomainError("kernel and inputs must share the grid spacing")
    if kg.half_width > grid.half_width + 1e-12:
        raise DomainError(f"insufficient padding: kernel half-width {kg.half_width} exceeds "
                          f"input half-width {grid.half_width}")
    nk, n = kg.n_per_axis, grid.n_per_axis
    o = nk // 2
    pad = nk
    padded = [np.pad(f.values, pad) for f in inputs]
    ker = K.values.reshape((nk**d,) * N)
    kgrid = np.stack([a.ravel() for a in np.meshgrid(*([np.arange(nk)] * d), indexing="ij")], axis=1)
    if at is None:
        targets = np.arange(n**d)
    else:
        targets = np.asarray(at, dtype=int).ravel()
    out = np.empty(len(targets), dtype=complex)
    chunk = max(1, 2**20 // (nk**d))
    for s in range(0, len(targets), chunk):
        t = np.array(np.unravel_index(targets[s:s + chunk], (n,) * d)).T
        src = t[:, None, :] + o - kgrid[None, :, :] + pad
        wins = [p[tuple(src[..., a] for a in range(d))] for p in padded]
        if N == 1:
            acc = wins[0] @ ker
        else:
            # contract the last slot first; acc then has shape (X, P, .., P)
            acc = np.einsum("xq,...q->x...", wins[-1], ker)
            for l in range(N - 2, -1, -1):
                acc = np.einsum("x...p,xp->x...", acc, wins[l])
        out[s:s + chunk] = acc
    out *= kg.cell
    if at is not None:
        return out
    return GridFunction(grid, out.reshape(grid.shape))


def maximal(family, inputs, side: str = "torus", grid=None, cutoff: float | None = None) -> GridFunction:
    """Pointwise ``sup_j |T_{m_j}(inputs)|`` over a family.

    ``family`` is a SymbolFamily, a sequence of SymbolSpec, or (torus side) a
    sequence of LatticeSymbol. Torus inputs are TrigPolynomials evaluated on
    ``grid``; line inputs are GridFunctions.
    """
    members = list(family.members) if isinstance(family, SymbolFamily) else list(family)
    if not members:
        raise DomainError("maximal needs a nonempty family")
    best = None
    for mem in members:
        if side == "torus":
            if grid is None:
                raise DomainError("torus side needs a grid")
            if isinstance(mem, SymbolSpec):
                K = max(g.max_freq for g in inputs)
                mem = restrict_lattice(mem, FrequencyBox(mem.dim, K))
            val = np.abs(apply_periodic(mem, inputs, grid).values)
            g = grid
        elif side == "line":
            res = apply_line(mem, inputs, cutoff=cutoff)
            val, g = np.abs(res.values), res.grid
        else:
            raise DomainError(f"side must be 'torus' or 'line', got {side!r}")
        best = val if best is None else np.maximum(best, val)
    return GridFunction(g, best)


def lattice_nodes(phi: Profile, delta: float):
    """Multiples of ``delta`` inside the support of ``phi`` with Riemann weights ``delta^d``."""
    lo = int(np.ceil(phi.lo / delta - 1e-9))
    hi = int(np.floor(phi.hi / delta + 1e-9))
    ax = np.arange(lo, hi + 1) * delta
    pts = np.stack([a.ravel() for a in np.meshgrid(*([ax] * phi.dim), indexing="ij")], axis=1)
    return pts, np.full(len(pts), delta**phi.dim)


def mollification_domination(m: SymbolSpec, phi: Profile, f1: GridFunction, f2: GridFunction,
                             nodes=None, tol: float = 1e-6) -> dict:
    """Compare ``|T_{(phi x phi)*m}(f1, f2)|`` with its modulated-input majorant.

    The right side is ``sum |phi(xi)||phi(eta)| |T_m(e^{-2 pi i xi.} f1,
    e^{-2 pi i eta.} f2)| w_xi w_eta`` over ``nodes`` (default: multiples of
    the dual spacing inside supp phi); the left side mollifies ``m`` with the
    same nodes and goes through :func:`apply_line`.
    """
    if m.arity != 2:
        raise DomainError("mollification domination is bilinear")
    grid = _line_grid([f1, f2])
    if nodes is None:
        nodes = lattice_nodes(phi, grid.dual().spacing)
    pts, wts = nodes
    c = wts * phi.fn(pts)
    left = np.abs(apply_line(mollify(m, phi, quadrature=(pts, wts)), [f1, f2]).values)
    mods1 = [modulate(f1, x) for x in pts]
    mods2 = [modulate(f2, x) for x in pts]
    right = np.zeros(grid.shape)
    for i, a in enumerate(mods1):
        if c[i] == 0:
            continue
        for j, b in enumerate(mods2):
            if c[j] == 0:
                continue
            right += abs(c[i]) * abs(c[j]) * np.abs(apply_line(m, [a, b]).values)
    margin = float(np.max(left - right))
    return {"max_left_minus_right": margin, "left_max": float(left.max()),
            "right_max": float(right.max()), "nodes": int(len(pts)), "tol": tol,
            "pass": bool(margin <= tol)}
