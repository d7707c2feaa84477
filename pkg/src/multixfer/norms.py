"""Weighted L^p quasi-norms, weak-L^p norms and the Kolmogorov localized norm.

The Kolmogorov supremum over sets ``E`` is taken over the superlevel sets
``{|f| >= v}`` of ``|f|`` plus the whole domain. This loses nothing: among
sets of a given weighted measure, a superlevel set maximizes
``||f chi_E||_{L^q(w)}`` (bathtub principle), and on a grid every such
maximizer between two consecutive superlevel sets is dominated by one of
them because ``w(E)^{1/p - 1/q}`` is decreasing in ``w(E)``.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .functions import GridFunction, TrigPolynomial, synthesize
from .spaces import TorusGrid

__all__ = ["lp_norm", "weak_norm", "kolmogorov_norm", "distribution"]


def _prepare(f, w, grid=None):
    if isinstance(f, TrigPolynomial):
        if grid is None:
            n = 8
            while n <= 4 * f.max_freq + 1:
                n *= 2
            grid = TorusGrid(f.dim, max(n, 64 if f.dim == 1 else 16))
        f = synthesize(f, grid)
    if not isinstance(f, GridFunction):
        raise TypeError(f"expected GridFunction or TrigPolynomial, got {type(f)!r}")
    if w is None:
        mass = np.full(f.grid.shape, f.grid.cell)
    else:
        if w.dim != f.dim:
            raise DomainError(f"weight dimension {w.dim} != function dimension {f.dim}")
        mass = np.asarray(w.sample(f.grid)) * f.grid.cell
    return np.abs(f.values).ravel(), mass.ravel()


def lp_norm(f, p: float, w=None, grid: TorusGrid | None = None) -> float:
    """``(int |f|^p w)^{1/p}`` by the uniform-grid rule.

    ``w=None`` is the unit weight. A :class:`TrigPolynomial` is sampled on
    ``grid`` (or a default grid resolving twice its degree).
    """
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    a, m = _prepare(f, w, grid)
    return float(np.dot(a**p, m) ** (1.0 / p))


def distribution(f, w=None):
    """Distinct values ``v`` of ``|f|`` (descending) and ``w({|f| >= v})``."""
    a, m = _prepare(f, w)
    order = np.argsort(-a, kind="stable")
    a_s, m_s = a[order], m[order]
    cum = np.cumsum(m_s)
    ends = np.nonzero(np.append(a_s[1:] != a_s[:-1], True))[0]
    return a_s[ends], cum[ends]


def weak_norm(f, p: float, w=None) -> float:
    """``sup_t t w({|f| > t})^{1/p}``, evaluated exactly at the jumps of ``|f|``.

    Between consecutive distinct values ``v' < v`` the level set is constant
    and ``t`` increases, so the supremum is the limit ``t -> v^-`` which is
    ``v w({|f| >= v})^{1/p}``.
    """
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    vals, mass = distribution(f, w)
    keep = vals > 0
    if not np.any(keep):
        return 0.0
    return float(np.max(vals[keep] * mass[keep] ** (1.0 / p)))


def kolmogorov_norm(f, p: float, q: float, w=None) -> float:
    """``sup_E ||f chi_E||_{L^q(w)} w(E)^{1/p - 1/q}`` over superlevel sets."""
    if not 0 < q < p:
        raise DomainError(f"need 0 < q < p, got p={p}, q={q}")
    a, m = _prepare(f, w)
    order = np.argsort(-a, kind="stable")
    a_s, m_s = a[order], m[order]
    cum_m = np.cumsum(m_s)
    cum_q = np.cumsum(a_s**q * m_s)
    ends = np.nonzero(np.append(a_s[1:] != a_s[:-1], True))[0]
    cm, cq = cum_m[ends], cum_q[ends]
    ok = cm > 0
    if not np.any(ok):
        return 0.0
    vals = cq[ok] ** (1.0 / q) * cm[ok] ** (1.0 / p - 1.0 / q)
    return float(vals.max())
