"""Exponent tuples, sampling grids, frequency boxes and scalar constants."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "ExponentTuple",
    "TorusGrid",
    "LineGrid",
    "FrequencyBox",
    "make_exponents",
    "kolmogorov_constant",
    "weak_constant",
    "WEAK_Q_FLOOR",
]

# q grid for the weak constant starts at p * WEAK_Q_FLOOR
WEAK_Q_FLOOR = 1e-4
_WEAK_Q_POINTS = 4001


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class ExponentTuple:
    """Hölder-related exponents ``(p; p_1, ..., p_N)`` with ``1/p = sum 1/p_l``."""

    p_list: tuple[float, ...]
    p: float
    n_linear: int

    @property
    def p0(self) -> float:
        return min(self.p_list)

    def dual(self, l: int) -> float:
        """Conjugate exponent p_l' (``inf`` when p_l = 1)."""
        pl = self.p_list[l]
        return math.inf if pl == 1 else pl / (pl - 1)


def make_exponents(p_list: Sequence[float]) -> ExponentTuple:
    """Build an :class:`ExponentTuple` from ``p_1..p_N``; ``p`` follows from Hölder."""
    p_list = tuple(float(v) for v in p_list)
    if not 2 <= len(p_list) <= 3:
        raise DomainError(f"p_list must have 2 or 3 entries, got {len(p_list)}")
    for i, v in enumerate(p_list):
        if not math.isfinite(v):
            raise DomainError(f"p_list[{i}] = {v} is not finite")
        if v < 1:
            raise DomainError(f"p_list[{i}] = {v} must be >= 1")
    p = 1.0 / math.fsum(1.0 / v for v in p_list)
    return ExponentTuple(p_list=p_list, p=p, n_linear=len(p_list))


def kolmogorov_constant(p: float, q: float) -> float:
    """c_{p,q} = (p / (p - q))^{1/q}, the constant in the Kolmogorov equivalence."""
    if not (0 < q < p < math.inf):
        raise DomainError(f"need 0 < q < p < inf, got p={p}, q={q}")
    return (p / (p - q)) ** (1.0 / q)


def weak_constant(p: float) -> float:
    """Grid infimum of ``kolmogorov_constant(p, q)`` over q in (p*1e-4, p).

    The infimum is approached as q -> 0 and equals exp(1/p); the grid value
    overshoots it by a relative amount of about 5e-5/p.
    """
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    q = np.geomspace(p * WEAK_Q_FLOOR, p * (1 - 1e-9), _WEAK_Q_POINTS)
    vals = (p / (p - q)) ** (1.0 / q)
    return float(vals.min())


@dataclass(frozen=True)
class TorusGrid:
    """Uniform lattice ``{j / n}`` on ``[0, 1)^d``."""

    dim: int
    n_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DomainError(f"dim must be 1 or 2, got {self.dim}")
        if self.n_per_axis < 4 or not _is_pow2(self.n_per_axis):
            raise DomainError(f"n_per_axis must be a power of two >= 4, got {self.n_per_axis}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.n_per_axis

    @property
    def cell(self) -> float:
        """Quadrature weight of one grid point."""
        return self.n_per_axis ** (-self.dim)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.n_per_axis**self.dim

    def axis(self) -> np.ndarray:
        return np.arange(self.n_per_axis) / self.n_per_axis

    def coords(self) -> list[np.ndarray]:
        """Per-axis coordinate arrays broadcast to ``shape`` (ij indexing)."""
        ax = self.axis()
        return list(np.meshgrid(*([ax] * self.dim), indexing="ij"))


@dataclass(frozen=True)
class LineGrid:
    """Uniform lattice ``-L + j h`` (``h = 2L/n``) on the box ``(-L, L)^d``."""

    dim: int
    half_width: float
    n_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3, 4, 6):
            raise DomainError(f"unsupported line-grid dimension {self.dim}")
        if not self.half_width > 0:
            raise DomainError(f"half_width must be positive, got {self.half_width}")
        if self.n_per_axis < 4 or not _is_pow2(self.n_per_axis):
            raise DomainError(f"n_per_axis must be a power of two >= 4, got {self.n_per_axis}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n_per_axis

    @property
    def cell(self) -> float:
        return self.spacing**self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.n_per_axis**self.dim

    def axis(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(self.n_per_axis)

    def coords(self) -> list[np.ndarray]:
        ax = self.axis()
        return list(np.meshgrid(*([ax] * self.dim), indexing="ij"))

    def lattice_ratio(self) -> int | None:
        """Return m when the spacing is exactly 1/m, else None."""
        m = 1.0 / self.spacing
        mi = int(round(m))
        if mi >= 1 and abs(m - mi) < 1e-9 * m:
            return mi
        return None

    def dual(self) -> "LineGrid":
        """Frequency grid of spacing 1/(2L) paired with this grid by the DFT."""
        return LineGrid(self.dim, 0.5 / self.spacing, self.n_per_axis)


@dataclass(frozen=True)
class FrequencyBox:
    """Frequencies ``k`` in ``Z^d`` with every coordinate in ``[-K, K]``."""

    dim: int
    max_freq: int

    def __post_init__(self):
        if self.max_freq < 1:
            raise DomainError(f"max_freq must be >= 1, got {self.max_freq}")
        if self.dim < 1:
            raise DomainError(f"dim must be >= 1, got {self.dim}")

    @property
    def side(self) -> int:
        return 2 * self.max_freq + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.dim

    @property
    def cardinality(self) -> int:
        return self.side**self.dim

    def frequencies(self) -> np.ndarray:
        """All frequencies as an integer array of shape (cardinality, dim), C order."""
        r = range(-self.max_freq, self.max_freq + 1)
        return np.array(list(itertools.product(r, repeat=self.dim)), dtype=int)
