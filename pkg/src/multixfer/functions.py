"""Periodic and line function models and the Fourier machinery acting on them.

Sign convention: analysis uses ``exp(-2 pi i k.x)`` and synthesis uses
``exp(+2 pi i k.x)``, so ``exp(2 pi i 3 x)`` has its single coefficient at
``k = +3``. All transference statements are invariant under the choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import AliasingError, DomainError
from .spaces import FrequencyBox, LineGrid, TorusGrid

__all__ = [
    "TrigPolynomial",
    "GridFunction",
    "fourier_coefficients",
    "synthesize",
    "translate",
    "modulate",
    "periodize",
    "line_fourier",
    "inverse_line_fourier",
    "fourier_transform_at",
    "random_trig_polynomial",
]

Grid = Union[TorusGrid, LineGrid]

_LATTICE_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Trigonometric polynomial ``g(x) = sum_k a_k exp(2 pi i k.x)``.

    Coefficients are stored densely on the box ``[-K, K]^d``;
    ``coeffs[k + K]`` is ``a_k``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim < 1 or len(set(c.shape)) != 1 or c.shape[0] % 2 != 1:
            raise DomainError(f"coefficient array must be an odd hypercube, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "coeffs", _readonly(c))

    @property
    def dim(self) -> int:
        return self.coeffs.ndim

    @property
    def max_freq(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def box(self) -> FrequencyBox:
        return FrequencyBox(self.dim, max(self.max_freq, 1))

    @classmethod
    def zeros(cls, dim: int, max_freq: int) -> "TrigPolynomial":
        return cls(np.zeros((2 * max_freq + 1,) * dim, dtype=complex))

    @classmethod
    def from_modes(cls, modes: Mapping, dim: int = 1, max_freq: int | None = None) -> "TrigPolynomial":
        """Build from ``{k: a_k}``; ``k`` is an int (d = 1) or a d-tuple."""
        keys = [np.atleast_1d(np.asarray(k, dtype=int)) for k in modes]
        for k in keys:
            if k.shape != (dim,):
                raise DomainError(f"frequency {tuple(k)} does not have dimension {dim}")
        K = max((int(np.abs(k).max()) for k in keys), default=0)
        if max_freq is not None:
            if max_freq < K:
                raise DomainError(f"max_freq {max_freq} smaller than support radius {K}")
            K = max_freq
        c = np.zeros((2 * K + 1,) * dim, dtype=complex)
        for k, a in zip(keys, modes.values()):
            c[tuple(k + K)] += a
        return cls(c)

    def coefficient(self, k) -> complex:
        k = np.atleast_1d(np.asarray(k, dtype=int))
        if np.abs(k).max() > self.max_freq:
            return 0j
        return complex(self.coeffs[tuple(k + self.max_freq)])

    def to_modes(self, tol: float = 0.0) -> dict:
        K = self.max_freq
        out = {}
        for idx in zip(*np.nonzero(np.abs(self.coeffs) > tol)):
            k = tuple(int(i) - K for i in idx)
            out[k[0] if self.dim == 1 else k] = complex(self.coeffs[idx])
        return out

    def padded(self, max_freq: int) -> "TrigPolynomial":
        """Same polynomial stored on the larger box ``[-max_freq, max_freq]^d``."""
        K = self.max_freq
        if max_freq < K:
            raise DomainError(f"cannot shrink box from {K} to {max_freq}")
        if max_freq == K:
            return self
        pad = max_freq - K
        return TrigPolynomial(np.pad(self.coeffs, [(pad, pad)] * self.dim))

    def __call__(self, x) -> np.ndarray:
        """Evaluate at points ``x`` of shape (..., d); for d = 1 also (...) with
        a 1-d array read as a list of points."""
        x = np.asarray(x, dtype=float)
        if self.dim == 1 and (x.ndim < 2 or x.shape[-1] != 1):
            x = x[..., None]
        freqs = FrequencyBox(self.dim, max(self.max_freq, 1)).frequencies()
        c = self.padded(max(self.max_freq, 1)).coeffs.reshape(-1)
        phase = np.exp(2j * np.pi * (x @ freqs.T))
        return phase @ c

    def _align(self, other: "TrigPolynomial"):
        if self.dim != other.dim:
            raise DomainError(f"dimension mismatch {self.dim} vs {other.dim}")
        K = max(self.max_freq, other.max_freq)
        return self.padded(K).coeffs, other.padded(K).coeffs

    def __add__(self, other):
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        a, b = self._align(other)
        return TrigPolynomial(a + b)

    def __sub__(self, other):
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        a, b = self._align(other)
        return TrigPolynomial(a - b)

    def __mul__(self, c):
        if np.ndim(c) != 0:
            return NotImplemented
        return TrigPolynomial(self.coeffs * c)

    __rmul__ = __mul__

    def __neg__(self):
        return TrigPolynomial(-self.coeffs)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples on a :class:`TorusGrid` or :class:`LineGrid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.size == self.grid.size and v.shape != self.grid.shape:
            v = v.reshape(self.grid.shape)
        if v.shape != self.grid.shape:
            raise DomainError(f"expected {self.grid.shape} samples, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("samples must be finite")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.grid, TorusGrid)

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise DomainError("grid mismatch")
            return other.values
        if np.ndim(other) == 0:
            return other
        raise TypeError(f"unsupported operand {type(other)!r}")

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other))

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __abs__(self):
        return GridFunction(self.grid, np.abs(self.values))

    def integral(self) -> complex:
        """Uniform-grid Riemann sum of the samples."""
        return complex(self.values.sum() * self.grid.cell)


def _axis_indices(K: int, n: int) -> np.ndarray:
    return np.arange(-K, K + 1) % n


def fourier_coefficients(g: GridFunction, box: FrequencyBox) -> TrigPolynomial:
    """Quadrature Fourier coefficients of a torus function on ``box``.

    Exact for trigonometric polynomials whose support lies inside ``box``.
    """
    if not g.is_periodic:
        raise DomainError("fourier_coefficients needs a torus function")
    if box.dim != g.dim:
        raise DomainError(f"box dimension {box.dim} != function dimension {g.dim}")
    n = g.grid.n_per_axis
    if n <= 2 * box.max_freq:
        raise AliasingError(f"grid n={n} does not resolve frequencies up to {box.max_freq}")
    spectrum = np.fft.fftn(g.values) / g.grid.size
    idx = _axis_indices(box.max_freq, n)
    return TrigPolynomial(spectrum[np.ix_(*([idx] * g.dim))])


def synthesize(t: TrigPolynomial, grid: TorusGrid) -> GridFunction:
    """Sample ``t`` on ``grid`` (exact; inverse FFT of the placed coefficients)."""
    if not isinstance(grid, TorusGrid):
        raise DomainError("synthesize needs a TorusGrid")
    if grid.dim != t.dim:
        raise DomainError(f"grid dimension {grid.dim} != polynomial dimension {t.dim}")
    n = grid.n_per_axis
    if n <= 2 * t.max_freq:
        raise AliasingError(f"grid n={n} does not resolve frequencies up to {t.max_freq}")
    spectrum = np.zeros(grid.shape, dtype=complex)
    idx = _axis_indices(t.max_freq, n)
    spectrum[np.ix_(*([idx] * t.dim))] = t.coeffs
    return GridFunction(grid, np.fft.ifftn(spectrum) * grid.size)


def _lattice_steps(y, grid: Grid) -> np.ndarray:
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (grid.dim,):
        raise DomainError(f"shift {tuple(y)} does not have dimension {grid.dim}")
    steps = y / grid.spacing
    r = np.round(steps)
    if np.any(np.abs(steps - r) > _LATTICE_TOL * np.maximum(1.0, np.abs(steps))):
        raise DomainError(f"shift {tuple(y)} is not a lattice vector of spacing {grid.spacing}")
    return r.astype(int)


def translate(f, y):
    """Return ``R_y f = f(. + y)``.

    Trigonometric polynomials accept any real ``y``. Grid functions need a
    lattice shift; on a line grid samples entering from outside the box are 0.
    """
    if isinstance(f, TrigPolynomial):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if y.shape != (f.dim,):
            raise DomainError(f"shift {tuple(y)} does not have dimension {f.dim}")
        K = f.max_freq
        phase = np.ones(f.coeffs.shape, dtype=complex)
        for ax in range(f.dim):
            k = np.arange(-K, K + 1)
            shape = [1] * f.dim
            shape[ax] = -1
            phase = phase * np.exp(2j * np.pi * k * y[ax]).reshape(shape)
        return TrigPolynomial(f.coeffs * phase)
    if not isinstance(f, GridFunction):
        raise TypeError(f"cannot translate {type(f)!r}")
    steps = _lattice_steps(y, f.grid)
    if f.is_periodic:
        return GridFunction(f.grid, np.roll(f.values, tuple(-steps), axis=tuple(range(f.dim))))
    out = f.values
    for ax, s in enumerate(steps):
        out = _shift_zero(out, int(s), ax)
    return GridFunction(f.grid, out)


def _shift_zero(a: np.ndarray, s: int, axis: int) -> np.ndarray:
    """``out[j] = a[j + s]`` along ``axis`` with zero fill."""
    n = a.shape[axis]
    out = np.zeros_like(a)
    if abs(s) >= n:
        return out
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    if s >= 0:
        src[axis], dst[axis] = slice(s, n), slice(0, n - s)
    else:
        src[axis], dst[axis] = slice(0, n + s), slice(-s, n)
    out[tuple(dst)] = a[tuple(src)]
    return out


def modulate(f: GridFunction, xi) -> GridFunction:
    """Multiply pointwise by ``exp(-2 pi i xi.x)``."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (f.dim,):
        raise DomainError(f"frequency {tuple(xi)} does not have dimension {f.dim}")
    phase = sum(c * x for c, x in zip(f.grid.coords(), xi))
    return GridFunction(f.grid, f.values * np.exp(-2j * np.pi * phase))


def periodize(f: GridFunction) -> GridFunction:
    """Fold a line function onto the torus: ``sum_k f(x + k)`` on ``[0,1)^d``."""
    if f.is_periodic:
        raise DomainError("periodize expects a line function")
    m = f.grid.lattice_ratio()
    if m is None:
        raise DomainError(f"spacing {f.grid.spacing} is not 1/m for an integer m")
    torus = TorusGrid(f.dim, m)
    n = f.grid.n_per_axis
    # x_j = (j - n/2) / m since L = n / (2m)
    idx = (np.arange(n) - n // 2) % m
    out = np.zeros(torus.shape, dtype=complex)
    grids = np.meshgrid(*([idx] * f.dim), indexing="ij")
    np.add.at(out, tuple(g.ravel() for g in grids), f.values.ravel())
    return GridFunction(torus, out)


def _sign_pattern(n: int, dim: int) -> np.ndarray:
    s = (-1.0) ** (np.arange(n) - n // 2)
    out = s
    for _ in range(dim - 1):
        out = np.multiply.outer(out, s)
    return out


def line_fourier(f: GridFunction) -> GridFunction:
    """Riemann-sum Fourier transform on the dual lattice of spacing 1/(2L).

    The result lives on ``f.grid.dual()``; Parseval holds exactly on the grid.
    """
    if f.is_periodic:
        raise DomainError("line_fourier expects a line function")
    g = f.grid
    spectrum = np.fft.fftshift(np.fft.fftn(f.values))
    return GridFunction(g.dual(), g.cell * spectrum * _sign_pattern(g.n_per_axis, g.dim))


def inverse_line_fourier(F: GridFunction) -> GridFunction:
    """Inverse of :func:`line_fourier`; ``F`` lives on a dual grid."""
    if F.is_periodic:
        raise DomainError("inverse_line_fourier expects a line-grid spectrum")
    d = F.grid
    vals = np.fft.ifftn(np.fft.ifftshift(F.values * _sign_pattern(d.n_per_axis, d.dim)))
    return GridFunction(d.dual(), vals * d.cell * d.size)


def fourier_transform_at(f: GridFunction, xi, chunk: int = 256) -> np.ndarray:
    """Direct quadrature of ``f_hat(xi) = int f(x) exp(-2 pi i x.xi) dx``.

    ``xi`` has shape (M, d) (or (M,) when d = 1). Works for line and torus
    functions; on the torus it returns Fourier coefficients at real frequencies.
    """
    xi = np.asarray(xi, dtype=float)
    if f.dim == 1 and xi.ndim == 1:
        xi = xi[:, None]
    if xi.ndim != 2 or xi.shape[1] != f.dim:
        raise DomainError(f"frequencies must have shape (M, {f.dim})")
    x = np.stack([c.ravel() for c in f.grid.coords()], axis=1)
    v = f.values.ravel()
    out = np.empty(len(xi), dtype=complex)
    for s in range(0, len(xi), chunk):
        ph = np.exp(-2j * np.pi * (xi[s:s + chunk] @ x.T))
        out[s:s + chunk] = ph @ v
    return out * f.grid.cell


def random_trig_polynomial(rng: np.random.Generator, dim: int, max_freq: int,
                           modes: int | None = None, scale: float = 1.0) -> TrigPolynomial:
    """Random complex polynomial on the box; ``modes`` limits the support size."""
    shape = (2 * max_freq + 1,) * dim
    c = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * scale
    if modes is not None and modes < c.size:
        keep = rng.choice(c.size, size=modes, replace=False)
        mask = np.zeros(c.size, dtype=bool)
        mask[keep] = True
        c = np.where(mask.reshape(shape), c, 0)
    return TrigPolynomial(c)


def as_modes(coeffs: Sequence[complex]) -> TrigPolynomial:
    """1-d polynomial from a centred coefficient list ``[a_-K, ..., a_K]``."""
    return TrigPolynomial(np.asarray(coeffs, dtype=complex))
