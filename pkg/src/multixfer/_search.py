"""Coordinate-wise complex perturbation ascent used by the norm estimators."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

Objective = Callable[[Sequence[np.ndarray]], float]


def _normalize(arrays):
    out = []
    for a in arrays:
        nrm = np.linalg.norm(a)
        out.append(a / nrm if nrm > 0 else a)
    return out


def ascent(objective: Objective, start: Sequence[np.ndarray], steps: int,
           rng: np.random.Generator, scale: float = 0.5, min_scale: float = 1e-4,
           patience: int | None = None):
    """Maximize a scale-invariant ratio over tuples of complex arrays.

    Each step perturbs one coefficient (real or imaginary part, either sign)
    and keeps the best improvement; every input is renormalized to unit l2
    norm afterwards. The perturbation scale halves after ``patience`` steps
    without improvement.

    Returns
    -------
    best : float
    inputs : list of ndarray
    trace : list of (step, best) pairs, nondecreasing in best
    """
    x = _normalize([np.array(a, dtype=complex) for a in start])
    best = objective(x)
    if not np.isfinite(best):
        best = -np.inf
    trace = [(0, float(best))]
    sizes = [a.size for a in x]
    total = sum(sizes)
    if patience is None:
        patience = max(8, 2 * total)
    stale = 0
    for it in range(1, steps + 1):
        slot = int(rng.integers(len(x)))
        idx = int(rng.integers(sizes[slot]))
        step = scale / np.sqrt(sizes[slot])
        improved = False
        cand_best, cand_x = best, None
        for delta in (step, -step, 1j * step, -1j * step):
            trial = [a.copy() for a in x]
            trial[slot].flat[idx] += delta
            if not np.any(trial[slot]):
                continue
            val = objective(trial)
            if np.isfinite(val) and val > cand_best:
                cand_best, cand_x = val, trial
        if cand_x is not None:
            x = _normalize(cand_x)
            best = cand_best
            improved = True
        if improved:
            stale = 0
        else:
            stale += 1
            if stale >= patience and scale > min_scale:
                scale *= 0.5
                stale = 0
        trace.append((it, float(best)))
    return float(best), x, trace
