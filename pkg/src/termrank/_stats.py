"""Small statistical helpers shared by several modules."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import special

from .errors import InsufficientData


def quantile_exclusive(values: Sequence[float], q: float) -> float:
    """Quantile with exclusive plotting positions (p = q * (N + 1)).

    Matches spreadsheet QUARTILE.EXC at q in {0.25, 0.5, 0.75}: rank
    q*(N+1) is interpolated linearly between order statistics and clamped
    to the observed extremes when it falls outside [1, N].
    """
    xs = np.sort(np.asarray(values, dtype=float))
    n = xs.size
    if n == 0:
        raise InsufficientData("quantile of empty sequence")
    pos = q * (n + 1)
    if pos <= 1:
        return float(xs[0])
    if pos >= n:
        return float(xs[-1])
    lo = int(math.floor(pos))
    frac = pos - lo
    return float(xs[lo - 1] + frac * (xs[lo] - xs[lo - 1]))


def five_number_summary(values: Sequence[float]) -> dict[str, float]:
    """Min, exclusive quartiles, and max of a sample."""
    xs = np.asarray(values, dtype=float)
    if xs.size == 0:
        raise InsufficientData("summary of empty sequence")
    return {
        "min": float(xs.min()),
        "q1": quantile_exclusive(xs, 0.25),
        "median": quantile_exclusive(xs, 0.50),
        "q3": quantile_exclusive(xs, 0.75),
        "max": float(xs.max()),
    }


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Pearson correlation coefficient with a two-sided t-test p-value.

    Returns (r, p). Needs at least 3 paired observations and nonzero
    variance on both sides; degenerate input raises InsufficientData.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise InsufficientData("pearson needs two equal-length 1-d vectors")
    n = xa.size
    if n < 3:
        raise InsufficientData(f"pearson needs >= 3 pairs, got {n}")
    xd = xa - xa.mean()
    yd = ya - ya.mean()
    denom = math.sqrt(float(xd @ xd) * float(yd @ yd))
    if denom == 0.0:
        raise InsufficientData("pearson undefined for constant input")
    r = float(xd @ yd) / denom
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    # two-sided p from the t distribution with n-2 dof
    p = 2.0 * float(special.stdtr(n - 2, -abs(t)))
    return r, p


def round_half_up(x: float) -> int:
    """Round to nearest integer with ties going up (0.5 -> 1, 1.5 -> 2)."""
    return int(math.floor(x + 0.5))
