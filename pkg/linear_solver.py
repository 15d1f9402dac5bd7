#!/usr/bin/env python3
"""
Linear Solver Module
Direct O(n) Thomas elimination for tridiagonal systems
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from convdiff_errors import SingularPivotError
from discretization import TridiagonalSystem

logger = logging.getLogger(__name__)

_PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class SolveStats:
    """Size, wall-clock seconds and smallest |pivot| of one solve."""

    n: int
    elapsed: float
    pivot_min_abs: float


def thomas_solve(system: TridiagonalSystem) -> tuple[np.ndarray, SolveStats]:
    """Solve T x = rhs with one forward sweep and one back substitution, no pivoting.

    Raises SingularPivotError when a pivot falls below 1e-300 in magnitude.
    """
    start = time.perf_counter()

    # plain lists: per-element numpy indexing would dominate the sweep
    sub = system.sub.tolist()
    sup = system.sup.tolist()
    rhs = system.rhs.tolist()
    n = len(rhs)

    pivots = system.diag.tolist()
    pivot = pivots[0]
    if abs(pivot) < _PIVOT_FLOOR:
        raise SingularPivotError(f"pivot 0 has magnitude {abs(pivot):.3g}")
    pivot_min = abs(pivot)

    for k in range(1, n):
        m = sub[k - 1] / pivot
        pivot = pivots[k] - m * sup[k - 1]
        if abs(pivot) < _PIVOT_FLOOR:
            raise SingularPivotError(f"pivot {k} has magnitude {abs(pivot):.3g}")
        if abs(pivot) < pivot_min:
            pivot_min = abs(pivot)
        pivots[k] = pivot
        rhs[k] -= m * rhs[k - 1]

    x = rhs
    x[-1] = rhs[-1] / pivots[-1]
    for k in range(n - 2, -1, -1):
        x[k] = (rhs[k] - sup[k] * x[k + 1]) / pivots[k]

    solution = np.array(x, dtype=float)
    stats = SolveStats(n=n, elapsed=time.perf_counter() - start, pivot_min_abs=pivot_min)
    logger.debug(f"Thomas solve: n={n}, {stats.elapsed:.3g}s, min |pivot|={pivot_min:.3g}")
    return solution, stats
