#!/usr/bin/env python3
"""
Mesh Module
Uniform and Shishkin (piecewise-equidistant, layer-adapted) partitions of [0, 1]
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from convdiff_errors import InvalidArgumentError

logger = logging.getLogger(__name__)

_DEFAULT_ALPHA = 1.0
_DEFAULT_SIGMA0 = 2.0
_MAX_SIGMA = 0.5


class MeshKind(str, Enum):
    UNIFORM = "uniform"
    SHISHKIN = "shishkin"


@dataclass(frozen=True)
class Mesh1D:
    """Strictly increasing points 0 = x_0 < ... < x_N = 1 plus how they were built.

    For Shishkin meshes *transition* is the point 1 - sigma, which sits at
    index N/2 exactly.
    """

    points: np.ndarray
    kind: MeshKind
    transition: float | None = None
    sigma: float | None = None

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 3:
            raise InvalidArgumentError("a mesh needs at least three points")
        if pts[0] != 0.0 or pts[-1] != 1.0:
            raise InvalidArgumentError("mesh endpoints must be exactly 0 and 1")
        if not np.all(np.diff(pts) > 0.0):
            raise InvalidArgumentError("mesh points must be strictly increasing")
        if (self.kind is MeshKind.SHISHKIN) != (self.transition is not None and self.sigma is not None):
            raise InvalidArgumentError("transition and sigma are recorded for Shishkin meshes only")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_intervals(self) -> int:
        return self.points.size - 1

    @property
    def interior(self) -> np.ndarray:
        return self.points[1:-1]


def check_intervals(n_intervals: int, kind: MeshKind) -> None:
    """Raise InvalidArgumentError unless *n_intervals* is usable for a mesh of *kind*."""
    if isinstance(n_intervals, bool) or int(n_intervals) != n_intervals:
        raise InvalidArgumentError(f"number of intervals must be an integer, got {n_intervals!r}")
    if MeshKind(kind) is MeshKind.SHISHKIN:
        if n_intervals < 4 or n_intervals % 2:
            raise InvalidArgumentError(
                f"a Shishkin mesh needs an even number of intervals >= 4, got {n_intervals}"
            )
    elif n_intervals < 2:
        raise InvalidArgumentError(f"a uniform mesh needs at least 2 intervals, got {n_intervals}")


def uniform_mesh(n_intervals: int) -> Mesh1D:
    """x_i = i / N for i = 0..N."""
    check_intervals(n_intervals, MeshKind.UNIFORM)
    n = int(n_intervals)
    points = np.arange(n + 1, dtype=float) / n
    logger.debug(f"Uniform mesh: N={n}, h={1.0 / n:.6g}")
    return Mesh1D(points=points, kind=MeshKind.UNIFORM)


def uniform_mesh_interior(n_points: int) -> Mesh1D:
    """Uniform mesh with *n_points* interior nodes, so h = 1/(n_points + 1).

    This is the interior-count convention: an even count gives an odd number of
    intervals, which keeps the even and odd nodes of the central scheme coupled.
    """
    if isinstance(n_points, bool) or int(n_points) != n_points or n_points < 1:
        raise InvalidArgumentError(f"number of interior points must be a positive integer, got {n_points!r}")
    return uniform_mesh(int(n_points) + 1)


def shishkin_transition(n_intervals: int, epsilon: float, alpha: float, sigma0: float) -> float:
    """sigma = min(1/2, (sigma0/alpha) * eps * ln N)."""
    return min(_MAX_SIGMA, (sigma0 / alpha) * epsilon * math.log(n_intervals))


def _shishkin_halves(n_intervals: int, epsilon: float, alpha: float, sigma0: float):
    check_intervals(n_intervals, MeshKind.SHISHKIN)
    if not (0.0 < epsilon <= 1.0):
        raise InvalidArgumentError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not alpha > 0.0:
        raise InvalidArgumentError(f"alpha must be positive, got {alpha}")
    if not sigma0 > 0.0:
        raise InvalidArgumentError(f"sigma0 must be positive, got {sigma0}")

    n = int(n_intervals)
    half = n // 2
    sigma = shishkin_transition(n, epsilon, alpha, sigma0)
    transition = 1.0 - sigma
    coarse = np.linspace(0.0, transition, half + 1)
    fine = np.linspace(transition, 1.0, half + 1)
    if not (transition < 1.0 and np.all(np.diff(fine) > 0.0)):
        raise InvalidArgumentError(
            f"eps={epsilon:g} is too small to resolve the layer with N={n} in double precision: "
            f"fine width {sigma / half:.3g} is below the spacing of floats near 1"
        )
    return sigma, coarse, fine


def check_shishkin_resolution(
    n_intervals: int,
    epsilon: float,
    alpha: float = _DEFAULT_ALPHA,
    sigma0: float = _DEFAULT_SIGMA0,
) -> None:
    """Raise InvalidArgumentError unless shishkin_mesh can build this mesh."""
    _shishkin_halves(n_intervals, epsilon, alpha, sigma0)


def shishkin_mesh(
    n_intervals: int,
    epsilon: float,
    alpha: float = _DEFAULT_ALPHA,
    sigma0: float = _DEFAULT_SIGMA0,
) -> Mesh1D:
    """N/2 equal intervals on [0, 1 - sigma] and N/2 equal intervals on [1 - sigma, 1].

    Each half is interpolated from its own endpoints so the transition point is
    exact and the widths never drift. When sigma clamps to 1/2 the result
    coincides with the uniform mesh.
    """
    sigma, coarse, fine = _shishkin_halves(n_intervals, epsilon, alpha, sigma0)
    n = int(n_intervals)
    half = n // 2
    if sigma == _MAX_SIGMA:
        logger.debug(f"Shishkin mesh: sigma clamped to 1/2 for N={n}, eps={epsilon:g}; mesh is uniform")
    transition = float(coarse[-1])
    points = np.concatenate([coarse, fine[1:]])

    logger.debug(
        f"Shishkin mesh: N={n}, eps={epsilon:g}, sigma={sigma:.6g}, "
        f"H={transition / half:.6g}, h={sigma / half:.6g}"
    )
    return Mesh1D(points=points, kind=MeshKind.SHISHKIN, transition=transition, sigma=sigma)


def interval_widths(mesh: Mesh1D) -> np.ndarray:
    """h_i = x_{i+1} - x_i for i = 0..N-1."""
    return np.diff(mesh.points)
