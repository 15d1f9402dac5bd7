#!/usr/bin/env python3
"""
Discretization Module
Assembles the tridiagonal system for the interior unknowns u_1..u_{N-1}
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from convdiff_errors import InvalidArgumentError, LengthMismatchError, SchemeMismatchError
from mesh import Mesh1D, MeshKind
from problem_model import ProblemSpec

logger = logging.getLogger(__name__)


class Scheme(str, Enum):
    """Difference scheme for the convection term.

    CENTRAL_UNIFORM is the symmetric second-order scheme, uniform meshes only.
    UPWIND takes the backward difference, away from the layer at x = 1.
    """

    CENTRAL_UNIFORM = "central"
    UPWIND = "upwind"


@dataclass(frozen=True)
class TridiagonalSystem:
    """sub[i-1]*u_{i-1} + diag[i]*u_i + sup[i]*u_{i+1} = rhs[i] for i = 0..n-1."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self) -> None:
        arrays = {}
        for name in ("sub", "diag", "sup", "rhs"):
            arr = np.array(getattr(self, name), dtype=float).ravel()
            arr.setflags(write=False)
            arrays[name] = arr
            object.__setattr__(self, name, arr)

        n = arrays["diag"].size
        if n < 1:
            raise InvalidArgumentError("a tridiagonal system needs at least one unknown")
        if arrays["rhs"].size != n:
            raise LengthMismatchError(f"rhs has {arrays['rhs'].size} entries, expected {n}")
        for name in ("sub", "sup"):
            if arrays[name].size != n - 1:
                raise LengthMismatchError(f"{name} has {arrays[name].size} entries, expected {n - 1}")
        for name, arr in arrays.items():
            if not np.all(np.isfinite(arr)):
                raise InvalidArgumentError(f"{name} contains non-finite entries")

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        """Full n x n matrix, for oracles and small-system inspection."""
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)


def _central_rows(eps: float, h: float, a: np.ndarray):
    diffusion = eps / (h * h)
    convection = a / (2.0 * h)
    return -diffusion - convection, np.full_like(a, 2.0 * diffusion), -diffusion + convection


def _upwind_rows(eps: float, h_left: np.ndarray, h_right: np.ndarray, a: np.ndarray):
    h_sum = h_left + h_right
    convection = a / h_left
    lower = -2.0 * eps / (h_left * h_sum) - convection
    centre = 2.0 * eps / (h_left * h_right) + convection
    upper = -2.0 * eps / (h_right * h_sum)
    return lower, centre, upper


def assemble(problem: ProblemSpec, mesh: Mesh1D, scheme: Scheme) -> TridiagonalSystem:
    """Rows of -eps*u'' + a*u' = f at the interior nodes, boundary values moved to the rhs.

    Rows are unscaled: rhs_i = f(x_i) apart from the eliminated boundary terms.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.CENTRAL_UNIFORM and mesh.kind is not MeshKind.UNIFORM:
        raise SchemeMismatchError(
            f"the central scheme is only defined on uniform meshes, got a {mesh.kind.value} mesh"
        )

    x = mesh.points
    interior = x[1:-1]
    h_left = x[1:-1] - x[:-2]
    h_right = x[2:] - x[1:-1]
    a = problem.check_coefficient(interior)
    f = problem.source_values(interior)

    if scheme is Scheme.CENTRAL_UNIFORM:
        # nominal width: i/N differences are not bitwise equal for every N
        lower, centre, upper = _central_rows(problem.epsilon, 1.0 / mesh.n_intervals, a)
    else:
        lower, centre, upper = _upwind_rows(problem.epsilon, h_left, h_right, a)

    rhs = f.copy()
    rhs[0] -= lower[0] * problem.u_left
    rhs[-1] -= upper[-1] * problem.u_right

    logger.debug(
        f"Assembled {scheme.value} system on a {mesh.kind.value} mesh: "
        f"{interior.size} unknowns, eps={problem.epsilon:g}"
    )
    return TridiagonalSystem(sub=lower[1:], diag=centre, sup=upper[:-1], rhs=rhs)


def dense_residual_oracle(system: TridiagonalSystem, candidate) -> float:
    """max_i |(T @ candidate - rhs)_i|, multiplied out row by row."""
    u = np.asarray(candidate, dtype=float).ravel()
    if u.size != system.n:
        raise LengthMismatchError(f"candidate has {u.size} entries, system has {system.n} unknowns")

    worst = 0.0
    for i in range(system.n):
        row = system.diag[i] * u[i]
        if i > 0:
            row += system.sub[i - 1] * u[i - 1]
        if i < system.n - 1:
            row += system.sup[i] * u[i + 1]
        worst = max(worst, abs(row - system.rhs[i]))
    return float(worst)
