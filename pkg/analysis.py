#!/usr/bin/env python3
"""
Analysis Module
Error measurement, convergence orders, theoretical bounds and refinement studies
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from convdiff_errors import DomainError, InvalidArgumentError, MissingExactSolutionError
from discretization import Scheme, assemble
from linear_solver import SolveStats, thomas_solve
from mesh import Mesh1D, MeshKind, shishkin_mesh, uniform_mesh, uniform_mesh_interior
from problem_model import ModelExactSolution, ProblemSpec, evaluate_exact

logger = logging.getLogger(__name__)

_DEFAULT_ALPHA = 1.0
_DEFAULT_SIGMA0 = 2.0


@dataclass(frozen=True)
class SolutionGrid:
    """Nodal numerical solution (boundary values included) and, if known, the exact one."""

    mesh: Mesh1D
    u_numeric: np.ndarray
    u_exact: np.ndarray | None = None
    stats: SolveStats | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        size = self.mesh.points.size
        numeric = np.array(self.u_numeric, dtype=float)
        if numeric.shape != (size,):
            raise InvalidArgumentError(f"u_numeric has shape {numeric.shape}, mesh has {size} points")
        numeric.setflags(write=False)
        object.__setattr__(self, "u_numeric", numeric)
        if self.u_exact is not None:
            exact = np.array(self.u_exact, dtype=float)
            if exact.shape != (size,):
                raise InvalidArgumentError(f"u_exact has shape {exact.shape}, mesh has {size} points")
            exact.setflags(write=False)
            object.__setattr__(self, "u_exact", exact)

    @property
    def points(self) -> np.ndarray:
        return self.mesh.points


@dataclass(frozen=True)
class ConvergenceRow:
    n_intervals: int
    max_error: float
    observed_order: float | None = None
    theory_bound: float | None = None


@dataclass(frozen=True)
class ConvergenceReport:
    """One row per refinement level, ordered by increasing N."""

    rows: tuple[ConvergenceRow, ...]
    scheme: Scheme
    mesh_kind: MeshKind
    epsilon: float
    interior_points: bool = False

    def __post_init__(self) -> None:
        ns = [row.n_intervals for row in self.rows]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise InvalidArgumentError("report rows must have strictly increasing N")
        if self.rows and self.rows[0].observed_order is not None:
            raise InvalidArgumentError("the first row cannot carry an observed order")

    @property
    def n_list(self) -> list[int]:
        return [row.n_intervals for row in self.rows]

    @property
    def levels(self) -> list[int]:
        """The N each row was requested with: interior nodes or intervals."""
        offset = 1 if self.interior_points else 0
        return [row.n_intervals - offset for row in self.rows]

    @property
    def errors(self) -> list[float]:
        return [row.max_error for row in self.rows]

    @property
    def orders(self) -> list[float | None]:
        return [row.observed_order for row in self.rows]

    def fitted_constants(self) -> list[float]:
        """max_error * N / ln N per row; bounded when the N^-1 ln N rate holds."""
        return [fitted_constant(row.max_error, row.n_intervals) for row in self.rows]


# ---------------------------------------------------------------------------
# Error measures
# ---------------------------------------------------------------------------

def nodal_errors(grid: SolutionGrid) -> np.ndarray:
    """|u_numeric_i - u_exact_i| at every node."""
    if grid.u_exact is None:
        raise MissingExactSolutionError("the grid carries no exact solution")
    return np.abs(grid.u_numeric - grid.u_exact)


def max_norm_error(grid: SolutionGrid) -> float:
    """Discrete maximum norm of the nodal error."""
    return float(np.max(nodal_errors(grid)))


def observed_order(error_coarse: float, error_fine: float, refinement_ratio: float = 2.0) -> float:
    """log(e_coarse / e_fine) / log(ratio); the ratio is 2 for a doubling of N."""
    if not refinement_ratio > 1.0:
        raise InvalidArgumentError(f"refinement_ratio must exceed 1, got {refinement_ratio!r}")
    if not (error_coarse > 0.0 and error_fine > 0.0):
        raise InvalidArgumentError(
            f"errors must be positive, got {error_coarse!r} and {error_fine!r}"
        )
    return math.log(error_coarse / error_fine) / math.log(refinement_ratio)


def fitted_constant(max_error: float, n_intervals: int) -> float:
    if n_intervals < 2:
        raise DomainError(f"n_intervals must be at least 2, got {n_intervals}")
    return max_error * n_intervals / math.log(n_intervals)


# ---------------------------------------------------------------------------
# Theoretical envelopes
# ---------------------------------------------------------------------------

def uniform_upwind_envelope(x_i, h: float, epsilon: float, alpha: float, c_const: float):
    """C * (h + exp(-alpha*(1 - x_i)/(alpha*h + 2*eps))), the uniform-mesh upwind bound."""
    xs = np.asarray(x_i, dtype=float)
    if np.any(~np.isfinite(xs)) or np.any(xs < 0.0) or np.any(xs > 1.0):
        raise DomainError(f"x_i must lie in [0, 1], got {x_i!r}")
    for name, value in (("h", h), ("epsilon", epsilon), ("alpha", alpha), ("c_const", c_const)):
        if not value > 0.0:
            raise DomainError(f"{name} must be positive, got {value}")
    value = c_const * (h + np.exp(-alpha * (1.0 - xs) / (alpha * h + 2.0 * epsilon)))
    return float(value) if np.ndim(x_i) == 0 else value


def shishkin_envelope(n_intervals: int, c_const: float) -> float:
    """C * ln(N) / N, the Shishkin-mesh upwind bound."""
    if n_intervals < 2:
        raise DomainError(f"n_intervals must be at least 2, got {n_intervals}")
    if not c_const > 0.0:
        raise DomainError(f"c_const must be positive, got {c_const}")
    return c_const * math.log(n_intervals) / n_intervals


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------

def solve_bvp(problem: ProblemSpec, mesh: Mesh1D, scheme: Scheme) -> SolutionGrid:
    """Assemble, solve and reattach the boundary values; add the exact solution when known."""
    system = assemble(problem, mesh, scheme)
    interior, stats = thomas_solve(system)
    u_numeric = np.concatenate(([problem.u_left], interior, [problem.u_right]))

    u_exact = None
    if problem.is_model_problem():
        u_exact = evaluate_exact(ModelExactSolution.from_problem(problem), mesh.points)

    return SolutionGrid(mesh=mesh, u_numeric=u_numeric, u_exact=u_exact, stats=stats)


def build_mesh(
    kind: MeshKind,
    n_intervals: int,
    epsilon: float,
    alpha: float = _DEFAULT_ALPHA,
    sigma0: float = _DEFAULT_SIGMA0,
    interior_points: bool = False,
) -> Mesh1D:
    """Mesh of *kind* for level N; with *interior_points* N counts interior nodes (uniform only)."""
    if MeshKind(kind) is MeshKind.SHISHKIN:
        if interior_points:
            raise InvalidArgumentError("interior-point counting applies to the uniform mesh only")
        return shishkin_mesh(n_intervals, epsilon, alpha, sigma0)
    if interior_points:
        return uniform_mesh_interior(n_intervals)
    return uniform_mesh(n_intervals)


def refinement_study(
    problem: ProblemSpec,
    n_list,
    mesh_kind: MeshKind,
    scheme: Scheme,
    envelope_constant: float | None = None,
    sigma0: float = _DEFAULT_SIGMA0,
    workers: int = 1,
    interior_points: bool = False,
) -> ConvergenceReport:
    """Solve on every N in *n_list* and tabulate max-norm errors and observed orders.

    Orders are reported only between consecutive levels where N doubles.
    With *interior_points* each N counts interior nodes of a uniform mesh, so
    h = 1/(N + 1) and orders use the true ratio of interval counts.
    Shishkin meshes use problem.alpha in the transition point. Any failure
    aborts the whole study.
    """
    mesh_kind = MeshKind(mesh_kind)
    scheme = Scheme(scheme)
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise InvalidArgumentError("n_list must not be empty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise InvalidArgumentError(f"n_list must be strictly increasing, got {n_list}")
    if envelope_constant is not None and not envelope_constant > 0.0:
        raise InvalidArgumentError(f"envelope_constant must be positive, got {envelope_constant}")

    # every mesh is built before any solve so invalid levels fail fast
    meshes = [
        build_mesh(mesh_kind, n, problem.epsilon, problem.alpha, sigma0, interior_points) for n in n_list
    ]

    def _level_error(mesh: Mesh1D) -> float:
        return max_norm_error(solve_bvp(problem, mesh, scheme))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(_level_error, meshes))
    else:
        errors = [_level_error(m) for m in meshes]

    rows = []
    for i, (n, mesh, error) in enumerate(zip(n_list, meshes, errors)):
        order = None
        if i > 0:
            if n == 2 * n_list[i - 1]:
                ratio = mesh.n_intervals / meshes[i - 1].n_intervals
                order = observed_order(errors[i - 1], error, ratio)
            else:
                logger.debug(f"No order between N={n_list[i - 1]} and N={n}: not a doubling")
        bound = None
        if mesh_kind is MeshKind.SHISHKIN and envelope_constant is not None:
            bound = shishkin_envelope(n, envelope_constant)
        rows.append(
            ConvergenceRow(
                n_intervals=mesh.n_intervals, max_error=error, observed_order=order, theory_bound=bound
            )
        )
        logger.info(
            f"eps={problem.epsilon:g} {mesh_kind.value}/{scheme.value} N={n}: "
            f"error={error:.4e}" + (f" order={order:.4f}" if order is not None else "")
        )

    return ConvergenceReport(
        rows=tuple(rows),
        scheme=scheme,
        mesh_kind=mesh_kind,
        epsilon=problem.epsilon,
        interior_points=interior_points,
    )
