#!/usr/bin/env python3
"""
Convection-diffusion CLI - solve -eps*u'' + u' = x, u(0) = u(1) = 0 from the command line

Usage:
    python convdiff_cli.py solve --eps 1e-8 --n 256 --mesh shishkin --scheme upwind --out u.csv
    python convdiff_cli.py study --eps 1e-2 1e-4 1e-6 1e-8 --n 256 512 1024 --format table
    python convdiff_cli.py study --eps 1e-8 --n 256 512 --mesh uniform --scheme central --interior-points
    python convdiff_cli.py bounds --n 256 512 --const 1
    python convdiff_cli.py bounds --mesh uniform --eps 1e-8 --n 256
    python convdiff_cli.py bench --eps 1 1e-8 --n 128 256 512 1024

Exit codes: 0 success, 1 computation failure, 2 usage error.
Set LOG_LEVEL (DEBUG, INFO, WARNING, ERROR) for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from analysis import (
    build_mesh,
    max_norm_error,
    nodal_errors,
    refinement_study,
    shishkin_envelope,
    solve_bvp,
    uniform_upwind_envelope,
)
from convdiff_errors import ConvDiffError, InvalidArgumentError
from discretization import Scheme, assemble
from linear_solver import thomas_solve
from mesh import MeshKind, check_intervals, check_shishkin_resolution, uniform_mesh, uniform_mesh_interior
from problem_model import ProblemSpec

logger = logging.getLogger(__name__)

_DEFAULT_ALPHA = 1.0
_DEFAULT_SIGMA0 = 2.0
_DEFAULT_CONST = 1.0
_DEFAULT_LOG_LEVEL = "WARNING"

EXIT_OK = 0
EXIT_FAILURE = 1

SOLVE_HEADER = ("x", "u_numeric", "u_exact", "abs_error")
STUDY_HEADER = ("epsilon", "N", "max_error", "order", "theory_bound")
SHISHKIN_BOUNDS_HEADER = ("N", "shishkin_bound")
UNIFORM_BOUNDS_HEADER = ("epsilon", "N", "x", "uniform_upwind_bound")
BENCH_HEADER = ("epsilon", "N", "unknowns", "assemble_seconds", "solve_seconds")


class Command(str, Enum):
    SOLVE = "solve"
    STUDY = "study"
    BOUNDS = "bounds"
    BENCH = "bench"


class OutputFormat(str, Enum):
    CSV = "csv"
    TABLE = "table"


@dataclass(frozen=True)
class RunConfig:
    """Fully validated command-line request."""

    command: Command
    epsilons: tuple[float, ...]
    n_list: tuple[int, ...]
    mesh_kind: MeshKind = MeshKind.SHISHKIN
    scheme: Scheme = Scheme.UPWIND
    alpha: float = _DEFAULT_ALPHA
    sigma0: float = _DEFAULT_SIGMA0
    c_const: float = _DEFAULT_CONST
    output_path: str | None = None
    output_format: OutputFormat = OutputFormat.CSV
    interior_points: bool = False


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

def _fmt_number(value) -> str:
    """Shortest round-trip decimal; blank for missing values."""
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _fmt_display(value, digits: int = 4) -> str:
    if value is None:
        return "-"
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.{digits}e}"


def render_csv(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt_number(v) for v in row])
    return buffer.getvalue()


def render_table(header, rows, title: str | None = None) -> str:
    cells = [list(header)] + [[_fmt_display(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    if title:
        lines.append(title)
    lines.append("  ".join(c.rjust(w) for c, w in zip(cells[0], widths)))
    lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    for r in cells[1:]:
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


def render_grid_table(title: str, epsilons, n_list, values) -> str:
    """eps rows by N columns, the layout of the published error and rate tables."""
    header = ["eps \\ N"] + [str(n) for n in n_list]
    rows = []
    for eps in epsilons:
        rows.append([f"{eps:g}"] + [_fmt_display(values.get((eps, n)), 4) for n in n_list])
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = [title, "  ".join(c.rjust(w) for c, w in zip(header, widths))]
    lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    for r in rows:
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


def _write_output(config: RunConfig, text: str) -> None:
    if config.output_path:
        Path(config.output_path).write_text(text)
        logger.info(f"Wrote {config.output_path}")
    else:
        sys.stdout.write(text)


def _summary(config: RunConfig, message: str) -> None:
    """Human-readable lines go to stdout unless stdout is carrying the data."""
    stream = sys.stdout if config.output_path else sys.stderr
    print(message, file=stream)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_solve(config: RunConfig) -> int:
    """Single solve of the model problem; writes x,u_numeric,u_exact,abs_error."""
    eps = config.epsilons[0]
    n = config.n_list[0]
    problem = ProblemSpec(epsilon=eps, alpha=config.alpha)
    mesh = build_mesh(config.mesh_kind, n, eps, config.alpha, config.sigma0, config.interior_points)
    grid = solve_bvp(problem, mesh, config.scheme)

    errors = nodal_errors(grid)
    rows = [
        (x, u, ue, err)
        for x, u, ue, err in zip(grid.points.tolist(), grid.u_numeric.tolist(), grid.u_exact.tolist(), errors.tolist())
    ]
    if config.output_format is OutputFormat.TABLE:
        title = f"eps={eps:g}, N={n}, {config.mesh_kind.value} mesh, {config.scheme.value} scheme"
        text = render_table(SOLVE_HEADER, rows, title=title)
    else:
        text = render_csv(SOLVE_HEADER, rows)
    _write_output(config, text)

    _summary(config, f"Max error:  {max_norm_error(grid):.6e}")
    _summary(config, f"Solve time: {grid.stats.elapsed:.6f}s")
    return EXIT_OK


def cmd_study(config: RunConfig) -> int:
    """Refinement study per eps; writes epsilon,N,max_error,order,theory_bound."""
    envelope = config.c_const if config.mesh_kind is MeshKind.SHISHKIN else None
    reports = []
    for eps in config.epsilons:
        problem = ProblemSpec(epsilon=eps, alpha=config.alpha)
        reports.append(refinement_study(
            problem,
            config.n_list,
            config.mesh_kind,
            config.scheme,
            envelope_constant=envelope,
            sigma0=config.sigma0,
            interior_points=config.interior_points,
        ))

    if config.output_format is OutputFormat.TABLE:
        errors, orders = {}, {}
        for report in reports:
            for n, row in zip(report.levels, report.rows):
                errors[(report.epsilon, n)] = row.max_error
                orders[(report.epsilon, n)] = row.observed_order
        label = f"{config.mesh_kind.value} mesh, {config.scheme.value} scheme"
        text = (
            render_grid_table(f"Maximum norm error ({label})", config.epsilons, config.n_list, errors)
            + "\n"
            + render_grid_table(f"Observed order ({label})", config.epsilons, config.n_list, orders)
        )
    else:
        rows = [
            (report.epsilon, n, row.max_error, row.observed_order, row.theory_bound)
            for report in reports
            for n, row in zip(report.levels, report.rows)
        ]
        text = render_csv(STUDY_HEADER, rows)
    _write_output(config, text)
    return EXIT_OK


def cmd_bounds(config: RunConfig) -> int:
    """Tabulate C ln N / N over the N list, or the uniform-mesh upwind bound over nodes."""
    if config.mesh_kind is MeshKind.SHISHKIN:
        header = SHISHKIN_BOUNDS_HEADER
        rows = [(n, shishkin_envelope(n, config.c_const)) for n in config.n_list]
    else:
        header = UNIFORM_BOUNDS_HEADER
        rows = []
        for eps in config.epsilons:
            for n in config.n_list:
                mesh = uniform_mesh_interior(n) if config.interior_points else uniform_mesh(n)
                h = 1.0 / mesh.n_intervals
                bounds = uniform_upwind_envelope(mesh.points, h, eps, config.alpha, config.c_const)
                rows.extend((eps, n, x, b) for x, b in zip(mesh.points.tolist(), bounds.tolist()))

    if config.output_format is OutputFormat.TABLE:
        text = render_table(header, rows, title=f"Error bounds (C={config.c_const:g})")
    else:
        text = render_csv(header, rows)
    _write_output(config, text)
    return EXIT_OK


def cmd_bench(config: RunConfig) -> int:
    """Time assembly and the Thomas solve separately for every (eps, N)."""
    rows = []
    for eps in config.epsilons:
        problem = ProblemSpec(epsilon=eps, alpha=config.alpha)
        for n in config.n_list:
            mesh = build_mesh(config.mesh_kind, n, eps, config.alpha, config.sigma0, config.interior_points)
            start = time.perf_counter()
            system = assemble(problem, mesh, config.scheme)
            assemble_seconds = time.perf_counter() - start
            _, stats = thomas_solve(system)
            rows.append((eps, n, system.n, assemble_seconds, stats.elapsed))
            logger.info(f"bench eps={eps:g} N={n}: assemble {assemble_seconds:.4f}s, solve {stats.elapsed:.4f}s")

    if config.output_format is OutputFormat.TABLE:
        text = render_table(BENCH_HEADER, rows, title="CPU time in seconds")
    else:
        text = render_csv(BENCH_HEADER, rows)
    _write_output(config, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------

def _split_values(values, cast) -> tuple:
    """Flatten '--n 256 512' and '--n 256,512' alike."""
    out = []
    for value in values or []:
        for part in str(value).split(","):
            part = part.strip()
            if part:
                out.append(cast(part))
    return tuple(out)


def _parse_int(text: str) -> int:
    number = float(text)
    if not number.is_integer():
        raise ValueError(f"not an integer: {text}")
    return int(number)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convdiff_cli.py",
        description="Singularly perturbed convection-diffusion solver on uniform and Shishkin meshes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("solve", "single solve, nodal solution as output"),
        ("study", "refinement study: max-norm errors and observed orders"),
        ("bounds", "tabulate theoretical error bounds"),
        ("bench", "time assembly and solve over a sequence of meshes"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--eps", nargs="+", default=None, help="perturbation parameter(s) in (0, 1]")
        p.add_argument("--n", nargs="+", required=True, help="number(s) of mesh intervals")
        p.add_argument("--mesh", choices=[k.value for k in MeshKind], default=MeshKind.SHISHKIN.value)
        p.add_argument("--scheme", choices=[s.value for s in Scheme], default=Scheme.UPWIND.value)
        p.add_argument("--alpha", type=float, default=_DEFAULT_ALPHA, help="lower bound of a(x) (default 1)")
        p.add_argument("--sigma0", type=float, default=_DEFAULT_SIGMA0, help="transition constant (default 2)")
        p.add_argument("--const", type=float, default=_DEFAULT_CONST, dest="c_const",
                       help="constant C of the theoretical bounds (default 1)")
        p.add_argument("--out", default=None, help="output file (default: standard output)")
        p.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
        p.add_argument("--interior-points", action="store_true",
                       help="count --n as interior nodes, h = 1/(N+1) (uniform mesh only)")

    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """Turn parsed arguments into a RunConfig, checking every downstream precondition."""
    command = Command(args.command)
    mesh_kind = MeshKind(args.mesh)
    scheme = Scheme(args.scheme)

    try:
        epsilons = _split_values(args.eps, float)
        n_list = _split_values(args.n, _parse_int)
    except ValueError as e:
        raise InvalidArgumentError(f"invalid number: {e}") from None

    if not n_list:
        raise InvalidArgumentError("--n needs at least one value")
    needs_eps = command is not Command.BOUNDS or mesh_kind is MeshKind.UNIFORM
    if needs_eps and not epsilons:
        raise InvalidArgumentError("--eps needs at least one value")
    for eps in epsilons:
        if not (0.0 < eps <= 1.0):
            raise InvalidArgumentError(f"epsilon must lie in (0, 1], got {eps}")
    for name, value in (("--alpha", args.alpha), ("--sigma0", args.sigma0), ("--const", args.c_const)):
        if not value > 0.0:
            raise InvalidArgumentError(f"{name} must be positive, got {value}")
    # bounds only evaluate formulas; alpha is free there
    if command is not Command.BOUNDS and args.alpha > 1.0:
        raise InvalidArgumentError(f"--alpha cannot exceed the model coefficient a = 1, got {args.alpha}")

    if args.interior_points and mesh_kind is not MeshKind.UNIFORM:
        raise InvalidArgumentError("--interior-points needs --mesh uniform")
    if command is Command.BOUNDS and mesh_kind is MeshKind.SHISHKIN:
        for n in n_list:
            if n < 2:
                raise InvalidArgumentError(f"N must be at least 2, got {n}")
    elif args.interior_points:
        for n in n_list:
            if n < 1:
                raise InvalidArgumentError(f"N must count at least one interior point, got {n}")
    else:
        for n in n_list:
            check_intervals(n, mesh_kind)
    if command is not Command.BOUNDS and mesh_kind is MeshKind.SHISHKIN:
        for eps in epsilons:
            for n in n_list:
                check_shishkin_resolution(n, eps, args.alpha, args.sigma0)

    if command is not Command.BOUNDS and scheme is Scheme.CENTRAL_UNIFORM and mesh_kind is not MeshKind.UNIFORM:
        raise InvalidArgumentError("the central scheme needs --mesh uniform")
    if command is Command.SOLVE and (len(epsilons) != 1 or len(n_list) != 1):
        raise InvalidArgumentError("solve takes exactly one --eps and one --n")
    if command is Command.STUDY and any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise InvalidArgumentError("--n must be strictly increasing for a study")

    return RunConfig(
        command=command,
        epsilons=epsilons,
        n_list=n_list,
        mesh_kind=mesh_kind,
        scheme=scheme,
        alpha=args.alpha,
        sigma0=args.sigma0,
        c_const=args.c_const,
        output_path=args.out,
        output_format=OutputFormat(args.format),
        interior_points=args.interior_points,
    )


_logging_ready = False


def _setup_logging() -> None:
    global _logging_ready
    if _logging_ready:
        return
    log_level = os.environ.get("LOG_LEVEL", _DEFAULT_LOG_LEVEL)
    level = getattr(logging, log_level.upper(), logging.WARNING)
    if not isinstance(level, int):
        level = logging.WARNING
    formatter = logging.Formatter(
        "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    console_handler = logging.StreamHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)

    root = logging.getLogger()
    root.setLevel(level)
    root.addHandler(console_handler)
    _logging_ready = True


COMMANDS = {
    Command.SOLVE: cmd_solve,
    Command.STUDY: cmd_study,
    Command.BOUNDS: cmd_bounds,
    Command.BENCH: cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
    except InvalidArgumentError as e:
        parser.error(str(e))

    try:
        return COMMANDS[config.command](config)
    except (ConvDiffError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
