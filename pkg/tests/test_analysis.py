import math

import numpy as np
import pytest

from analysis import (
    ConvergenceReport,
    ConvergenceRow,
    SolutionGrid,
    build_mesh,
    fitted_constant,
    max_norm_error,
    nodal_errors,
    observed_order,
    refinement_study,
    shishkin_envelope,
    solve_bvp,
    uniform_upwind_envelope,
)
from convdiff_errors import DomainError, InvalidArgumentError, MissingExactSolutionError
from discretization import Scheme
from mesh import MeshKind, shishkin_mesh, uniform_mesh, uniform_mesh_interior
from problem_model import ProblemSpec

N_LIST = [256, 512, 1024, 2048, 4096, 8192, 16384]

# Published reference errors and rates for the model problem
SMOOTH_CENTRAL_ERRORS = [2.28e-07, 5.73e-08, 1.43e-08, 3.59e-09, 8.99e-10, 2.70e-10, 5.50e-11]
SHISHKIN_UPWIND_ERRORS = {
    1e-4: [0.0063, 0.0038, 0.0022, 0.0013, 7.38e-04, 4.35e-04, 2.66e-04],
    1e-6: [0.0063, 0.0037, 0.0021, 0.0012, 6.78e-04, 3.74e-04, 2.04e-04],
    1e-8: [0.0063, 0.0037, 0.0021, 0.0012, 6.78e-04, 3.74e-04, 2.04e-04],
}
SHISHKIN_UPWIND_RATES = [0.6933, 0.7506, 0.7913, 0.8204, 0.8420, 0.8587, 0.8719]


def _within_factor(value, reference, factor):
    return reference / factor <= value <= reference * factor


@pytest.fixture(scope="module")
def smooth_central_report():
    return refinement_study(ProblemSpec.model(1.0), N_LIST, MeshKind.UNIFORM, Scheme.CENTRAL_UNIFORM)


@pytest.fixture(scope="module")
def shishkin_reports():
    return {
        eps: refinement_study(ProblemSpec.model(eps), N_LIST, MeshKind.SHISHKIN, Scheme.UPWIND)
        for eps in SHISHKIN_UPWIND_ERRORS
    }


# ---------------------------------------------------------------------------
# Error measures
# ---------------------------------------------------------------------------

class TestErrorMeasures:
    def test_max_norm_error(self):
        grid = SolutionGrid(mesh=uniform_mesh(2), u_numeric=[0.0, 0.0625, 0.0], u_exact=[0.0, 0.05, 0.0])
        assert max_norm_error(grid) == pytest.approx(0.0125)
        assert nodal_errors(grid) == pytest.approx([0.0, 0.0125, 0.0])

    def test_identical_solutions(self):
        values = [0.0, 0.1, 0.2, 0.0]
        grid = SolutionGrid(mesh=uniform_mesh(3), u_numeric=values, u_exact=values)
        assert max_norm_error(grid) == 0.0

    def test_missing_exact_solution(self):
        grid = SolutionGrid(mesh=uniform_mesh(2), u_numeric=[0.0, 1.0, 0.0])
        with pytest.raises(MissingExactSolutionError):
            max_norm_error(grid)

    def test_grid_shape_checked(self):
        with pytest.raises(InvalidArgumentError):
            SolutionGrid(mesh=uniform_mesh(4), u_numeric=[0.0, 1.0, 0.0])
        with pytest.raises(InvalidArgumentError):
            SolutionGrid(mesh=uniform_mesh(2), u_numeric=[0.0, 1.0, 0.0], u_exact=[0.0, 1.0])


class TestObservedOrder:
    def test_exact_quartering(self):
        assert observed_order(0.1, 0.025) == pytest.approx(2.0)

    def test_rounded_table_entries(self):
        assert observed_order(0.0063, 0.0037) == pytest.approx(0.768, abs=1e-3)

    def test_refinement_ratio(self):
        assert observed_order(0.09, 0.01, refinement_ratio=3.0) == pytest.approx(2.0)
        assert observed_order(0.5, 0.5, refinement_ratio=513 / 257) == 0.0

    @pytest.mark.parametrize("ratio", [1.0, 0.5, 0.0])
    def test_rejects_ratio_at_most_one(self, ratio):
        with pytest.raises(InvalidArgumentError):
            observed_order(0.1, 0.05, refinement_ratio=ratio)

    @pytest.mark.parametrize("coarse, fine", [(0.0, 0.1), (0.1, 0.0), (-1.0, 0.1)])
    def test_rejects_non_positive(self, coarse, fine):
        with pytest.raises(InvalidArgumentError):
            observed_order(coarse, fine)


def test_fitted_constant():
    assert fitted_constant(0.0063, 256) == pytest.approx(0.0063 * 256 / math.log(256))
    with pytest.raises(DomainError):
        fitted_constant(0.1, 1)


# ---------------------------------------------------------------------------
# Envelopes
# ---------------------------------------------------------------------------

class TestEnvelopes:
    def test_uniform_upwind_at_layer(self):
        assert uniform_upwind_envelope(1.0, 0.1, 0.01, 1.0, 1.0) == pytest.approx(1.1)

    def test_uniform_upwind_away_from_layer(self):
        assert uniform_upwind_envelope(0.5, 0.01, 1e-8, 1.0, 1.0) == pytest.approx(0.01, rel=1e-12)

    def test_uniform_upwind_array(self):
        values = uniform_upwind_envelope(np.array([0.0, 0.5, 1.0]), 0.1, 0.01, 1.0, 1.0)
        assert values.shape == (3,)
        assert np.all(np.diff(values) > 0.0)

    @pytest.mark.parametrize(
        "args",
        [(1.5, 0.1, 0.01, 1.0, 1.0), (0.5, 0.0, 0.01, 1.0, 1.0), (0.5, 0.1, 0.01, 1.0, -1.0)],
    )
    def test_uniform_upwind_invalid(self, args):
        with pytest.raises(DomainError):
            uniform_upwind_envelope(*args)

    def test_shishkin(self):
        assert shishkin_envelope(256, 1.0) == pytest.approx(0.0216608, abs=1e-7)
        assert shishkin_envelope(512, 1.0) == pytest.approx(0.0121842, abs=1e-7)
        assert shishkin_envelope(2, 1.0) == pytest.approx(0.34657, abs=1e-5)

    def test_shishkin_decreasing(self):
        values = [shishkin_envelope(n, 1.0) for n in range(3, 200)]
        assert all(b < a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("n, c", [(1, 1.0), (256, 0.0)])
    def test_shishkin_invalid(self, n, c):
        with pytest.raises(DomainError):
            shishkin_envelope(n, c)


# ---------------------------------------------------------------------------
# solve_bvp
# ---------------------------------------------------------------------------

class TestSolveBvp:
    def test_smooth_central(self):
        grid = solve_bvp(ProblemSpec.model(1.0), uniform_mesh(256), Scheme.CENTRAL_UNIFORM)
        assert _within_factor(max_norm_error(grid), 2.28e-7, 3.0)
        assert grid.stats.n == 255

    def test_shishkin_upwind_tiny_epsilon(self):
        grid = solve_bvp(ProblemSpec.model(1e-8), shishkin_mesh(256, 1e-8), Scheme.UPWIND)
        assert _within_factor(max_norm_error(grid), 0.0063, 2.0)

    def test_boundary_values_attached(self):
        problem = ProblemSpec(epsilon=0.1, source_f=lambda x: 0.0 * x, u_left=1.0, u_right=1.0)
        grid = solve_bvp(problem, uniform_mesh(32), Scheme.UPWIND)
        assert grid.u_numeric[0] == 1.0 and grid.u_numeric[-1] == 1.0
        assert np.allclose(grid.u_numeric, 1.0, rtol=0.0, atol=1e-12)
        assert grid.u_exact is None

    def test_zero_source_gives_zero(self):
        problem = ProblemSpec(epsilon=1e-3, source_f=lambda x: 0.0 * x)
        grid = solve_bvp(problem, shishkin_mesh(64, 1e-3), Scheme.UPWIND)
        assert np.all(grid.u_numeric == 0.0)

    def test_variable_coefficient(self):
        # -eps*u'' + (1 + x)u' = 1 + x has u = x plus a layer correction at x = 1
        problem = ProblemSpec(epsilon=1e-6, coeff_a=lambda x: 1.0 + x, source_f=lambda x: 1.0 + x)
        grid = solve_bvp(problem, shishkin_mesh(512, 1e-6), Scheme.UPWIND)
        outer = grid.points < 0.5
        assert np.max(np.abs(grid.u_numeric[outer] - grid.points[outer])) <= 1e-10

    def test_build_mesh(self):
        assert build_mesh(MeshKind.UNIFORM, 8, 1e-3).kind is MeshKind.UNIFORM
        assert build_mesh("shishkin", 8, 1e-3).transition == pytest.approx(1.0 - 2e-3 * math.log(8))


# ---------------------------------------------------------------------------
# Smooth regime: eps = 1, central scheme, uniform meshes
# ---------------------------------------------------------------------------

class TestSmoothRegime:
    def test_errors_match_reference(self, smooth_central_report):
        for n, error, reference in zip(N_LIST, smooth_central_report.errors, SMOOTH_CENTRAL_ERRORS):
            if n <= 4096:
                assert _within_factor(error, reference, 3.0), (n, error)
            else:
                # round-off floor
                assert error <= 1e-8, (n, error)

    def test_second_order(self, smooth_central_report):
        for n, order in zip(N_LIST, smooth_central_report.orders):
            if 256 < n <= 4096:
                assert order == pytest.approx(2.0, abs=0.05), (n, order)

    def test_first_row_has_no_order(self, smooth_central_report):
        assert smooth_central_report.orders[0] is None
        assert all(row.theory_bound is None for row in smooth_central_report.rows)


# ---------------------------------------------------------------------------
# Uniform-mesh failure: central scheme, eps = 1e-8
# ---------------------------------------------------------------------------

class TestUniformMeshFailure:
    @pytest.mark.parametrize("n", N_LIST)
    def test_error_plateau(self, n):
        # N interior points, h = 1/(N + 1): odd nodes sit a full 1/2 off the exact solution
        grid = solve_bvp(ProblemSpec.model(1e-8), uniform_mesh_interior(n), Scheme.CENTRAL_UNIFORM)
        errors = nodal_errors(grid)
        assert np.max(errors) == pytest.approx(0.5, abs=0.02)
        assert errors[n - 1] == pytest.approx(0.5, abs=0.02)

    @pytest.mark.parametrize("n", [256, 512, 1024])
    def test_error_plateau_moderate_epsilon(self, n):
        grid = solve_bvp(ProblemSpec.model(1e-6), uniform_mesh_interior(n), Scheme.CENTRAL_UNIFORM)
        assert max_norm_error(grid) == pytest.approx(0.5, abs=0.02)

    def test_plateau_study_has_zero_order(self):
        report = refinement_study(
            ProblemSpec.model(1e-8), [256, 512, 1024], MeshKind.UNIFORM, Scheme.CENTRAL_UNIFORM,
            interior_points=True,
        )
        assert report.levels == [256, 512, 1024]
        assert report.n_list == [257, 513, 1025]
        assert report.errors == pytest.approx([0.5, 0.5, 0.5], abs=0.02)
        assert report.orders[1:] == pytest.approx([0.0, 0.0], abs=0.1)

    @pytest.mark.parametrize("n", [256, 1024])
    def test_even_interval_count_is_worse(self, n):
        # an even interval count decouples the even and odd nodes
        grid = solve_bvp(ProblemSpec.model(1e-8), uniform_mesh(n), Scheme.CENTRAL_UNIFORM)
        assert max_norm_error(grid) >= 0.4

    def test_central_oscillates_where_upwind_is_monotone(self):
        eps, n = 1e-6, 256
        central = solve_bvp(ProblemSpec.model(eps), uniform_mesh(n), Scheme.CENTRAL_UNIFORM)
        diffs = np.diff(central.u_numeric[-11:])
        assert np.any(diffs[:-1] * diffs[1:] < 0.0)

        upwind = solve_bvp(ProblemSpec.model(eps), shishkin_mesh(n, eps), Scheme.UPWIND)
        diffs = np.diff(upwind.u_numeric)
        peak = int(np.argmax(upwind.u_numeric))
        assert np.all(diffs[:peak] >= 0.0)
        assert np.all(diffs[peak:] <= 0.0)


# ---------------------------------------------------------------------------
# Shishkin mesh with upwinding: robustness and rates
# ---------------------------------------------------------------------------

class TestShishkinUpwind:
    @pytest.mark.parametrize("eps", sorted(SHISHKIN_UPWIND_ERRORS))
    def test_errors_match_reference(self, shishkin_reports, eps):
        for n, error, reference in zip(N_LIST, shishkin_reports[eps].errors, SHISHKIN_UPWIND_ERRORS[eps]):
            assert _within_factor(error, reference, 2.0), (eps, n, error)

    def test_epsilon_uniform(self, shishkin_reports):
        for e6, e8 in zip(shishkin_reports[1e-6].errors, shishkin_reports[1e-8].errors):
            assert abs(e6 - e8) <= 0.05 * e8

    def test_rates_increase_toward_one(self):
        report = refinement_study(ProblemSpec.model(1e-8), [128] + N_LIST, MeshKind.SHISHKIN, Scheme.UPWIND)
        orders = report.orders[1:]
        for order, reference in zip(orders, SHISHKIN_UPWIND_RATES):
            assert order == pytest.approx(reference, abs=0.1)
        assert all(b > a for a, b in zip(orders, orders[1:]))

    @pytest.mark.parametrize("eps", sorted(SHISHKIN_UPWIND_ERRORS))
    def test_fitted_constant_stays_bounded(self, shishkin_reports, eps):
        constants = shishkin_reports[eps].fitted_constants()
        assert max(constants) / min(constants) <= 4.0

    def test_below_shishkin_envelope(self, shishkin_reports):
        for n, error in zip(N_LIST, shishkin_reports[1e-8].errors):
            assert error <= shishkin_envelope(n, 1.0)

    @pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-4, 1e-8])
    def test_discrete_maximum_principle(self, eps):
        grid = solve_bvp(ProblemSpec.model(eps), shishkin_mesh(512, eps), Scheme.UPWIND)
        assert np.min(grid.u_numeric) >= -1e-12


def test_uniform_upwind_within_envelope():
    eps, n = 1e-8, 256
    grid = solve_bvp(ProblemSpec.model(eps), uniform_mesh(n), Scheme.UPWIND)
    envelope = uniform_upwind_envelope(grid.points, 1.0 / n, eps, 1.0, 10.0)
    assert np.all(nodal_errors(grid) <= envelope)


# ---------------------------------------------------------------------------
# refinement_study bookkeeping
# ---------------------------------------------------------------------------

class TestRefinementStudy:
    def test_non_doubling_pair_has_no_order(self):
        report = refinement_study(ProblemSpec.model(1e-2), [256, 768], MeshKind.SHISHKIN, Scheme.UPWIND)
        assert report.orders == [None, None]
        assert report.n_list == [256, 768]

    def test_theory_bound(self):
        report = refinement_study(
            ProblemSpec.model(1e-4), [256, 512], MeshKind.SHISHKIN, Scheme.UPWIND, envelope_constant=1.0
        )
        assert [row.theory_bound for row in report.rows] == pytest.approx([0.0216608, 0.0121842], abs=1e-7)

    def test_no_theory_bound_on_uniform(self):
        report = refinement_study(
            ProblemSpec.model(1e-2), [64, 128], MeshKind.UNIFORM, Scheme.UPWIND, envelope_constant=1.0
        )
        assert [row.theory_bound for row in report.rows] == [None, None]

    def test_workers_give_same_report(self):
        problem = ProblemSpec.model(1e-6)
        serial = refinement_study(problem, [64, 128, 256], MeshKind.SHISHKIN, Scheme.UPWIND)
        threaded = refinement_study(problem, [64, 128, 256], MeshKind.SHISHKIN, Scheme.UPWIND, workers=2)
        assert serial == threaded

    def test_metadata(self):
        report = refinement_study(ProblemSpec.model(1e-2), [16, 32], "uniform", "upwind")
        assert report.scheme is Scheme.UPWIND
        assert report.mesh_kind is MeshKind.UNIFORM
        assert report.epsilon == 1e-2
        assert report.interior_points is False
        assert report.levels == report.n_list == [16, 32]

    def test_interior_points_orders_reported(self):
        report = refinement_study(
            ProblemSpec.model(1.0), [63, 126], MeshKind.UNIFORM, Scheme.CENTRAL_UNIFORM, interior_points=True
        )
        assert report.levels == [63, 126]
        assert report.n_list == [64, 127]
        assert report.orders[1] == pytest.approx(2.0, abs=0.05)

    def test_interior_points_need_uniform_mesh(self):
        with pytest.raises(InvalidArgumentError):
            refinement_study(
                ProblemSpec.model(1e-2), [256, 512], MeshKind.SHISHKIN, Scheme.UPWIND, interior_points=True
            )

    @pytest.mark.parametrize("n_list", [[], [512, 256], [256, 256]])
    def test_invalid_lists(self, n_list):
        with pytest.raises(InvalidArgumentError):
            refinement_study(ProblemSpec.model(1e-2), n_list, MeshKind.SHISHKIN, Scheme.UPWIND)

    def test_odd_level_fails_whole_study(self):
        with pytest.raises(InvalidArgumentError):
            refinement_study(ProblemSpec.model(1e-2), [256, 257], MeshKind.SHISHKIN, Scheme.UPWIND)

    def test_invalid_envelope_constant(self):
        with pytest.raises(InvalidArgumentError):
            refinement_study(
                ProblemSpec.model(1e-2), [16], MeshKind.SHISHKIN, Scheme.UPWIND, envelope_constant=0.0
            )

    def test_central_on_shishkin_rejected(self):
        with pytest.raises(InvalidArgumentError):
            refinement_study(ProblemSpec.model(1e-2), [16], MeshKind.SHISHKIN, Scheme.CENTRAL_UNIFORM)


class TestConvergenceReport:
    def test_rows_must_increase(self):
        rows = (ConvergenceRow(512, 0.1), ConvergenceRow(256, 0.2))
        with pytest.raises(InvalidArgumentError):
            ConvergenceReport(rows=rows, scheme=Scheme.UPWIND, mesh_kind=MeshKind.SHISHKIN, epsilon=0.1)

    def test_first_row_without_order(self):
        rows = (ConvergenceRow(256, 0.1, observed_order=1.0),)
        with pytest.raises(InvalidArgumentError):
            ConvergenceReport(rows=rows, scheme=Scheme.UPWIND, mesh_kind=MeshKind.SHISHKIN, epsilon=0.1)
