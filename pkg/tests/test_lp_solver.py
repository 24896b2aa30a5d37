import numpy as np
import pytest

from services.lp_solver import LpModel, LpStatus, lp_solver
from utils.errors import InvalidMark


def small_model() -> LpModel:
    """min -x - y  s.t.  x + 2y <= 4,  3x + y <= 6,  x, y >= 0"""
    lp = LpModel('small')
    x = lp.add_variable(0.0, np.inf, -1.0, 'x')
    y = lp.add_variable(0.0, np.inf, -1.0, 'y')
    lp.add_row({x: 1.0, y: 2.0}, '<=', 4.0, 'c1')
    lp.add_row({x: 3.0, y: 1.0}, '<=', 6.0, 'c2')
    return lp


def test_cold_solve_matches_vertex():
    result = lp_solver.solve(small_model())
    assert result.status is LpStatus.OPTIMAL
    assert result.objective == pytest.approx(-2.8, abs=1e-9)
    assert result.primal == pytest.approx([1.6, 1.2], abs=1e-9)


def test_duals_and_reduced_costs_follow_c_minus_aty():
    lp = small_model()
    result = lp_solver.solve(lp)
    A = lp.dense_matrix()
    assert result.reduced_costs == pytest.approx(lp.cost - result.duals @ A, abs=1e-9)
    assert result.objective == pytest.approx(result.duals @ lp.rhs(), abs=1e-9)


def test_highs_agrees_with_simplex():
    lp = small_model()
    lp.add_row({0: 1.0, 1: 1.0}, '>=', 1.0, 'c3')
    ours = lp_solver.solve(lp)
    theirs = lp_solver.solve_highs(lp)
    assert ours.objective == pytest.approx(theirs.objective, abs=1e-8)


def test_warm_start_after_bound_change():
    lp = small_model()
    first = lp_solver.solve(lp)
    mark = lp.checkpoint()
    lp.change_bounds(0, 0.0, 1.0)
    warm = lp_solver.solve(lp, first.basis)
    cold = lp_solver.solve(lp)
    assert warm.status is LpStatus.OPTIMAL
    assert warm.objective == pytest.approx(cold.objective, abs=1e-9)
    assert warm.objective == pytest.approx(-2.5, abs=1e-9)
    lp.revert(mark)
    assert lp_solver.solve(lp, warm.basis).objective == pytest.approx(-2.8, abs=1e-9)


def test_revert_removes_rows_added_after_mark():
    lp = small_model()
    mark = lp.checkpoint()
    lp.add_row({0: 1.0}, '<=', 0.5, 'cut')
    assert lp.num_rows == 3
    assert lp_solver.solve(lp).objective == pytest.approx(-2.25, abs=1e-9)
    lp.revert(mark)
    assert lp.num_rows == 2
    with pytest.raises(InvalidMark):
        lp.revert(mark + 5)


def test_infeasible_and_unbounded():
    lp = small_model()
    lp.add_row({0: 1.0, 1: 1.0}, '>=', 10.0, 'far')
    assert lp_solver.solve(lp).status is LpStatus.INFEASIBLE

    open_lp = LpModel('open')
    x = open_lp.add_variable(0.0, np.inf, -1.0, 'x')
    y = open_lp.add_variable(0.0, np.inf, 0.0, 'y')
    open_lp.add_row({x: 1.0, y: -1.0}, '<=', 1.0, 'r')
    assert lp_solver.solve(open_lp).status is LpStatus.UNBOUNDED


def test_crossed_bounds_short_circuit():
    lp = small_model()
    lp.change_bounds(0, 2.0, 1.0)
    assert lp_solver.solve(lp).status is LpStatus.INFEASIBLE


def test_equality_rows_and_free_variables():
    lp = LpModel('eq')
    x = lp.add_variable(-np.inf, np.inf, 1.0, 'x')
    y = lp.add_variable(0.0, 3.0, 2.0, 'y')
    lp.add_row({x: 1.0, y: 1.0}, '=', 5.0, 'sum')
    lp.add_row({x: 1.0}, '>=', -1.0, 'floor')
    result = lp_solver.solve(lp)
    assert result.status is LpStatus.OPTIMAL
    assert result.primal == pytest.approx([5.0, 0.0], abs=1e-9)


def test_variables_cannot_be_added_after_edits():
    lp = small_model()
    with pytest.raises(ValueError):
        lp.add_variable(0.0, 1.0, 0.0, 'late')


def test_mps_export_lists_rows_and_bounds():
    lp = small_model()
    lp.change_bounds(1, 0.0, 2.0)
    text = lp.to_mps()
    assert text.startswith('NAME          small')
    assert ' L  c1' in text
    assert ['UP', 'BND', 'y', '2.0'] in [line.split() for line in text.splitlines()]
    assert text.rstrip().endswith('ENDATA')
