from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bincover.core import Instance
from bincover.lp import (EQ, GE, LE, LpError, LpProblem, build_lp1,
                         certificate_violations, dual_objective, lp_solve)


def test_empty_problem():
    sol = lp_solve(LpProblem([]))
    assert sol.objective == 0 and sol.values == ()


def test_zero_objective_with_rows():
    p = LpProblem([0, 0])
    p.add_row({0: 1, 1: 1}, LE, 3)
    assert lp_solve(p).objective == 0


def test_textbook_maximum():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
    p = LpProblem([3, 5])
    p.add_row({0: 1}, LE, 4)
    p.add_row({1: 2}, LE, 12)
    p.add_row({0: 3, 1: 2}, LE, 18)
    sol = lp_solve(p)
    assert sol.objective == 36 and sol.values == (2, 6)
    assert dual_objective(p, sol) == 36
    assert sol.row_duals == (0, F(3, 2), 1)


def test_equality_and_ge_rows_need_phase_one():
    # max x + 2y, x + y = 2, x >= 1/2 as a row
    p = LpProblem([1, 2])
    p.add_row({0: 1, 1: 1}, EQ, 2)
    p.add_row({0: 1}, GE, F(1, 2))
    sol = lp_solve(p)
    assert sol.values == (F(1, 2), F(3, 2)) and sol.objective == F(7, 2)
    assert certificate_violations(p, sol) == []


def test_bounds_are_respected():
    p = LpProblem([1, -1], lower=[F(1), F(2)], upper=[F(5, 2), None])
    sol = lp_solve(p)
    assert sol.values == (F(5, 2), 2) and sol.objective == F(1, 2)


def test_negative_rhs_rows():
    # max -x, -x <= -3  ->  x = 3
    p = LpProblem([-1])
    p.add_row({0: -1}, LE, -3)
    assert lp_solve(p).values == (3,)


def test_redundant_equalities():
    p = LpProblem([1, 1])
    p.add_row({0: 1, 1: 1}, EQ, 1)
    p.add_row({0: 2, 1: 2}, EQ, 2)
    assert lp_solve(p).objective == 1


def test_infeasible_and_unbounded_are_reported():
    p = LpProblem([1])
    p.add_row({0: 1}, LE, 1)
    p.add_row({0: 1}, GE, 2)
    with pytest.raises(LpError):
        lp_solve(p)
    with pytest.raises(LpError):
        lp_solve(LpProblem([1]))


def test_degenerate_problem_terminates():
    # a classic cycling example under the largest-coefficient rule
    p = LpProblem([F(3, 4), -150, F(1, 50), -6])
    p.add_row({0: F(1, 4), 1: -60, 2: -F(1, 25), 3: 9}, LE, 0)
    p.add_row({0: F(1, 2), 1: -90, 2: -F(1, 50), 3: 3}, LE, 0)
    p.add_row({2: 1}, LE, 1)
    sol = lp_solve(p)
    assert sol.objective == F(1, 20)


def test_lp1_two_bin_example():
    inst = Instance.generalized([(10, 5), (4, 4)], [3, 3])
    lp = build_lp1(inst)
    assert len(lp.y) == 2 and len(lp.x) == 4
    sol = lp_solve(lp.problem)
    assert sol.objective == 11


def test_lp1_one_bin_one_item():
    lp = build_lp1(Instance.generalized([(1, 1)], [1]))
    assert lp.problem.num_vars == 2
    assert len(lp.problem.rows) == 2
    assert lp.problem.upper[lp.y[0]] == 1


def test_lp1_without_admissible_pairs():
    lp = build_lp1(Instance.generalized([(1, 1), (2, 1)], [2, 3]))
    assert lp.x == {} and lp.problem.num_vars == 2
    assert lp_solve(lp.problem).objective == 0


small = st.integers(-4, 4).map(F)


@given(st.integers(1, 4), st.integers(1, 4), st.data())
@settings(max_examples=200, deadline=None)
def test_random_packing_lps_are_certified(nvar, nrow, data):
    c = [data.draw(small) for _ in range(nvar)]
    p = LpProblem(c, upper=[F(data.draw(st.integers(0, 5))) for _ in range(nvar)])
    for _ in range(nrow):
        coeffs = {k: data.draw(small) for k in range(nvar)}
        sense = data.draw(st.sampled_from([LE, GE, EQ]))
        p.add_row(coeffs, sense, data.draw(small))
    try:
        sol = lp_solve(p)
    except LpError as exc:
        assert "infeasible" in str(exc)
        return
    assert certificate_violations(p, sol) == []
    assert dual_objective(p, sol) == sol.objective
    # basic solution: non-basic structurals sit at a bound
    for j, v in enumerate(sol.values):
        if j not in sol.basis:
            assert v == p.lower[j] or v == p.upper[j]
