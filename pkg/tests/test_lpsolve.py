import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdrelay.lpsolve import LinearProgram, lp_to_text, solve, solve_dense


def test_single_bound():
    lp = LinearProgram(num_vars=1, objective={0: 1.0})
    lp.add({0: 1.0}, "<=", 1.0)
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(1.0, abs=1e-12)


def test_two_var_vertex():
    lp = LinearProgram(num_vars=2, objective={0: 1.0, 1: 1.0})
    lp.add({0: 1.0, 1: 1.0}, "<=", 1.0)
    lp.add({0: 1.0}, "<=", 0.3)
    sol = solve(lp)
    assert sol.objective == pytest.approx(1.0, abs=1e-12)
    assert sol.x[0] == pytest.approx(0.3, abs=1e-12)
    assert sol.x[1] == pytest.approx(0.7, abs=1e-12)


def test_unbounded():
    lp = LinearProgram(num_vars=1, objective={0: 1.0})
    sol = solve(lp)
    assert sol.status == "unbounded"


def test_infeasible():
    lp = LinearProgram(num_vars=1, objective={0: 1.0})
    lp.add({0: 1.0}, "==", -2.0)  # x >= 0 cannot reach -2
    sol = solve(lp)
    assert sol.status == "infeasible"


def test_equalities_and_upper_bounds():
    lp = LinearProgram(num_vars=3, objective={2: 1.0})
    lp.add({0: 1.0, 1: 1.0}, "==", 1.0)
    lp.add({1: -1.0, 2: 1.0}, "<=", 0.0)
    lp.upper_bounds[1] = 0.6
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(0.6, abs=1e-9)
    assert sol.max_violation <= 1e-9


def test_degenerate_zero_rhs():
    # Flows capped by a scaled share; heavy degeneracy at zero.
    lp = LinearProgram(num_vars=3, objective={0: 1.0})
    lp.add({0: 1.0, 1: -1.0}, "<=", 0.0)
    lp.add({0: 1.0, 2: -1.0}, "<=", 0.0)
    lp.add({1: 1.0, 2: 1.0}, "<=", 1.0)
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(0.5, abs=1e-9)


def test_objective_scaling_property():
    lp1 = LinearProgram(num_vars=2, objective={0: 1.0, 1: 2.0})
    lp1.add({0: 1.0, 1: 1.0}, "<=", 2.0)
    lp2 = LinearProgram(num_vars=2, objective={0: 3.0, 1: 6.0})
    lp2.add({0: 1.0, 1: 1.0}, "<=", 2.0)
    s1, s2 = solve(lp1), solve(lp2)
    assert s2.objective == pytest.approx(3.0 * s1.objective, rel=1e-12)
    assert np.allclose(s1.x, s2.x)


def test_weak_duality_spot_check():
    # max x+y st x+2y <= 4, 3x+y <= 6: dual-feasible (y1, y2) bounds the optimum.
    lp = LinearProgram(num_vars=2, objective={0: 1.0, 1: 1.0})
    lp.add({0: 1.0, 1: 2.0}, "<=", 4.0)
    lp.add({0: 3.0, 1: 1.0}, "<=", 6.0)
    sol = solve(lp)
    for duals in [(0.45, 0.2), (0.5, 0.5), (1.0, 0.0)]:
        y1, y2 = duals
        if y1 + 3 * y2 >= 1 and 2 * y1 + y2 >= 1:
            assert sol.objective <= 4 * y1 + 6 * y2 + 1e-9


def test_determinism_bitwise():
    lp = LinearProgram(num_vars=4, objective={0: 1.0, 1: 0.5, 2: 0.25, 3: 2.0})
    rng = np.random.default_rng(5)
    A = rng.uniform(0, 1, size=(6, 4))
    for r in range(6):
        lp.add({j: A[r, j] for j in range(4)}, "<=", 1.0)
    first = solve(lp)
    for _ in range(3):
        again = solve(lp)
        assert again.objective == first.objective
        assert (again.x == first.x).all()


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=25, deadline=None)
def test_matches_scipy_on_random_problems(seed):
    from scipy.optimize import linprog

    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(2, 6)), int(rng.integers(2, 8))
    c = rng.uniform(-1, 1, n)
    A = rng.uniform(-0.5, 1, (m, n))
    b = rng.uniform(0.2, 2.0, m)
    lp = LinearProgram(num_vars=n, objective={j: c[j] for j in range(n)})
    for r in range(m):
        lp.add({j: A[r, j] for j in range(n)}, "<=", float(b[r]))
    mine = solve(lp)
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * n, method="highs")
    if ref.status == 3:
        assert mine.status == "unbounded"
    else:
        assert ref.status == 0 and mine.status == "optimal"
        assert mine.objective == pytest.approx(-ref.fun, abs=1e-7)
        assert mine.max_violation <= 1e-8


def test_solve_dense_direct():
    c = np.array([1.0, 0.0])
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    b = np.array([1.0, 0.0])
    sol = solve_dense(c, A, np.array([False, True]), b)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(0.5, abs=1e-12)


def test_size_guard():
    lp = LinearProgram(num_vars=300, objective={0: 1.0})
    for r in range(200):
        lp.add({j: 1.0 for j in range(300)}, "<=", 1.0)
    with pytest.raises(ValueError, match="too large"):
        solve(lp)


def test_text_dump():
    lp = LinearProgram(num_vars=2, objective={0: 1.0}, names=["rate", "share"])
    lp.add({0: 1.0, 1: -2.0}, "<=", 0.0)
    text = lp_to_text(lp)
    assert "maximize" in text and "rate" in text and "-2 share" in text
