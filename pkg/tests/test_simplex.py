from itertools import combinations

import numpy as np
import pytest

from alphasched.simplex import LinearProgram, LpError, lp_to_text, solve_lp


def test_min_x_geq_one():
    lp = LinearProgram(1, objective=np.array([1.0]))
    lp.add_row([0], [1.0], ">=", 1.0)
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.x[0] == pytest.approx(1.0)
    assert res.objective == pytest.approx(1.0)
    assert res.duals[0] == pytest.approx(1.0)


def test_two_variable_lp():
    lp = LinearProgram(2, objective=np.array([1.0, 1.0]))
    lp.add_row([0, 1], [1.0, 1.0], ">=", 2.0)
    lp.add_row([0], [1.0], "<=", 0.5)
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(2.0)


def test_infeasible():
    lp = LinearProgram(1, objective=np.array([1.0]))
    lp.add_row([0], [1.0], "<=", -1.0)
    assert solve_lp(lp).status == "infeasible"


def test_unbounded():
    lp = LinearProgram(2, objective=np.array([-1.0, 0.0]))
    lp.add_row([1], [1.0], "<=", 5.0)
    assert solve_lp(lp).status == "unbounded"


def test_equality_row_and_duality():
    lp = LinearProgram(2, objective=np.array([2.0, 3.0]))
    lp.add_row([0, 1], [1.0, 1.0], "==", 4.0)
    lp.add_row([0], [1.0], "<=", 3.0)
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(2 * 3 + 3 * 1)
    # strong duality on the original data
    dual_obj = res.duals[0] * 4.0 + res.duals[1] * 3.0
    assert dual_obj == pytest.approx(res.objective, abs=1e-6)


def test_dimension_errors():
    lp = LinearProgram(2)
    with pytest.raises(LpError):
        lp.add_row([0, 5], [1.0, 1.0], "<=", 1.0)
    with pytest.raises(LpError):
        lp.add_row([0], [1.0], "<>", 1.0)
    with pytest.raises(LpError):
        lp.set_objective([1.0])


def test_variable_bounds():
    lp = LinearProgram(1, objective=np.array([1.0]), lower=np.array([2.0]))
    res = solve_lp(lp)
    assert res.status == "optimal" and res.x[0] == pytest.approx(2.0)
    lp = LinearProgram(1, objective=np.array([-1.0]), upper=np.array([7.0]))
    res = solve_lp(lp)
    assert res.objective == pytest.approx(-7.0)


def test_lp_text_dump_mentions_rows():
    lp = LinearProgram(2, objective=np.array([1.0, -2.0]))
    lp.add_row([0, 1], [1.0, 3.0], "<=", 4.0)
    text = lp_to_text(lp)
    assert "Minimize" in text and "c0:" in text and "3 x1" in text


def _vertex_oracle(c, rows):
    """Exact optimum of min c.x over {A x <= b, x >= 0} by enumerating basic
    points: every vertex makes n constraints tight."""
    n = len(c)
    A = np.array([r[0] for r in rows])
    b = np.array([r[1] for r in rows])
    stacked = np.vstack([A, -np.eye(n)])
    rhs = np.concatenate([b, np.zeros(n)])
    best = None
    for combo in combinations(range(stacked.shape[0]), n):
        M = stacked[list(combo)]
        try:
            x = np.linalg.solve(M, rhs[list(combo)])
        except np.linalg.LinAlgError:
            continue
        if (A @ x <= b + 1e-8).all() and (x >= -1e-8).all():
            val = float(c @ x)
            if best is None or val < best:
                best = val
    return best


def test_random_lps_match_vertex_enumeration():
    rng = np.random.default_rng(2024)
    solved = 0
    infeasible = 0
    for _ in range(100):
        n = int(rng.integers(2, 6))
        k = int(rng.integers(1, 6))
        c = rng.uniform(-2, 3, size=n)
        rows = []
        for _ in range(k):
            a = rng.uniform(-2, 2, size=n)
            rows.append((a, float(rng.uniform(-1, 4))))
        box = float(rng.uniform(2, 8))
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            rows.append((e, box))  # keeps the polytope bounded

        lp = LinearProgram(n, objective=c)
        for a, rhs in rows:
            lp.add_row(np.arange(n), a, "<=", rhs)
        res = solve_lp(lp)
        expected = _vertex_oracle(c, rows)
        if expected is None:
            assert res.status == "infeasible"
            infeasible += 1
        else:
            assert res.status == "optimal"
            assert res.objective == pytest.approx(expected, abs=1e-6)
            solved += 1
    assert solved >= 50  # the generator must actually exercise the solver


def test_complementary_slackness_and_feasibility():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(2, 6))
        k = int(rng.integers(1, 5))
        lp = LinearProgram(n, objective=rng.uniform(0.1, 3, size=n))
        rows = []
        for _ in range(k):
            a = rng.uniform(0, 2, size=n)
            rhs = float(rng.uniform(0.5, 4))
            sense = rng.choice([">=", "<="])
            lp.add_row(np.arange(n), a, sense, rhs)
            rows.append((a, sense, rhs))
        res = solve_lp(lp)
        if res.status != "optimal":
            continue
        scale = 1.0 + abs(res.objective)
        for (a, sense, rhs), y in zip(rows, res.duals):
            slack = rhs - float(a @ res.x)
            if sense == "<=":
                assert slack >= -1e-7
                assert y <= 1e-7
            else:
                assert slack <= 1e-7
                assert y >= -1e-7
            assert abs(slack * y) <= 1e-6 * scale
