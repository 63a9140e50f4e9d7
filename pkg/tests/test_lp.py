from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from acqnc.lp import LPInstance, solve_lp


def test_trivial_bound():
    lp = LPInstance(1, [1])
    lp.add([1], "<=", 3)
    r = solve_lp(lp)
    assert r.status == "optimal" and r.value == 3 and r.x == (3,)


def test_infeasible_and_unbounded():
    lp = LPInstance(1, [1])
    lp.add([1], "<=", 0)
    lp.add([1], ">=", 1)
    assert solve_lp(lp).status == "infeasible"
    lp = LPInstance(2, [1, 1])
    lp.add([1, -1], "<=", 1)
    assert solve_lp(lp).status == "unbounded"


def test_free_variables_and_minimize():
    lp = LPInstance(2, [1, 1], maximize=False, free=frozenset({0}))
    lp.add([1, 0], ">=", Fraction(-5, 2))
    lp.add([1, 1], ">=", -1)
    r = solve_lp(lp)
    assert r.value == -1 and lp.is_feasible_point(r.x)


def random_lp(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(2, 6)), int(rng.integers(2, 7))
    A = rng.integers(-4, 6, size=(m, n))
    b = rng.integers(0, 10, size=m)  # x = 0 is feasible for the <= rows
    c = rng.integers(-3, 6, size=n)
    rels = [("<=", ">=", "=")[int(rng.integers(3))] if i else "<=" for i in range(m)]
    # keep feasibility: equality and >= rows are tightened around a known point
    x0 = rng.integers(0, 3, size=n)
    rhs = [int(b[i]) if rels[i] == "<=" and A[i] @ x0 <= b[i] else int(A[i] @ x0) for i in range(m)]
    cap = int(rng.integers(5, 20))
    return A, rhs, rels, c, cap


@given(st.integers(0, 10**6))
def test_against_double_precision_reference(seed):
    A, rhs, rels, c, cap = random_lp(seed)
    n = A.shape[1]
    lp = LPInstance(n, list(c))
    for row, rel, b in zip(A, rels, rhs):
        lp.add(list(row), rel, b)
    lp.add([1] * n, "<=", cap)  # bounded
    r = solve_lp(lp)
    A_ub = [list(row) if rel == "<=" else [-v for v in row] for row, rel in zip(A, rels) if rel != "="]
    b_ub = [b if rel == "<=" else -b for rel, b in zip(rels, rhs) if rel != "="]
    A_ub.append([1] * n)
    b_ub.append(cap)
    A_eq = [list(row) for row, rel in zip(A, rels) if rel == "="] or None
    b_eq = [b for rel, b in zip(rels, rhs) if rel == "="] or None
    ref = linprog(-c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, method="highs")
    if ref.status == 2:
        assert r.status == "infeasible"
        return
    assert r.status == "optimal"
    assert abs(float(r.value) + ref.fun) <= 1e-6
    assert lp.is_feasible_point(r.x)
    assert sum(Fraction(v) * c_ for v, c_ in zip(r.x, c)) == r.value
    # strong duality with the returned multipliers
    rows = [con.rhs for con in lp.constraints]
    assert sum(y * b for y, b in zip(r.duals, rows)) == r.value


def test_guard():
    from acqnc import config
    lp = LPInstance(300, [1] * 300)
    for _ in range(200):
        lp.add([1] * 300, "<=", 1)
    with pytest.raises(config.GuardError, match="lp_nonzeros"):
        solve_lp(lp)
