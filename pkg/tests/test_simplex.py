import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from bikmeans.simplex import InfeasibleError, UnboundedError, simplex


def test_small_max_problem():
    # max x + y st x + 2y <= 4, 3x + y <= 6  ->  x=1.6, y=1.2
    r = simplex([-1.0, -1.0], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert r.value == pytest.approx(-2.8)
    assert r.x == pytest.approx([1.6, 1.2])


def test_equality_constraints():
    r = simplex([1.0, 2.0, 0.0], A_eq=[[1, 1, 1]], b_eq=[3], A_ub=[[0, 0, 1]], b_ub=[1])
    # x3 is capped at 1, the rest goes to the cheaper x1
    assert r.value == pytest.approx(2.0)
    assert r.x == pytest.approx([2.0, 0.0, 1.0])


def test_infeasible():
    with pytest.raises(InfeasibleError):
        simplex([1.0], A_eq=[[1.0]], b_eq=[2.0], A_ub=[[1.0]], b_ub=[1.0])


def test_unbounded():
    with pytest.raises(UnboundedError):
        simplex([-1.0, 0.0], A_ub=[[-1.0, 1.0]], b_ub=[1.0])


def test_degenerate_cycling_example():
    # Beale's example cycles under naive Dantzig pricing
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    r = simplex(c, A_ub=A, b_ub=[0, 0, 1])
    assert r.value == pytest.approx(-0.05)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 6), st.integers(1, 4))
def test_matches_highs(seed, nv, m):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=nv)
    A_ub = rng.uniform(0.1, 2.0, size=(m, nv))
    b_ub = rng.uniform(1.0, 5.0, size=m)
    A_eq = np.ones((1, nv))
    b_eq = np.array([1.0])
    ref = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, method="highs")
    if ref.status != 0:
        with pytest.raises((InfeasibleError, UnboundedError)):
            simplex(c, A_eq, b_eq, A_ub, b_ub)
        return
    r = simplex(c, A_eq, b_eq, A_ub, b_ub)
    assert r.value == pytest.approx(ref.fun, abs=1e-7)
    assert np.all(A_ub @ r.x <= b_ub + 1e-8)
    assert np.all(r.x >= -1e-12)
