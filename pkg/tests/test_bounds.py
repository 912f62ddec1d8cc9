import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bikmeans.bounds import (DomainError, _tail_over_gamma, alpha_envelope, alpha_local,
                             alpha_lp_closed, alpha_lp_tight, alpha_pipage, bounds_table,
                             lp_tight_objective)

# frozen from a 30-digit mpmath evaluation (grid 1e-4 then 2001-point zoom)
TIGHT = {1.3: 7.81554655733, 1.5: 4.79679820246, 2.0: 2.5843606573, 3.0: 1.50296895701}
CLOSED = {1.3: 8.10469420456, 1.5: 5.0535312427, 2.0: 2.69169104046, 3.0: 1.51446637313}


@pytest.mark.parametrize("beta", sorted(TIGHT))
def test_tight_values(beta):
    assert alpha_lp_tight(beta).value == pytest.approx(TIGHT[beta], abs=1e-9)


@pytest.mark.parametrize("beta", sorted(CLOSED))
def test_closed_values(beta):
    assert alpha_lp_closed(beta) == pytest.approx(CLOSED[beta], rel=1e-10)


def test_closed_at_two():
    assert alpha_lp_closed(2.0) == pytest.approx(1 + math.exp(-2) * 12.5)


def test_closed_large_beta():
    b = 20.0
    assert alpha_lp_closed(b) == pytest.approx(1 + math.exp(-b) * (6 * b / 19 + 19 ** 2 / 20), abs=1e-6)


def test_closed_near_one_blows_up():
    assert alpha_lp_closed(1 + 1e-9) > 1e8


def test_closed_as_printed_differs():
    assert alpha_lp_closed(2.0, as_printed=True) == pytest.approx(1 + math.exp(-2) * (-12 + 0.5))


def test_domain_errors():
    for f in (alpha_lp_closed, lambda b: alpha_lp_tight(b), alpha_pipage):
        with pytest.raises(DomainError):
            f(1.0)
    with pytest.raises(DomainError):
        alpha_local(2.0, 1, eps_term=1.0)
    with pytest.raises(DomainError):
        alpha_local(2.0, 0)


def test_local_values():
    assert alpha_local(2.0, 1) == 9.0
    assert alpha_local(2.0, 10**6) == pytest.approx(4.0, abs=1e-5)
    assert alpha_local(2.0, math.inf) == 4.0
    assert alpha_local(1.0001, 10**6) <= 9 + 1e-2
    assert alpha_local(2.0, 1, eps_term=0.5) == 18.0


def test_pipage():
    assert alpha_pipage(2.0) == pytest.approx(2.90112341413, rel=1e-10)
    b = 1.1
    assert b * (math.exp(-1) + 8 * math.exp(-b)) / (b - 1) > 1 + 8 * math.exp(-b)
    assert alpha_pipage(200.0) == pytest.approx(1.0, abs=1e-2)


def test_gamma_limit():
    assert abs(_tail_over_gamma(1e-8)) < 1e-7
    assert _tail_over_gamma(0.0) == 0.0
    # series and direct forms agree at the switch point
    g = 1e-4
    assert _tail_over_gamma(g * 1.0001) == pytest.approx(g / 2, rel=1e-3)


def test_objective_against_grid():
    # independent dense evaluation of the same expression
    b = 2.0
    gs = np.linspace(0, 1, 100_001)[1:]
    r = b / (b - 1)
    vals = ((1 - np.exp(-b)) + 3 * np.exp(-(b - gs)) * (1 - gs) * (r + np.maximum(r, 2 * b / (b - gs)))
            + b * np.exp(-b) * (1 - np.exp(gs) * (1 - gs)) / gs)
    t = alpha_lp_tight(b)
    assert t.value >= vals.max() - 1e-12
    assert t.value == pytest.approx(vals.max(), abs=1e-8)
    assert lp_tight_objective(b, t.argmax_gamma) == t.value


def test_monotone_and_below_closed():
    betas = np.arange(1.05, 6.0001, 0.05)
    vals = [alpha_lp_tight(float(b)).value for b in betas]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(v <= alpha_lp_closed(float(b)) + 1e-12 for v, b in zip(vals, betas))


@settings(max_examples=40, deadline=None)
@given(st.floats(1.01, 10.0))
def test_argmax_in_unit_interval(beta):
    t = alpha_lp_tight(beta, step=1e-3)
    assert 0.0 <= t.argmax_gamma <= 1.0
    assert t.value >= lp_tight_objective(beta, 0.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.01, 10.0), st.integers(1, 50))
def test_local_decreasing_in_p(beta, p):
    assert alpha_local(beta, p + 1) <= alpha_local(beta, p)
    assert alpha_local(beta, p) > (1 + 2 / beta) ** 2


def test_envelope_meets_headline_claims():
    for b, cap in [(1.3, 6.45), (1.5, 4.8), (2.0, 2.59), (3.0, 1.4)]:
        assert alpha_envelope(b)[0] < cap
    assert alpha_envelope(1.3)[1] == "local-search"
    assert alpha_envelope(3.0)[1] == "pipage"


def test_table_rows():
    rows = bounds_table(1.5, 2.0, 0.25)
    assert [r["beta"] for r in rows] == [1.5, 1.75, 2.0]
    assert {"alpha_local_p1", "alpha_local_p3", "alpha_pipage", "alpha_best"} <= set(rows[0])
