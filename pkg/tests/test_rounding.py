from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bikmeans.core import ConfigError, InvariantError
from bikmeans.lp import FractionalSolution, lp_radii, solve_normalized
from bikmeans.rounding import (build_balls_and_witnesses, build_partition, draw_copies,
                               markov_radius_check, prepare, resolve_m, round_many,
                               round_once, sample_solution)

from conftest import line_instance, random_instance


def frac(k, centers, weights, served, dist):
    return FractionalSolution(k=k, copy_center=np.array(centers), weight=np.array(weights, float),
                              served=np.array(served, bool), dist=np.array(dist, float))


@pytest.fixture
def two_copy():
    # one demand, copies A (0.6 at distance 1) and B (0.4 at distance 2)
    return frac(1, [0, 1], [0.6, 0.4], [[True, True]], [[1.0, 2.0]])


def test_ball_takes_nearest_half(two_copy):
    balls, wm = build_balls_and_witnesses(two_copy, 2)
    assert balls[0].pieces == ((0, 0.5),)
    assert balls[0].radius == 1.0
    assert wm.selected == (0,)


def test_markov_example(two_copy):
    balls, _ = build_balls_and_witnesses(two_copy, 2)
    assert lp_radii(two_copy)[0][0] == pytest.approx(1.4)
    rep = markov_radius_check(two_copy, balls, 2)
    assert rep.min_slack == pytest.approx(2.8 - 1.0)


def test_markov_violation_is_reported():
    # hand-made "ball" farther than the Markov radius
    sol = frac(1, [0, 1], [0.6, 0.4], [[True, True]], [[1.0, 2.0]])
    balls, _ = build_balls_and_witnesses(sol, 2)
    from bikmeans.rounding import Ball
    bad = [Ball(0, balls[0].pieces, 10.0)]
    with pytest.raises(InvariantError, match="demand 0"):
        markov_radius_check(sol, bad, 2)


def test_residual_group(two_copy):
    _, _, part = prepare(two_copy, 2)
    assert part.m == 2
    assert part.kinds == ("ball", "residual")
    assert part.masses() == pytest.approx([0.5, 0.5])


def test_colocated_demands_share_witness():
    inst = line_instance([[0.0], [0.0]], [[1.0], [-1.0]])
    sol = solve_normalized(inst, 1)
    balls, wm = build_balls_and_witnesses(sol, 2)
    assert wm.witness == (0, 0)
    assert wm.selected == (0,)


def test_non_integral_m_rejected(two_copy):
    with pytest.raises(ConfigError):
        build_balls_and_witnesses(two_copy, 1.5)
    with pytest.raises(ConfigError):
        resolve_m(2, beta=1.7)


def test_resolve_m():
    assert resolve_m(2, beta=2) == (4, Fraction(2))
    assert resolve_m(3, m=4) == (4, Fraction(4, 3))
    with pytest.raises(ConfigError):
        resolve_m(3, m=3)


def test_group_count_bounds_opened():
    inst = line_instance([[0.0], [5.0], [10.0], [20.0]], [[0.0], [5.0], [10.0], [20.0]])
    sol = solve_normalized(inst, 2)
    stats = round_many(sol, inst, 2, 20, seed=3)
    assert stats.m == 4
    assert np.all((stats.n_opened >= 1) & (stats.n_opened <= 4))


def test_full_weight_copies_open_everything():
    inst = line_instance([[0.0], [3.0], [7.0]], [[0.0], [3.0], [7.0]])
    sol = frac(3, [0, 1, 2], [1, 1, 1], np.eye(3), inst.dist.T)
    _, _, part = prepare(sol, Fraction(4, 3))
    s = sample_solution(part, inst, 0)
    assert set(s.opened) == {0, 1, 2}
    assert s.total_cost == 0.0
    assert round_many(sol, inst, Fraction(4, 3), 10).std == 0.0


def test_zero_lp_value_ratio_is_zero():
    inst = line_instance([[0.0], [3.0]], [[0.0], [3.0]])
    sol = solve_normalized(inst, 2)
    stats = round_many(sol, inst, 2, 5)
    assert np.all(stats.costs == 0) and np.all(stats.ratios == 0)


def test_sampling_frequencies():
    # group {A: 0.3, B: 0.2} with beta = 2 -> P(A) = 0.6
    sol = frac(1, [0, 1, 2], [0.3, 0.2, 0.5], [[True, True, True]], [[0.0, 1.0, 2.0]])
    _, _, part = prepare(sol, 2)
    g = [i for i, grp in enumerate(part.groups) if {j for j, _ in grp} == {0, 1}]
    assert g, part.groups
    rng = np.random.Generator(np.random.Philox(7))
    hits = sum(draw_copies(part, rng)[g[0]] == 0 for _ in range(100_000))
    assert abs(hits / 100_000 - 0.6) < 0.01


def test_round_once_report(rng):
    inst = random_instance(rng, 6, 5)
    sol = solve_normalized(inst, 2)
    rep = round_once(sol, inst, 2, seed=1)
    assert len(rep.solution.opened) <= 4
    assert rep.ratio >= 0
    assert len(rep.witness) == 6


def test_trials_reproducible(rng):
    inst = random_instance(rng, 8, 8)
    sol = solve_normalized(inst, 2)
    a = round_many(sol, inst, 2, 30, seed=11)
    b = round_many(sol, inst, 2, 30, seed=11)
    assert np.array_equal(a.costs, b.costs)


def _fractional_instance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    inst = random_instance(rng, n, int(rng.integers(3, 9)), share=min(2, n))
    return inst, solve_normalized(inst, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3)]))
def test_structural_invariants(seed, beta):
    inst, sol = _fractional_instance(seed)
    balls, wm = build_balls_and_witnesses(sol, beta)
    R, _ = lp_radii(sol)
    for b in balls:
        assert b.mass == pytest.approx(float(1 / beta), abs=1e-9)
        d = [sol.dist[b.owner, j] for j, _ in b.pieces]
        assert d == sorted(d)
        assert all(w <= sol.weight[j] + 1e-15 for j, w in b.pieces)
    for x, w in enumerate(wm.witness):
        assert R[w] <= R[x] + 1e-12
        if w != x:
            assert {j for j, _ in balls[x].pieces} & {j for j, _ in balls[w].pieces}
    claimed = {}
    for x in wm.selected:
        assert wm.witness[x] == x
        for j, w in balls[x].pieces:
            claimed[j] = claimed.get(j, 0.0) + w
    assert all(v <= sol.weight[j] + 1e-12 for j, v in claimed.items())
    markov_radius_check(sol, balls, beta)
    part = build_partition(sol, balls, wm, beta)
    assert part.m == int(beta * 2)
    assert np.abs(part.masses() - float(1 / beta)).max() <= 1e-9
    tot = np.zeros(sol.n_copies)
    for g in part.groups:
        for j, w in g:
            tot[j] += w
    assert np.allclose(tot, sol.weight, atol=1e-9)
    picks = draw_copies(part, seed)
    assert len(picks) == part.m
    # per-group selection probabilities sum to one
    for g in part.groups:
        assert float(beta) * sum(w for _, w in g) == pytest.approx(1.0, abs=1e-9)
