from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kbmf.formulations import build_pricing_ip
from kbmf.lp import solve_lp
from kbmf.oracle import brute_force_bbqp
from kbmf.pricing import (ORDERINGS, PricingOutcome, _ordering_keys, alternate, bbqp_value, distinct_best,
                          exact_bbqp, greedy_bbqp, portfolio, portfolio_members)


def random_h(seed, n=6, m=6):
    return np.random.default_rng(seed).uniform(-1, 1, (n, m))


def is_fixed_point(H, a, b):
    return np.array_equal(a, H @ b.astype(float) > 0) and np.array_equal(b, a.astype(float) @ H > 0)


@given(st.integers(0, 2 ** 31 - 1), st.sampled_from(ORDERINGS), st.sampled_from([None, False, True]))
def test_greedy_phase_two_is_a_best_response(seed, ordering, transpose):
    H = random_h(seed, 5, 7)
    out = greedy_bbqp(H, ordering, transpose=transpose, seed=seed)
    assert out.value == pytest.approx(out.a.astype(float) @ H @ out.b.astype(float))
    if out.member.endswith("-T"):
        assert np.array_equal(out.a, H @ out.b.astype(float) > 0)
    else:
        assert np.array_equal(out.b, out.a.astype(float) @ H > 0)


def test_greedy_single_positive_entry():
    H = -np.ones((4, 5))
    H[2, 3] = 0.7
    for ordering in ORDERINGS:
        out = greedy_bbqp(H, ordering, seed=1)
        assert out.pattern.a.tolist() == [False, False, True, False]
        assert out.pattern.b.tolist() == [False, False, False, True, False]
        assert out.value == pytest.approx(0.7)


def test_greedy_all_negative():
    for ordering in ORDERINGS:
        out = greedy_bbqp(-np.ones((3, 3)), ordering, seed=0)
        assert out.pattern is None and out.value == 0


def test_greedy_never_beats_enumeration():
    hits = 0
    for seed in range(40):
        H = random_h(seed)
        best, _, _ = brute_force_bbqp(H)
        values = [greedy_bbqp(H, o, seed=seed).value for o in ORDERINGS]
        assert max(values) <= best + 1e-12
        hits += max(values) >= best - 1e-12
    print(f"some greedy ordering optimal on {hits}/40 instances")


def test_revised_ordering_tie_break():
    # rows 0 and 1 tie on positive mass; row 1 has less negative mass so goes first
    G = np.array([[1.0, -2.0], [1.0, -1.0], [3.0, 0.0]])
    assert _ordering_keys(G, "revised", None).tolist() == [2, 1, 0]
    assert _ordering_keys(G, "original", None).tolist() == [2, 0, 1]


def test_perturbation_only_reorders():
    H = random_h(3)
    for ordering in ("original-perturbed", "revised-perturbed"):
        for seed in range(5):
            out = greedy_bbqp(H, ordering, seed=seed)
            assert out.value == pytest.approx(bbqp_value(H, out.a, out.b))


@given(st.integers(0, 2 ** 31 - 1))
def test_alternate_ends_at_a_fixed_point(seed):
    H = random_h(seed)
    rng = np.random.default_rng(seed)
    a0 = rng.random(6) < 0.5
    b0 = a0.astype(float) @ H > 0
    out = alternate(H, a0, b0)
    assert is_fixed_point(H, out.a, out.b)
    assert out.value >= bbqp_value(H, a0, b0) - 1e-12


def test_alternate_keeps_fixed_points():
    for seed in range(20):
        H = random_h(seed)
        first = alternate(H, np.ones(6, bool), np.ones(6, bool))
        again = alternate(H, first.a, first.b)
        assert np.array_equal(first.a, again.a) and np.array_equal(first.b, again.b)


def test_alternate_improves_greedy():
    for seed in range(30):
        H = random_h(seed)
        g = greedy_bbqp(H, "original")
        assert alternate(H, g.a, g.b).value >= g.value - 1e-12


def test_alternate_on_small_example(three_by_three):
    H = 2.0 * three_by_three.ones - 1
    a = np.ones(3, bool)
    out = alternate(H, a, a.astype(float) @ H > 0)
    assert out.value == 5
    assert out.a.all() and out.b.all()


def test_portfolio_is_best_member():
    for seed in range(20):
        H = random_h(seed, 5, 8)
        seeds = list(range(seed, seed + 22))
        members = portfolio_members(H, seeds)
        assert len(members) == 30
        best = portfolio(H, seeds)
        assert best.value == max(m.value for m in members)
        first = next(m for m in members if m.value == best.value)
        assert best.member == first.member and np.array_equal(best.a, first.a)
        again = portfolio(H, seeds)
        assert np.array_equal(again.a, best.a) and np.array_equal(again.b, best.b)


def test_portfolio_all_negative():
    out = portfolio(-np.ones((4, 4)), mu_star=0.5)
    assert out.pattern is None and out.reduced_cost == pytest.approx(0.5)


def test_portfolio_on_uniform_duals(j4_minus_i4):
    H = np.where(j4_minus_i4.ones, 0.5, -1.0)
    out = portfolio(H, mu_star=0)
    # a 2x2 block avoiding the diagonal is worth 4 * 1/2
    assert out.value >= 1.0
    assert out.value == brute_force_bbqp(H)[0] == 2.0
    assert out.reduced_cost == -2.0


def test_distinct_best_skips_duplicates_and_empty():
    a = np.array([True, False])
    b = np.array([True, True])
    outs = [PricingOutcome(a, b, 2.0), PricingOutcome(a, b, 2.0), PricingOutcome(np.zeros(2, bool), b, 3.0),
            PricingOutcome(~a, b, 1.0)]
    picked = distinct_best(outs, 5)
    assert [p.value for p in picked] == [2.0, 1.0]
    assert len(distinct_best(outs, 1)) == 1


def test_exact_matches_brute_force():
    for seed in range(50):
        H = random_h(seed)
        warm = portfolio(H)
        out = exact_bbqp(H, warm)
        best, _, _ = brute_force_bbqp(H)
        assert out.value == pytest.approx(best, abs=1e-9)
        assert out.exact_bound == pytest.approx(best, abs=1e-9)
        assert out.value >= warm.value - 1e-12


@pytest.mark.parametrize("engine", ["bnb", "highs"])
def test_exact_on_small_matrices(engine):
    for seed in range(15):
        H = random_h(seed, 4, 4)
        out = exact_bbqp(H, engine=engine)
        best, _, _ = brute_force_bbqp(H)
        assert out.value == pytest.approx(best) and out.exact_bound == pytest.approx(best)


def test_exact_nonpositive_matrix():
    H = -np.abs(random_h(1))
    H[0, 0] = 0
    out = exact_bbqp(H, mu_star=0.25)
    assert out.value == 0 and out.exact_bound == 0 and out.pattern is None
    assert out.reduced_cost == 0.25


def test_exact_zero_budget_returns_warm_with_root_bound():
    H = random_h(11)
    warm = greedy_bbqp(H, "original")
    out = exact_bbqp(H, warm, node_limit=0, engine="bnb")
    root = -solve_lp(build_pricing_ip(H).base).objective
    assert np.array_equal(out.a, warm.a) and np.array_equal(out.b, warm.b)
    assert out.value == warm.value
    assert out.exact_bound == pytest.approx(root)
    assert out.exact_bound >= brute_force_bbqp(H)[0] - 1e-9


def test_bbqp_value_is_exact_with_fractions():
    H = np.array([[Fraction(1, 3), Fraction(1, 3)], [Fraction(1, 3), Fraction(-1, 7)]], dtype=object)
    assert bbqp_value(H, [True, True], [True, False]) == Fraction(2, 3)
    assert bbqp_value(H, [True, True], [True, True]) == Fraction(1) - Fraction(1, 7)
