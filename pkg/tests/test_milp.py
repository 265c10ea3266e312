import itertools
from fractions import Fraction

import numpy as np
import pytest

from kbmf.formulations import build_compact, compact_factorisation, compact_point
from kbmf.lp import GE, INF, LE, LpBuilder, LpModel
from kbmf.matrix import boolean_product
from kbmf.milp import MilpModel, solve_milp
from kbmf.objective import frobenius_error
from kbmf.oracle import brute_force_kbmf

from conftest import random_matrix
from naive_simplex import naive_lp


def random_milp(rng):
    """Small mixed model: integer vars in [0, 2], continuous vars in [0, 3]."""
    ni = int(rng.integers(2, 6))
    nc = int(rng.integers(0, 3))
    nr = int(rng.integers(1, 4))
    nv = ni + nc
    A = rng.integers(-3, 4, (nr, nv))
    sense = [str(s) for s in rng.choice([LE, GE], nr)]
    rhs = rng.integers(-2, 6, nr)
    c = rng.integers(-5, 6, nv)
    ub = np.array([2] * ni + [3] * nc, dtype=float)
    return LpModel(c, np.zeros(nv), ub, A, sense, rhs), ni


def enumerate_milp(model: LpModel, ni: int):
    """Enumerate the integer part, solve the continuous rest with the naive tableau."""
    best = None
    A = model.A.toarray()
    nv = model.num_vars
    for vals in itertools.product(*(range(int(u) + 1) for u in model.ub[:ni])):
        fixed = np.array(vals, dtype=float)
        if nv == ni:
            if model.is_feasible(fixed):
                v = Fraction(int(model.c @ fixed))
                best = v if best is None else min(best, v)
            continue
        rhs = model.rhs - A[:, :ni] @ fixed
        status, v = naive_lp(model.c[ni:].tolist(), A[:, ni:].tolist(), model.sense, rhs.tolist(),
                             [0] * (nv - ni), model.ub[ni:].tolist())
        if status == "optimal":
            v += int(model.c[:ni] @ fixed)
            best = v if best is None else min(best, v)
    return best


@pytest.mark.parametrize("engine", ["bnb", "highs"])
def test_random_milps_match_enumeration(rng, engine):
    for _ in range(60):
        model, ni = random_milp(rng)
        expect = enumerate_milp(model, ni)
        res = solve_milp(model, integer=np.arange(ni), engine=engine)
        if expect is None:
            assert res.status == "infeasible"
            continue
        assert res.status == "optimal"
        assert res.objective == pytest.approx(float(expect), abs=1e-6)
        assert res.bound <= res.objective + 1e-6
        assert model.is_feasible(res.x, 1e-6)
        assert np.allclose(res.x[:ni], np.round(res.x[:ni]), atol=1e-6)


def test_integral_objective_pruning_keeps_optimum(rng):
    for _ in range(40):
        model, ni = random_milp(rng)
        if ni != model.num_vars:
            continue
        expect = enumerate_milp(model, ni)
        res = solve_milp(model, integer=np.arange(ni), integral_objective=True)
        if expect is not None:
            assert res.objective == pytest.approx(float(expect))


def test_lp_integral_model_solves_at_root():
    b = LpBuilder()
    x = b.add_var(0, 5, obj=-1)
    y = b.add_var(0, 5, obj=-1)
    b.add_row({x: 1, y: 1}, LE, 4)
    res = solve_milp(b.build(), integer=[x, y])
    assert res.status == "optimal"
    assert res.nodes == 1
    assert res.objective == pytest.approx(-4)


def test_infeasible_root():
    b = LpBuilder()
    x = b.add_var(0, 1)
    b.add_row({x: 1}, GE, 2)
    for engine in ("bnb", "highs"):
        res = solve_milp(b.build(), integer=[x], engine=engine)
        assert res.status == "infeasible"
        assert res.proven


def test_integer_infeasible_but_lp_feasible():
    b = LpBuilder()
    x = b.add_var(0, 1)
    b.add_row({x: 2}, GE, 1)
    b.add_row({x: 2}, LE, 1)
    assert solve_milp(b.build(), integer=[x]).status == "infeasible"


def test_warm_start_is_kept_with_zero_budget(rng):
    for _ in range(20):
        model, ni = random_milp(rng)
        if ni != model.num_vars:
            continue
        feasible = [np.array(v, float) for v in itertools.product(range(3), repeat=ni) if model.is_feasible(np.array(v, float))]
        if not feasible:
            continue
        warm = feasible[-1]
        for engine in ("bnb", "highs"):
            res = solve_milp(model, integer=np.arange(ni), warm_start=warm, node_limit=0, engine=engine)
            assert res.objective == pytest.approx(model.objective_value(warm))
            assert res.bound <= res.objective + 1e-9
            full = solve_milp(model, integer=np.arange(ni), warm_start=warm, engine=engine)
            assert full.objective <= model.objective_value(warm) + 1e-9


def test_bad_warm_start_is_rejected():
    b = LpBuilder()
    x = b.add_var(0, 1)
    b.add_row({x: 1}, LE, 0.5)
    with pytest.raises(ValueError):
        solve_milp(b.build(), integer=[x], warm_start=[1.0])
    with pytest.raises(ValueError):
        solve_milp(b.build(), integer=[x], warm_start=[0.0, 0.0])
    with pytest.raises(ValueError):
        solve_milp(b.build(), integer=[x], engine="cplex")


def test_node_limit_gives_valid_bound(rng):
    for _ in range(20):
        model, ni = random_milp(rng)
        expect = enumerate_milp(model, ni)
        res = solve_milp(model, integer=np.arange(ni), node_limit=2)
        if expect is not None:
            assert res.bound <= float(expect) + 1e-6
            if res.x is not None:
                assert res.objective >= float(expect) - 1e-6


def test_milp_model_defaults():
    b = LpBuilder()
    x = b.add_var(0, 3, obj=-1)
    b.add_row({x: 2}, LE, 5)
    mm = MilpModel(b.build(), [x], warm_start=np.array([1.0]))
    res = solve_milp(mm)
    assert res.objective == pytest.approx(-2)
    with pytest.raises(ValueError):
        MilpModel(b.build(), [3])


def test_compact_ip_on_small_example(three_by_three):
    for engine in ("bnb", "highs"):
        model = build_compact(three_by_three, 2, relaxed=False)
        res = solve_milp(model, engine=engine)
        assert res.status == "optimal"
        assert res.objective == pytest.approx(0)
        f = compact_factorisation(model, res.x)
        assert frobenius_error(three_by_three, boolean_product(f)) == 0


def test_compact_ip_matches_oracle(rng):
    for _ in range(8):
        X = random_matrix(rng, 4, 4)
        if not X.ones.any():
            continue
        expect, f_opt = brute_force_kbmf(X, 2)
        model = build_compact(X, 2, relaxed=False)
        warm = compact_point(model, f_opt)
        assert model.base.objective_value(warm) == pytest.approx(float(expect))
        res = solve_milp(model, engine="bnb")
        assert res.status == "optimal"
        assert res.objective == pytest.approx(float(expect))
        f = compact_factorisation(model, res.x)
        assert frobenius_error(X, boolean_product(f)) == expect
