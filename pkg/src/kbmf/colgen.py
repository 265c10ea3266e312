"""
Column generation for the master LP, the integer stage over generated
columns, and optimality certification.

Each iteration solves the restricted master LP, builds the pricing matrix H
from its duals, runs the heuristic portfolio (and exact pricing when the
policy asks for it) and adds up to ``columns_per_iter`` new patterns with
negative reduced cost. When exact pricing supplies an upper bound U on
max a^T H b, the reduced-cost lower bound is mu - U and

    RMLP value + k * min(0, mu - U)

is a valid lower bound on the full master LP.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .formulations import (ColumnPool, MasterMode, as_weighted, build_master, master_objective_integral,
                           master_point, master_selection, pricing_matrix)
from .heuristics import greedy_sequence
from .lp import LpSolution, solve_lp
from .matrix import Factorisation, Rank1Pattern, patterns_to_factorisation
from .milp import MilpResult, solve_milp
from .pricing import bbqp_value, distinct_best, exact_bbqp, portfolio_members
from .preprocess import WeightedBinaryMatrix

POLICIES = ("always", "on-heuristic-failure", "never")

OPTIMAL_LP = "optimal-lp"
CEILING_STOP = "ceiling-stop"
TIME_LIMIT = "time-limit"
ITERATION_LIMIT = "iteration-limit"
NO_COLUMN = "no-improving-column"


@dataclass
class CgConfig:
    """
    :param mode:                    objective of the master problem
    :param time_limit:              soft wall-clock limit in seconds, checked between iterations
    :param max_iter:                optional cap on master solves
    :param columns_per_iter:        new patterns added per iteration at most
    :param warm_start_patterns:     initial pool; None seeds it with k-Greedy unless ``cold_start``
    :param cold_start:              start from an empty pool
    :param exact_pricing:           ``always``, ``on-heuristic-failure`` or ``never``
    :param ceiling_stop:            stop once the rounded-up dual bound reaches the master value
                                    (only when integer solutions have integral objective)
    :param exact:                   exact rational duals and objective values from the simplex basis
    :param pricing_time_limit:      budget of one exact pricing call
    :param pricing_node_limit:      node budget of one exact pricing call
    :param pricing_engine:          MILP engine for exact pricing
    :param lp_method:               ``revised``, ``highs``, ``barrier`` or ``auto`` (barrier, or the
                                    revised simplex when ``exact``). Barrier duals lie inside the
                                    optimal dual face and price out far better columns than
                                    vertex duals on these degenerate masters
    :param tol:                     reduced cost threshold
    """

    mode: MasterMode = field(default_factory=MasterMode)
    k: int = 2
    time_limit: float = 60.0
    max_iter: int | None = None
    columns_per_iter: int = 2
    warm_start_patterns: Sequence[Rank1Pattern] | None = None
    cold_start: bool = False
    seed: int = 0
    exact_pricing: str = "on-heuristic-failure"
    ceiling_stop: bool = True
    exact: bool = False
    pricing_time_limit: float = 25.0
    pricing_node_limit: int = 50_000
    pricing_engine: str = "highs"
    lp_method: str = "auto"
    tol: float = 1e-6
    greedy_seeds: int = 5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.columns_per_iter < 1:
            raise ValueError("columns_per_iter must be at least 1")
        if self.exact_pricing not in POLICIES:
            raise ValueError(f"exact_pricing must be one of {POLICIES}")
        if self.exact and self.lp_method in ("highs", "barrier"):
            raise ValueError("exact duals need the revised simplex")


@dataclass
class CgIteration:
    """
    One master solve. ``omega_lower`` and ``dual_bound`` are set only on
    iterations where exact pricing gave a valid bound.
    """

    iteration: int
    rmlp: float
    rmlp_exact: Fraction | None
    omega_lower: float | Fraction | None
    dual_bound: float | Fraction | None
    best_dual_bound: float | Fraction
    pool_size: int
    added: int
    pricing: str
    elapsed: float

    def as_dict(self) -> dict:
        def num(v):
            return None if v is None else float(v)
        return {"iteration": self.iteration, "rmlp": self.rmlp, "omega_lower": num(self.omega_lower),
                "dual_bound": num(self.dual_bound), "best_dual_bound": num(self.best_dual_bound),
                "pool_size": self.pool_size, "added": self.added, "pricing": self.pricing,
                "elapsed": self.elapsed}


@dataclass
class CgState:
    pool: ColumnPool
    log: list[CgIteration]
    best_dual_bound: float | Fraction
    status: str
    lp_value: float
    lp_value_exact: Fraction | None
    lp_solution: LpSolution | None
    mode: MasterMode
    k: int
    elapsed: float

    @property
    def integral_objective(self) -> bool:
        return master_objective_integral(self.mode)


def _seeds_for(seed: int, iteration: int) -> list[int]:
    ss = np.random.SeedSequence([seed, iteration, 7])
    return [int(v) for v in ss.generate_state(22)]


def _initial_patterns(X, cfg: CgConfig) -> list[Rank1Pattern]:
    if cfg.cold_start:
        return []
    if cfg.warm_start_patterns is not None:
        return list(cfg.warm_start_patterns)
    best, best_err = None, None
    wx = as_weighted(X)
    for s in range(cfg.greedy_seeds):
        f = greedy_sequence(wx, cfg.k, s)
        err = MasterMode().evaluate(wx.core, f, (wx.row_weights, wx.col_weights))
        if best is None or err < best_err:
            best, best_err = f, err
    return best.patterns()


def _lp_method(cfg: CgConfig, model) -> str:
    if cfg.exact:
        return "revised"
    return "barrier" if cfg.lp_method == "auto" else cfg.lp_method


def _as_float_matrix(H) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in H]) if H.dtype == object else H


def _exact_value(H, a, b) -> Fraction:
    """a^T H b accumulated without rounding."""
    sub = np.asarray(H)[np.ix_(a, b)].ravel().tolist()
    return sum((v if isinstance(v, Fraction) else Fraction(float(v)) for v in sub), Fraction(0))


def run_cg(X, cfg: CgConfig) -> CgState:
    """
    Column generation on the master LP of X (plain or weighted).
    """
    t0 = time.perf_counter()
    k = cfg.k
    mode = cfg.mode
    wx = as_weighted(X)
    pool = ColumnPool(p for p in _initial_patterns(wx, cfg))
    integral = master_objective_integral(mode)
    best_bound: float | Fraction = Fraction(0) if cfg.exact else 0.0
    log: list[CgIteration] = []
    status = None
    sol = None
    z = math.inf
    z_exact = None
    it = 0

    while True:
        model = build_master(wx, k, mode, pool)
        sol = solve_lp(model, method=_lp_method(cfg, model), exact=cfg.exact)
        if sol.status != "optimal":
            raise RuntimeError(f"restricted master LP ended with status {sol.status}")
        use_exact = cfg.exact and sol.exact is not None and sol.exact.optimal
        z = sol.objective
        z_exact = sol.exact.objective if use_exact else None
        duals = sol.exact.duals if use_exact else sol.duals
        H, mu = pricing_matrix(model, duals)
        Hf = _as_float_matrix(H)
        muf = float(mu)

        members = portfolio_members(Hf, seeds=_seeds_for(cfg.seed, it))
        new = []
        for out in distinct_best(members, len(members)):
            p = out.pattern
            if p in pool:
                continue
            # float screen, then exact confirmation
            if muf - out.value < -cfg.tol and mu - _exact_value(H, p.a, p.b) < 0:
                new.append(p)
            if len(new) == cfg.columns_per_iter:
                break

        pricing = "heuristic"
        omega_lower = None
        bound = None
        exact_optimal = False
        run_exact = cfg.exact_pricing == "always" or (cfg.exact_pricing == "on-heuristic-failure" and not new)
        if run_exact:
            remaining = cfg.time_limit - (time.perf_counter() - t0)
            warm = max(members, key=lambda o: o.value)
            ex = exact_bbqp(Hf, warm=warm, node_limit=cfg.pricing_node_limit,
                            time_limit=max(0.5, min(cfg.pricing_time_limit, remaining)),
                            engine=cfg.pricing_engine)
            pricing = "exact"
            exact_optimal = ex.exact_bound <= ex.value + 1e-9
            if use_exact:
                v = _exact_value(H, ex.a, ex.b) if ex.pattern is not None else Fraction(0)
                upper = v if exact_optimal else max(v, Fraction(float(ex.exact_bound)))
                omega_lower = mu - upper
                bound = z_exact + k * min(Fraction(0), omega_lower)
            elif math.isfinite(ex.exact_bound):
                omega_lower = muf - float(ex.exact_bound)
                bound = z + k * min(0.0, omega_lower)
            if bound is not None and bound > best_bound:
                best_bound = bound
            p = ex.pattern
            if p is not None and p not in pool and all(p != q for q in new) and len(new) < cfg.columns_per_iter:
                if muf - ex.value < -cfg.tol and mu - _exact_value(H, p.a, p.b) < 0:
                    new.append(p)

        added = pool.extend(new)
        elapsed = time.perf_counter() - t0
        log.append(CgIteration(it, z, z_exact, omega_lower, bound, best_bound, len(pool), added, pricing, elapsed))
        it += 1

        zz = z_exact if z_exact is not None else z
        if integral and cfg.ceiling_stop and math.ceil(float(best_bound) - cfg.tol) >= float(zz) - cfg.tol:
            status = CEILING_STOP
            break
        if added == 0:
            if run_exact and exact_optimal:
                status = OPTIMAL_LP
                if zz > best_bound:
                    best_bound = zz
                log[-1].best_dual_bound = best_bound
            else:
                status = NO_COLUMN
            break
        if elapsed >= cfg.time_limit:
            status = TIME_LIMIT
            break
        if cfg.max_iter is not None and it >= cfg.max_iter:
            status = ITERATION_LIMIT
            break

    return CgState(pool, log, best_bound, status, z, z_exact, sol, mode, k, time.perf_counter() - t0)


@dataclass
class IntegralResult:
    """
    :param factorisation:   selected patterns padded to rank k (core shape)
    :param selected:        pool indices
    :param objective:       master IP objective of the selection
    """

    factorisation: Factorisation
    selected: list[int]
    objective: float
    milp: MilpResult


def integral_stage(X, k: int, pool: ColumnPool, mode: MasterMode, time_limit: float | None = 60.0,
                   node_limit: int | None = None, warm_selection: Sequence[int] | None = None,
                   engine: str = "highs") -> IntegralResult:
    """
    Restricted master IP over ``pool``: choose at most k patterns.

    ``warm_selection`` is a list of pool indices used as the incumbent to beat.
    """
    wx = as_weighted(X)
    n, m = wx.core.shape
    if len(pool) == 0:
        f = patterns_to_factorisation([], [], k, shape=(n, m))
        value = mode.evaluate(wx.core, f, (wx.row_weights, wx.col_weights))
        dummy = MilpResult("optimal", None, float(value), float(value), 0, 0.0, "none")
        return IntegralResult(f, [], float(value), dummy)
    model = build_master(wx, k, mode, pool, relaxed=False)
    warm = master_point(model, warm_selection) if warm_selection is not None else None
    r = solve_milp(model, warm_start=warm, time_limit=time_limit, node_limit=node_limit, engine=engine)
    if r.x is None:
        selected = []
    else:
        selected = master_selection(model, r.x)
    f = patterns_to_factorisation(pool, selected, k, shape=(n, m))
    return IntegralResult(f, selected, r.objective, r)


@dataclass
class Certificate:
    proven: bool
    gap: float | Fraction
    bound: float | Fraction


def certify_optimality(state: CgState, ip_objective, bound=None) -> Certificate:
    """
    Compare an integer objective against the dual bound of ``state``.

    With integral objectives the bound may be rounded up; otherwise the values
    are compared directly (within 1e-9 for floats).
    """
    bound = state.best_dual_bound if bound is None else bound
    exact = isinstance(bound, (int, Fraction)) and isinstance(ip_objective, (int, Fraction))
    if state.integral_objective:
        proven = ip_objective <= math.ceil(float(bound) - 1e-6) + (0 if exact else 1e-9)
    else:
        proven = ip_objective <= bound if exact else float(ip_objective) <= float(bound) + 1e-9
    gap = Fraction(ip_objective) - Fraction(bound) if exact else float(ip_objective) - float(bound)
    return Certificate(bool(proven), gap, bound)
