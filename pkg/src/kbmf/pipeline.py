"""
End-to-end factorisation: k-Greedy warm start, column generation on the
reduced matrix, restricted master IP, expansion and certification.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .colgen import CgConfig, CgState, IntegralResult, certify_optimality, integral_stage, run_cg
from .formulations import ColumnPool, MasterMode, build_compact, compact_factorisation, compact_point
from .heuristics import DEFAULT_SEEDS, KGreedyResult, k_greedy_detailed
from .matrix import BinaryMatrix, Factorisation, boolean_product, zero_factorisation
from .milp import solve_milp
from .objective import frobenius_error, rho_error
from .preprocess import WeightedBinaryMatrix, expand, reduce, restrict


@dataclass
class PipelineConfig:
    """
    :param mode:            objective of the master problems
    :param cg_time:         column generation budget (seconds)
    :param ip_time:         restricted master IP budget (seconds)
    :param greedy_seeds:    k-Greedy seeds for the warm start
    :param preprocess:      solve on the reduced matrix
    :param cold_start:      start column generation from an empty pool
    :param exact_pricing:   exact pricing policy for column generation
    :param ip_engine:       MILP engine of the integer stage
    """

    k: int = 2
    mode: MasterMode = field(default_factory=MasterMode)
    cg_time: float = 60.0
    ip_time: float = 60.0
    seed: int = 0
    greedy_seeds: int = DEFAULT_SEEDS
    preprocess: bool = True
    cold_start: bool = False
    exact_pricing: str = "on-heuristic-failure"
    columns_per_iter: int = 2
    lp_method: str = "auto"
    ip_engine: str = "highs"
    pricing_engine: str = "highs"
    pricing_time_limit: float = 25.0
    ceiling_stop: bool = True


@dataclass
class PipelineResult:
    """
    :param factorisation:       final factors of the original matrix
    :param zeta_f:              Frobenius error of the final factors
    :param zeta_rho:            rho-objective value of the final factors (rho of the config)
    :param objective:           value of the final factors under the configured objective
    :param dual_bound:          lower bound on the configured objective
    :param zeta_f_lower_bound:  lower bound on the optimal Frobenius error
    :param proven:              the final factors are optimal for the Frobenius error
    :param source:              ``ip``, ``greedy`` or ``trivial``
    """

    factorisation: Factorisation
    zeta_f: int
    zeta_rho: Fraction
    objective: Fraction
    dual_bound: float | Fraction
    zeta_f_lower_bound: int | float
    proven: bool
    objective_proven: bool
    gap: float
    source: str
    greedy: KGreedyResult | None
    cg: CgState | None
    ip: IntegralResult | None
    reduced_shape: tuple[int, int] | None
    timings: dict


def greedy_seed_list(seed: int, count: int) -> list[int]:
    """k-Greedy seeds for run seed ``seed``: a block of ``count`` consecutive integers."""
    return list(range(seed * count, (seed + 1) * count))


def _evaluate(X: BinaryMatrix, f: Factorisation, mode: MasterMode):
    zf = frobenius_error(X, boolean_product(f))
    zr = rho_error(X, f, mode.rho)
    obj = Fraction(zf) if mode.mode == "frobenius" else zr
    return zf, zr, obj


def _frobenius_lower(bound, mode: MasterMode, k: int):
    """Lower bound on the optimal Frobenius error implied by a bound on the mode objective."""
    if mode.mode == "frobenius":
        return math.ceil(float(bound) - 1e-6)
    # zeta(rho) <= max(1, rho k) * zeta_F for every factorisation
    return math.ceil(float(bound) / max(1.0, float(mode.rho) * k) - 1e-6)


def factorize(X: BinaryMatrix, cfg: PipelineConfig) -> PipelineResult:
    """
    Rank-k factorisation of X with a certificate when one is found.
    """
    t0 = time.perf_counter()
    k, mode = cfg.k, cfg.mode
    timings: dict = {}
    if not X.known.any():
        raise ValueError("every cell is missing")

    if not X.ones.any():
        f = zero_factorisation(X.n, X.m, k)
        zf, zr, obj = _evaluate(X, f, mode)
        return PipelineResult(f, zf, zr, obj, Fraction(0), 0, True, True, 0.0, "trivial", None, None, None,
                              None, {"total": time.perf_counter() - t0})

    greedy = k_greedy_detailed(X, k, seeds=greedy_seed_list(cfg.seed, cfg.greedy_seeds))
    timings["greedy"] = time.perf_counter() - t0
    gf, gr, gobj = _evaluate(X, greedy.factorisation, mode)
    if gf == 0:
        # zero error is optimal under both objectives
        return PipelineResult(greedy.factorisation, 0, gr, gobj, Fraction(0), 0, True, True, 0.0, "greedy",
                              greedy, None, None, None, {**timings, "total": time.perf_counter() - t0})

    wx = reduce(X) if cfg.preprocess else WeightedBinaryMatrix.unweighted(X)
    warm_f = restrict(wx, greedy.factorisation)
    warm_patterns = warm_f.patterns()

    t1 = time.perf_counter()
    cg_cfg = CgConfig(mode=mode, k=k, time_limit=cfg.cg_time, columns_per_iter=cfg.columns_per_iter,
                      warm_start_patterns=None if cfg.cold_start else warm_patterns, cold_start=cfg.cold_start,
                      seed=cfg.seed, exact_pricing=cfg.exact_pricing, ceiling_stop=cfg.ceiling_stop,
                      lp_method=cfg.lp_method, pricing_engine=cfg.pricing_engine,
                      pricing_time_limit=cfg.pricing_time_limit)
    state = run_cg(wx, cg_cfg)
    timings["cg"] = time.perf_counter() - t1

    t2 = time.perf_counter()
    pool = state.pool
    warm_sel = [pool.index(p) for p in ColumnPool(warm_patterns)] if all(p in pool for p in warm_patterns) else None
    if warm_sel is not None and len(warm_sel) > k:
        warm_sel = None
    ip = integral_stage(wx, k, pool, mode, time_limit=cfg.ip_time, warm_selection=warm_sel,
                        engine=cfg.ip_engine)
    timings["ip"] = time.perf_counter() - t2

    f_ip = expand(wx, ip.factorisation)
    zf, zr, obj = _evaluate(X, f_ip, mode)
    candidates = [(zf, zr, obj, f_ip, "ip"), (gf, gr, gobj, greedy.factorisation, "greedy")]
    # lowest Frobenius error wins; then the configured objective; the IP solution on full ties
    zf, zr, obj, f, source = min(candidates, key=lambda c: (c[0], c[2], c[4] != "ip"))

    bound = state.best_dual_bound
    cert = certify_optimality(state, obj)
    fl = _frobenius_lower(bound, mode, k)
    proven = zf <= fl
    timings["total"] = time.perf_counter() - t0
    return PipelineResult(f, zf, zr, obj, bound, fl, proven, cert.proven, float(cert.gap), source, greedy, state,
                          ip, wx.core.shape, timings)


def solve_compact(X: BinaryMatrix, k: int, time_limit: float | None = 60.0, node_limit: int | None = None,
                  warm: Factorisation | None = None, engine: str = "highs", preprocess: bool = True):
    """
    Compact integer program on (optionally) the reduced matrix.

    :return: (factorisation of X, MilpResult)
    """
    wx = reduce(X) if preprocess and X.ones.any() else WeightedBinaryMatrix.unweighted(X)
    model = build_compact(wx, k, relaxed=False)
    warm_x = compact_point(model, restrict(wx, warm)) if warm is not None else None
    r = solve_milp(model, warm_start=warm_x, time_limit=time_limit, node_limit=node_limit, engine=engine)
    if r.x is None:
        return zero_factorisation(X.n, X.m, k), r
    return expand(wx, compact_factorisation(model, r.x)), r
