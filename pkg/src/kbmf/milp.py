"""
Mixed-integer programs over :class:`~kbmf.lp.LpModel`.

Two engines share one result type:

* ``"bnb"``: LP-based branch and bound on top of :func:`kbmf.lp.solve_lp`.
  Depth-first with periodic best-bound restarts, most-fractional branching
  with optional priority groups.
* ``"highs"``: scipy's HiGHS MILP solver, with the warm start kept by the
  wrapper since scipy does not pass it through.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .lp import EQ, GE, LE, INF, LpModel, solve_lp

OPTIMAL = "optimal"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
NO_SOLUTION = "no-solution"


@dataclass(eq=False)
class MilpModel:
    """
    An LP model plus integrality restrictions.

    :param base:                the continuous model
    :param integer_vars:        indices of integer variables
    :param warm_start:          optional feasible integer point
    :param priority:            optional branching groups, earlier groups first
    :param integral_objective:  every integer-feasible point has an integral objective
    """

    base: LpModel
    integer_vars: np.ndarray
    warm_start: np.ndarray | None = None
    priority: list | None = None
    integral_objective: bool = False

    def __post_init__(self):
        self.integer_vars = np.asarray(self.integer_vars, dtype=np.int64)
        if len(self.integer_vars) and (self.integer_vars.min() < 0 or self.integer_vars.max() >= self.base.num_vars):
            raise ValueError("integer variable index out of range")

    @property
    def meta(self) -> dict:
        return self.base.meta

    def relaxation(self) -> LpModel:
        return self.base


@dataclass
class MilpResult:
    """
    :param status:      ``optimal`` (proven), ``feasible`` (budget hit with an
                        incumbent), ``infeasible`` or ``no-solution``
    :param bound:       valid lower bound on the optimum
    """

    status: str
    x: np.ndarray | None
    objective: float
    bound: float
    nodes: int
    time: float
    engine: str

    @property
    def proven(self) -> bool:
        return self.status == OPTIMAL or self.status == INFEASIBLE


def _integer_mask(model: LpModel, integer) -> np.ndarray:
    mask = np.zeros(model.num_vars, dtype=bool)
    if integer is None:
        return mask
    integer = np.asarray(integer)
    if integer.dtype == bool:
        mask[:] = integer
    else:
        mask[integer.astype(np.int64)] = True
    return mask


def _fractionality(x: np.ndarray, mask: np.ndarray, tol: float) -> np.ndarray:
    frac = np.abs(x - np.round(x))
    frac[~mask] = 0.0
    frac[frac <= tol] = 0.0
    return frac


def _prune_level(incumbent: float, integral_objective: bool, tol: float) -> float:
    """Nodes whose bound reaches this value cannot improve the incumbent."""
    if incumbent == INF:
        return INF
    if integral_objective:
        return incumbent - 1 + tol
    return incumbent - tol


def _check_warm(model: LpModel, mask: np.ndarray, x, tol: float):
    if x is None:
        return None
    x = np.asarray(x, dtype=float)
    if x.shape != (model.num_vars,):
        raise ValueError("warm start has the wrong length")
    if not model.is_feasible(x, tol) or np.any(_fractionality(x, mask, tol) > 0):
        raise ValueError("warm start is not a feasible integer point")
    return x


def _solve_bnb(model: LpModel, mask, warm, node_limit, time_limit, integral_objective, priority, tol,
               lp_method, restart_every) -> MilpResult:
    t0 = time.perf_counter()
    inc_x = warm
    inc_obj = model.objective_value(warm) if warm is not None else INF
    groups = [np.flatnonzero(mask)] if priority is None else [np.asarray(g, dtype=np.int64) for g in priority]

    # open nodes: (parent bound, lb, ub)
    stack = [(-INF, model.lb.copy(), model.ub.copy())]
    nodes = 0

    while stack:
        if node_limit is not None and nodes >= node_limit:
            break
        if time_limit is not None and time.perf_counter() - t0 >= time_limit:
            break
        if restart_every and nodes and nodes % restart_every == 0:
            best = min(range(len(stack)), key=lambda t: stack[t][0])
            stack.append(stack.pop(best))
        parent_bound, lb, ub = stack.pop()
        if parent_bound >= _prune_level(inc_obj, integral_objective, tol):
            continue
        sol = solve_lp(model.with_bounds(lb, ub), tol=1e-9, method=lp_method)
        nodes += 1
        if sol.status != "optimal":
            if sol.status == "unbounded":
                raise ValueError("LP relaxation is unbounded")
            if sol.status == "infeasible":
                continue
            # iteration limit: treat as unexplored, keep parent bound
            stack.insert(0, (parent_bound, lb, ub))
            continue
        bound = max(parent_bound, sol.dual_bound if math.isfinite(sol.dual_bound) else sol.objective)
        if bound >= _prune_level(inc_obj, integral_objective, tol):
            continue
        x = sol.x
        frac = _fractionality(x, mask, 1e-6)
        branch = None
        for g in groups:
            if len(g) and frac[g].max() > 0:
                # most fractional, lowest index on ties
                branch = int(g[np.argmax(np.round(frac[g], 9))])
                break
        if branch is None:
            xi = x.copy()
            xi[mask] = np.round(xi[mask])
            if not model.is_feasible(xi, 1e-6):
                xi = x
            obj = model.objective_value(xi)
            if obj < inc_obj - tol:
                inc_obj, inc_x = obj, xi
            continue
        v = x[branch]
        down_ub = ub.copy()
        down_ub[branch] = math.floor(v)
        up_lb = lb.copy()
        up_lb[branch] = math.ceil(v)
        down = (bound, lb, down_ub)
        up = (bound, up_lb, ub)
        # explore the nearer side first
        if v - math.floor(v) >= 0.5:
            stack.extend([down, up])
        else:
            stack.extend([up, down])

    elapsed = time.perf_counter() - t0
    if not stack:
        if inc_x is None:
            return MilpResult(INFEASIBLE, None, INF, INF, nodes, elapsed, "bnb")
        return MilpResult(OPTIMAL, inc_x.copy(), inc_obj, inc_obj, nodes, elapsed, "bnb")
    bound = min(b for b, _, _ in stack)
    if bound == -INF:
        # the root was never solved
        root = solve_lp(model, tol=1e-9, method=lp_method)
        if root.status == "infeasible":
            return MilpResult(INFEASIBLE, None, INF, INF, nodes, elapsed, "bnb")
        bound = root.dual_bound if math.isfinite(root.dual_bound) else root.objective
    bound = min(bound, inc_obj)
    status = FEASIBLE if inc_x is not None else NO_SOLUTION
    if inc_x is not None and bound >= _prune_level(inc_obj, integral_objective, tol):
        status = OPTIMAL
    return MilpResult(status, None if inc_x is None else inc_x.copy(), inc_obj, bound, nodes,
                      time.perf_counter() - t0, "bnb")


def _solve_highs(model: LpModel, mask, warm, node_limit, time_limit, integral_objective, tol) -> MilpResult:
    from scipy.optimize import Bounds, LinearConstraint, milp

    t0 = time.perf_counter()
    lo = np.array([-INF if s == LE else r for s, r in zip(model.sense, model.rhs)])
    hi = np.array([INF if s == GE else r for s, r in zip(model.sense, model.rhs)])
    options = {"mip_rel_gap": 1e-9}
    if node_limit is not None:
        options["node_limit"] = max(1, int(node_limit))
    if time_limit is not None:
        options["time_limit"] = max(1e-3, float(time_limit))
    cons = [LinearConstraint(model.A, lo, hi)] if model.num_rows else []
    res = milp(model.c, integrality=mask.astype(np.int64), bounds=Bounds(model.lb, model.ub),
               constraints=cons, options=options)
    inc_x, inc_obj = (warm, model.objective_value(warm)) if warm is not None else (None, INF)
    if res.x is not None:
        x = np.asarray(res.x, dtype=float)
        x[mask] = np.round(x[mask])
        if model.is_feasible(x, 1e-6):
            obj = model.objective_value(x)
            if obj < inc_obj - tol:
                inc_x, inc_obj = x, obj
    if res.status == 2 and inc_x is None:
        return MilpResult(INFEASIBLE, None, INF, INF, 0, time.perf_counter() - t0, "highs")
    if res.status == 0:
        bound = inc_obj
        status = OPTIMAL
    else:
        dual = getattr(res, "mip_dual_bound", None)
        bound = float(dual) + float(model.constant) if dual is not None and np.isfinite(dual) else -INF
        bound = min(bound, inc_obj)
        status = FEASIBLE if inc_x is not None else NO_SOLUTION
        if inc_x is not None and bound >= _prune_level(inc_obj, integral_objective, tol):
            status = OPTIMAL
    nodes = int(getattr(res, "mip_node_count", 0) or 0)
    return MilpResult(status, inc_x, inc_obj, bound, nodes, time.perf_counter() - t0, "highs")


def solve_milp(model: LpModel | MilpModel, integer=None, warm_start=None, node_limit: int | None = None,
               time_limit: float | None = None, integral_objective: bool = False, priority=None,
               engine: str = "bnb", tol: float = 1e-6, lp_method: str = "revised",
               restart_every: int = 500) -> MilpResult:
    """
    Minimise a model with some variables restricted to integers.

    A :class:`MilpModel` supplies defaults for ``integer``, ``warm_start``,
    ``priority`` and ``integral_objective``; explicit arguments override them.

    :param integer:             indices or boolean mask of integer variables
    :param warm_start:          feasible integer point; the returned incumbent is never worse
    :param node_limit:          LP relaxations to solve; 0 returns the warm start with the root bound
    :param integral_objective:  every integer point has an integral objective, so nodes
                                with bound above ``incumbent - 1`` are pruned
    :param priority:            list of index groups; branching picks from the first
                                group holding a fractional variable
    :param engine:              ``"bnb"`` or ``"highs"``
    """
    if isinstance(model, MilpModel):
        integer = model.integer_vars if integer is None else integer
        warm_start = model.warm_start if warm_start is None else warm_start
        priority = model.priority if priority is None else priority
        integral_objective = integral_objective or model.integral_objective
        model = model.base
    mask = _integer_mask(model, integer)
    warm = _check_warm(model, mask, warm_start, 1e-6)
    if engine == "bnb":
        return _solve_bnb(model, mask, warm, node_limit, time_limit, integral_objective, priority, tol,
                          lp_method, restart_every)
    if engine == "highs":
        if node_limit == 0:
            return _solve_bnb(model, mask, warm, 0, time_limit, integral_objective, priority, tol,
                              "highs", restart_every)
        return _solve_highs(model, mask, warm, node_limit, time_limit, integral_objective, tol)
    raise ValueError(f"unknown MILP engine {engine!r}")
