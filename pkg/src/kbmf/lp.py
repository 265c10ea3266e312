"""
Bounded-variable linear programs.

Models are ``min c^T x + constant`` subject to sparse rows with relation
``<=``, ``>=`` or ``==`` and box bounds ``lb <= x <= ub``. Three backends:

* ``"revised"``: a primal revised simplex on the bounded-variable form,
  with a dense explicit basis inverse. Dantzig pricing, switching to Bland's
  rule after a run of degenerate pivots. The final basis can be re-solved in
  exact rational arithmetic.
* ``"highs"``: scipy's HiGHS interface, for models too large for a dense basis.
* ``"barrier"``: HiGHS interior point without crossover. On degenerate
  models its duals sit in the middle of the optimal dual face instead of at a
  vertex, which is what column generation wants.

Duals are shadow prices, i.e. the derivative of the optimal objective with
respect to the right-hand side: nonnegative on ``>=`` rows and nonpositive on
``<=`` rows of a minimisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp

LE, GE, EQ = "<=", ">=", "=="
_SENSES = (LE, GE, EQ)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"

INF = math.inf


@dataclass(eq=False)
class LpModel:
    c: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    A: sp.csr_matrix
    sense: list[str]
    rhs: np.ndarray
    constant: Fraction = Fraction(0)
    c_exact: tuple[Fraction, ...] | None = None
    var_names: list[str] | None = None
    row_names: list[str] | None = None
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.lb = np.asarray(self.lb, dtype=float)
        self.ub = np.asarray(self.ub, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.A = sp.csr_matrix(self.A, shape=(len(self.rhs), len(self.c)))
        if np.any(self.lb > self.ub):
            raise ValueError("lower bound above upper bound")
        if not np.all(np.isfinite(self.rhs)):
            raise ValueError("right-hand sides must be finite")
        if any(s not in _SENSES for s in self.sense):
            raise ValueError("unknown constraint relation")
        if self.c_exact is None:
            self.c_exact = tuple(Fraction(float(v)) for v in self.c)

    @property
    def num_vars(self) -> int:
        return len(self.c)

    @property
    def num_rows(self) -> int:
        return len(self.rhs)

    def objective_value(self, x) -> float:
        return float(np.dot(self.c, x) + self.constant)

    def exact_objective(self, x: Sequence) -> Fraction:
        return sum((ci * Fraction(xi) for ci, xi in zip(self.c_exact, x) if ci), Fraction(0)) + self.constant

    def max_violation(self, x) -> float:
        """Largest bound or row violation of a candidate point."""
        x = np.asarray(x, dtype=float)
        viol = max(0.0, float(np.max(self.lb - x, initial=0.0)), float(np.max(x - self.ub, initial=0.0)))
        act = self.A @ x
        for s, sense in ((1, LE), (-1, GE)):
            mask = np.array([t == sense for t in self.sense], dtype=bool)
            if mask.any():
                viol = max(viol, float(np.max(s * (act[mask] - self.rhs[mask]), initial=0.0)))
        mask = np.array([t == EQ for t in self.sense], dtype=bool)
        if mask.any():
            viol = max(viol, float(np.max(np.abs(act[mask] - self.rhs[mask]), initial=0.0)))
        return viol

    def is_feasible(self, x, tol: float = 1e-9) -> bool:
        return self.max_violation(x) <= tol

    def with_bounds(self, lb, ub) -> "LpModel":
        return LpModel(self.c, lb, ub, self.A, self.sense, self.rhs, self.constant,
                       self.c_exact, self.var_names, self.row_names, self.meta)


class LpBuilder:
    """Incremental construction of an :class:`LpModel` in a fixed variable order."""

    def __init__(self):
        self._c: list[Fraction] = []
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._names: list[str] = []
        self._rows: list[int] = []
        self._cols: list[int] = []
        self._vals: list[float] = []
        self._sense: list[str] = []
        self._rhs: list[float] = []
        self._row_names: list[str] = []
        self.constant = Fraction(0)

    @property
    def num_vars(self) -> int:
        return len(self._c)

    @property
    def num_rows(self) -> int:
        return len(self._rhs)

    def add_var(self, lb: float = 0.0, ub: float = INF, obj=0, name: str = "") -> int:
        self._c.append(obj if isinstance(obj, Fraction) else Fraction(obj))
        self._lb.append(lb)
        self._ub.append(ub)
        self._names.append(name)
        return len(self._c) - 1

    def add_row(self, coeffs, sense: str, rhs: float, name: str = "") -> int:
        """``coeffs`` is a mapping or an iterable of (variable index, coefficient)."""
        if sense not in _SENSES:
            raise ValueError(f"unknown relation {sense!r}")
        items = coeffs.items() if hasattr(coeffs, "items") else coeffs
        r = len(self._rhs)
        for j, v in items:
            if v:
                self._rows.append(r)
                self._cols.append(j)
                self._vals.append(float(v))
        self._sense.append(sense)
        self._rhs.append(float(rhs))
        self._row_names.append(name)
        return r

    def build(self, meta: dict | None = None) -> LpModel:
        A = sp.coo_matrix((self._vals, (self._rows, self._cols)),
                          shape=(len(self._rhs), len(self._c))).tocsr()
        return LpModel(c=np.array([float(v) for v in self._c]), lb=np.array(self._lb, dtype=float),
                       ub=np.array(self._ub, dtype=float), A=A, sense=list(self._sense),
                       rhs=np.array(self._rhs, dtype=float), constant=self.constant,
                       c_exact=tuple(self._c), var_names=list(self._names),
                       row_names=list(self._row_names), meta=dict(meta or {}))


@dataclass
class ExactLp:
    """Rational re-solve of a simplex basis."""

    x: list[Fraction]
    duals: list[Fraction]
    objective: Fraction
    optimal: bool


@dataclass
class LpSolution:
    status: str
    x: np.ndarray
    duals: np.ndarray
    objective: float
    dual_bound: float
    reduced_costs: np.ndarray
    iterations: int = 0
    basis: tuple | None = None
    exact: ExactLp | None = None
    method: str = "revised"
    pivots: list = field(default_factory=list, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def lagrangian_bound(model: LpModel, y, zero_tol: float = 1e-9) -> float:
    """
    Valid lower bound on the LP optimum from any multiplier vector.

    Multipliers with the wrong sign for their row are clipped to zero first.
    Reduced costs within ``zero_tol`` of zero are treated as zero, so round-off
    on an unbounded variable does not collapse the bound to -inf.
    """
    y = np.array(y, dtype=float)
    for i, s in enumerate(model.sense):
        if s == LE:
            y[i] = min(y[i], 0.0)
        elif s == GE:
            y[i] = max(y[i], 0.0)
    d = model.c - model.A.T @ y
    total = float(model.rhs @ y) + float(model.constant)
    for dj, l, u in zip(d, model.lb, model.ub):
        if abs(dj) <= zero_tol:
            continue
        if dj > 0:
            if l == -INF:
                return -INF
            total += dj * l
        elif dj < 0:
            if u == INF:
                return -INF
            total += dj * u
    return total


# --------------------------------------------------------------------------
# revised simplex
# --------------------------------------------------------------------------

class _RevisedSimplex:
    def __init__(self, model: LpModel, tol: float, iter_limit: int | None,
                 refactor_every: int = 100, bland_after: int = 50, record_pivots: bool = False):
        self.model = model
        self.tol = tol
        self.piv_tol = 1e-7
        self.harris = 1e-9
        self.iter_limit = iter_limit
        self.refactor_every = refactor_every
        self.bland_after = bland_after
        self.record_pivots = record_pivots
        self.pivots: list = []
        self.iterations = 0

        A = model.A.toarray()
        nrows, nv = A.shape
        self.nv = nv
        self.nrows = nrows
        self.b = model.rhs.copy()

        lb_s = np.zeros(nrows)
        ub_s = np.zeros(nrows)
        for i, s in enumerate(model.sense):
            if s == LE:
                ub_s[i] = INF
            elif s == GE:
                lb_s[i] = -INF
        lb = np.concatenate([model.lb, lb_s])
        ub = np.concatenate([model.ub, ub_s])

        # nonbasic structurals start at a finite bound, free ones at zero
        x = np.where(np.isfinite(lb[:nv]), lb[:nv], np.where(np.isfinite(ub[:nv]), ub[:nv], 0.0))
        resid = self.b - A @ x

        art_cols = []
        art_sign = []
        basis = []
        slack_vals = np.zeros(nrows)
        for i in range(nrows):
            r = resid[i]
            if lb_s[i] - tol <= r <= ub_s[i] + tol:
                basis.append(nv + i)
                slack_vals[i] = r
            else:
                basis.append(nv + nrows + len(art_cols))
                art_cols.append(i)
                art_sign.append(1.0 if r > 0 else -1.0)
        na = len(art_cols)
        art = np.zeros((nrows, na))
        for t, (i, s) in enumerate(zip(art_cols, art_sign)):
            art[i, t] = s
        self.M = np.hstack([A, np.eye(nrows), art])
        self.lb = np.concatenate([lb, np.zeros(na)])
        self.ub = np.concatenate([ub, np.full(na, INF)])
        self.x = np.concatenate([x, slack_vals, np.abs(resid[art_cols]) if na else np.zeros(0)])
        self.na = na
        self.basis = np.array(basis, dtype=np.int64)
        self.is_basic = np.zeros(self.M.shape[1], dtype=bool)
        self.is_basic[self.basis] = True
        self.c2 = np.concatenate([model.c, np.zeros(nrows + na)])
        self.c1 = np.concatenate([np.zeros(nv + nrows), np.ones(na)])
        self._refactor()

    def _refactor(self):
        B = self.M[:, self.basis]
        self.Binv = np.linalg.inv(B)
        nb = ~self.is_basic
        self.x[self.basis] = self.Binv @ (self.b - self.M[:, nb] @ self.x[nb])
        self.since_refactor = 0

    def _iterate(self, cost: np.ndarray) -> str:
        tol = self.tol
        stall = 0
        bland = False
        while True:
            if self.iter_limit is not None and self.iterations >= self.iter_limit:
                return ITERATION_LIMIT
            if self.since_refactor >= self.refactor_every:
                self._refactor()
            y = cost[self.basis] @ self.Binv
            d = cost - y @ self.M
            nb = ~self.is_basic
            movable = self.lb < self.ub
            can_inc = nb & movable & (self.x < self.ub - tol) & (d < -tol)
            can_dec = nb & movable & (self.x > self.lb + tol) & (d > tol)
            cand = can_inc | can_dec
            if not cand.any():
                return OPTIMAL
            idx = np.flatnonzero(cand)
            if bland:
                j = int(idx[0])
            else:
                j = int(idx[np.argmax(np.abs(d[idx]))])
            direction = 1.0 if can_inc[j] else -1.0

            alpha = self.Binv @ self.M[:, j]
            delta = -direction * alpha
            xB = self.x[self.basis]
            lbB = self.lb[self.basis]
            ubB = self.ub[self.basis]
            theta = np.full(self.nrows, INF)
            relaxed = np.full(self.nrows, INF)
            dec = delta < -self.piv_tol
            inc = delta > self.piv_tol
            with np.errstate(invalid="ignore", divide="ignore"):
                theta[dec] = (xB[dec] - lbB[dec]) / -delta[dec]
                theta[inc] = (ubB[inc] - xB[inc]) / delta[inc]
                relaxed[dec] = (xB[dec] - lbB[dec] + self.harris) / -delta[dec]
                relaxed[inc] = (ubB[inc] - xB[inc] + self.harris) / delta[inc]
            theta = np.where(np.isnan(theta), INF, np.maximum(theta, 0.0))
            relaxed = np.where(np.isnan(relaxed), INF, relaxed)
            t_min = theta.min() if self.nrows else INF
            t_flip = self.ub[j] - self.lb[j]

            if t_flip <= t_min:
                if t_flip == INF:
                    return UNBOUNDED
                step = t_flip
                self.x[self.basis] = xB + step * delta
                self.x[j] = self.ub[j] if direction > 0 else self.lb[j]
                leave_row = None
            else:
                if t_min == INF:
                    return UNBOUNDED
                if bland:
                    ties = np.flatnonzero(theta <= t_min + 1e-12)
                    r = int(ties[np.argmin(self.basis[ties])])
                    step = t_min
                else:
                    # Harris: among rows blocking within the relaxed step, take the largest pivot
                    ties = np.flatnonzero(theta <= relaxed.min())
                    r = int(ties[np.argmax(np.abs(alpha[ties]))])
                    step = theta[r]
                leaving = int(self.basis[r])
                self.x[self.basis] = xB + step * delta
                self.x[j] += direction * step
                self.x[leaving] = lbB[r] if delta[r] < 0 else ubB[r]
                # eta update of the explicit inverse
                piv = alpha[r]
                row_r = self.Binv[r] / piv
                self.Binv -= np.outer(alpha, row_r)
                self.Binv[r] = row_r
                self.basis[r] = j
                self.is_basic[leaving] = False
                self.is_basic[j] = True
                self.since_refactor += 1
                leave_row = r
            if self.record_pivots:
                self.pivots.append((j, leave_row))
            self.iterations += 1

            if step <= 1e-12:
                stall += 1
                if stall >= self.bland_after:
                    bland = True
            else:
                stall = 0
                bland = False

    def solve(self) -> str:
        if self.na:
            status = self._iterate(self.c1)
            if status == ITERATION_LIMIT:
                return status
            infeas = float(self.x[self.nv + self.nrows:].sum())
            if infeas > self.tol * max(1.0, float(np.abs(self.b).max(initial=0.0))):
                return INFEASIBLE
            art = slice(self.nv + self.nrows, None)
            self.ub[art] = 0.0
            nb_art = ~self.is_basic[art]
            self.x[art][nb_art] = 0.0
            self._refactor()
        return self._iterate(self.c2)

    def duals(self) -> np.ndarray:
        return self.c2[self.basis] @ self.Binv

    def reduced_costs(self) -> np.ndarray:
        return self.c2 - self.duals() @ self.M


def _fraction_solve(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals."""
    n = len(M)
    aug = [row[:] + [r] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular basis")
        aug[col], aug[piv] = aug[piv], aug[col]
        prow = aug[col]
        pv = prow[col]
        if pv != 1:
            prow = [v / pv for v in prow]
            aug[col] = prow
        nz = [c for c in range(col, n + 1) if prow[c] != 0]
        for r in range(n):
            if r != col:
                f = aug[r][col]
                if f != 0:
                    row = aug[r]
                    for c in nz:
                        row[c] -= f * prow[c]
    return [aug[r][n] for r in range(n)]


def _exact_resolve(sx: _RevisedSimplex, model: LpModel) -> ExactLp:
    nrows = sx.nrows
    N = sx.M.shape[1]
    Mf = [[Fraction(float(v)) for v in row] for row in sx.M]
    c = list(model.c_exact) + [Fraction(0)] * (N - sx.nv)
    basis = [int(j) for j in sx.basis]
    basic = set(basis)
    xN = {}
    for j in range(N):
        if j in basic:
            continue
        v = sx.x[j]
        # snap nonbasic values onto their bound
        if np.isfinite(sx.lb[j]) and abs(v - sx.lb[j]) <= 1e-7:
            xN[j] = Fraction(float(sx.lb[j]))
        elif np.isfinite(sx.ub[j]) and abs(v - sx.ub[j]) <= 1e-7:
            xN[j] = Fraction(float(sx.ub[j]))
        else:
            xN[j] = Fraction(0)
    b = [Fraction(float(v)) for v in sx.b]
    rhs = [b[i] - sum((Mf[i][j] * v for j, v in xN.items() if v and Mf[i][j]), Fraction(0)) for i in range(nrows)]
    Bm = [[Mf[i][j] for j in basis] for i in range(nrows)]
    xB = _fraction_solve(Bm, rhs) if nrows else []
    BT = [[Bm[i][r] for i in range(nrows)] for r in range(nrows)]
    y = _fraction_solve(BT, [c[j] for j in basis]) if nrows else []

    x = dict(xN)
    for r, j in enumerate(basis):
        x[j] = xB[r]
    optimal = True
    for j in range(N):
        lbj, ubj = sx.lb[j], sx.ub[j]
        if np.isfinite(lbj) and x[j] < Fraction(float(lbj)):
            optimal = False
        if np.isfinite(ubj) and x[j] > Fraction(float(ubj)):
            optimal = False
    for j in range(N):
        if j in basic or sx.lb[j] == sx.ub[j]:
            continue
        dj = c[j] - sum((y[i] * Mf[i][j] for i in range(nrows) if Mf[i][j]), Fraction(0))
        at_lb = np.isfinite(sx.lb[j]) and x[j] == Fraction(float(sx.lb[j]))
        at_ub = np.isfinite(sx.ub[j]) and x[j] == Fraction(float(sx.ub[j]))
        if (at_lb and not at_ub and dj < 0) or (at_ub and not at_lb and dj > 0) or (not at_lb and not at_ub and dj != 0):
            optimal = False
    xs = [x[j] for j in range(sx.nv)]
    obj = model.exact_objective(xs)
    return ExactLp(x=xs, duals=y, objective=obj, optimal=optimal)


def _solve_revised(model: LpModel, tol: float, iter_limit, exact: bool, record_pivots: bool) -> LpSolution:
    nz_rows = np.diff(model.A.indptr) > 0
    for i in np.flatnonzero(~nz_rows):
        s, r = model.sense[i], model.rhs[i]
        if (s == LE and r < -tol) or (s == GE and r > tol) or (s == EQ and abs(r) > tol):
            return _infeasible(model, "revised")
    if not nz_rows.all():
        keep = np.flatnonzero(nz_rows)
        reduced = LpModel(model.c, model.lb, model.ub, model.A[keep], [model.sense[i] for i in keep],
                          model.rhs[keep], model.constant, model.c_exact)
        sol = _solve_revised(reduced, tol, iter_limit, exact, record_pivots)
        duals = np.zeros(model.num_rows)
        duals[keep] = sol.duals
        sol.duals = duals
        if sol.exact is not None:
            full = [Fraction(0)] * model.num_rows
            for t, i in enumerate(keep):
                full[i] = sol.exact.duals[t]
            sol.exact.duals = full
        return sol

    sx = _RevisedSimplex(model, tol, iter_limit, record_pivots=record_pivots)
    status = sx.solve()
    nv = model.num_vars
    x = sx.x[:nv].copy()
    if status in (INFEASIBLE, UNBOUNDED):
        sol = LpSolution(status, x, np.zeros(model.num_rows), math.nan,
                         -INF if status == UNBOUNDED else INF, np.zeros(nv), sx.iterations, method="revised")
        sol.pivots = sx.pivots
        return sol
    y = sx.duals()
    d = sx.reduced_costs()[:nv]
    sol = LpSolution(status, x, y, model.objective_value(x), lagrangian_bound(model, y), d,
                     sx.iterations, basis=tuple(int(j) for j in sx.basis), method="revised")
    sol.pivots = sx.pivots
    if exact and status == OPTIMAL:
        sol.exact = _exact_resolve(sx, model)
    return sol


def _infeasible(model: LpModel, method: str) -> LpSolution:
    return LpSolution(INFEASIBLE, np.full(model.num_vars, np.nan), np.zeros(model.num_rows), math.nan, INF,
                      np.zeros(model.num_vars), 0, method=method)


def _solve_highs(model: LpModel, tol: float, iter_limit) -> LpSolution:
    from scipy.optimize import linprog

    sense = np.array(model.sense)
    le = sense == LE
    ge = sense == GE
    eq = sense == EQ
    ub_rows = np.flatnonzero(le | ge)
    A_ub = model.A[ub_rows]
    b_ub = model.rhs[ub_rows].copy()
    flip = ge[ub_rows]
    if flip.any():
        scale = sp.diags(np.where(flip, -1.0, 1.0))
        A_ub = scale @ A_ub
        b_ub = np.where(flip, -b_ub, b_ub)
    eq_rows = np.flatnonzero(eq)
    bounds = [(None if not np.isfinite(l) else l, None if not np.isfinite(u) else u)
              for l, u in zip(model.lb, model.ub)]
    options = {"primal_feasibility_tolerance": max(tol, 1e-10), "dual_feasibility_tolerance": max(tol, 1e-10)}
    if iter_limit is not None:
        options["maxiter"] = int(iter_limit)
    res = linprog(model.c, A_ub=A_ub if len(ub_rows) else None, b_ub=b_ub if len(ub_rows) else None,
                  A_eq=model.A[eq_rows] if len(eq_rows) else None, b_eq=model.rhs[eq_rows] if len(eq_rows) else None,
                  bounds=bounds, method="highs", options=options)
    status = {0: OPTIMAL, 1: ITERATION_LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}.get(res.status, ITERATION_LIMIT)
    if status in (INFEASIBLE, UNBOUNDED) or res.x is None:
        sol = _infeasible(model, "highs")
        sol.status = status
        if status == UNBOUNDED:
            sol.dual_bound = -INF
        return sol
    y = np.zeros(model.num_rows)
    if len(ub_rows):
        marg = np.asarray(res.ineqlin.marginals)
        y[ub_rows] = np.where(flip, -marg, marg)
    if len(eq_rows):
        y[eq_rows] = np.asarray(res.eqlin.marginals)
    d = np.asarray(res.lower.marginals) + np.asarray(res.upper.marginals)
    x = np.asarray(res.x, dtype=float)
    return LpSolution(status, x, y, model.objective_value(x), lagrangian_bound(model, y), d,
                      int(getattr(res, "nit", 0)), method="highs")


def _solve_barrier(model: LpModel, tol: float, iter_limit) -> LpSolution:
    """HiGHS interior point without crossover: the point and duals stay inside the optimal face."""
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("solver", "ipm")
    h.setOptionValue("run_crossover", "off")
    h.setOptionValue("presolve", "off")
    h.setOptionValue("ipm_optimality_tolerance", max(tol, 1e-10))
    if iter_limit is not None:
        h.setOptionValue("ipm_iteration_limit", int(iter_limit))
    lp = highspy.HighsLp()
    lp.num_col_ = model.num_vars
    lp.num_row_ = model.num_rows
    lp.col_cost_ = model.c
    lp.col_lower_ = np.where(np.isfinite(model.lb), model.lb, -highspy.kHighsInf)
    lp.col_upper_ = np.where(np.isfinite(model.ub), model.ub, highspy.kHighsInf)
    sense = np.array(model.sense)
    lp.row_lower_ = np.where(sense == LE, -highspy.kHighsInf, model.rhs)
    lp.row_upper_ = np.where(sense == GE, highspy.kHighsInf, model.rhs)
    A = model.A.tocsc()
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = A.indptr
    lp.a_matrix_.index_ = A.indices
    lp.a_matrix_.value_ = A.data
    lp.offset_ = float(model.constant)
    h.passModel(lp)
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        # without crossover the interior point may not classify infeasible or stalled models
        return _solve_highs(model, tol, iter_limit)
    res = h.getSolution()
    x = np.array(res.col_value, dtype=float)
    y = np.array(res.row_dual, dtype=float)
    d = model.c - model.A.T @ y
    return LpSolution(OPTIMAL, x, y, model.objective_value(x), lagrangian_bound(model, y, zero_tol=1e-7), d,
                      int(h.getInfo().ipm_iteration_count), method="barrier")


def solve_lp(model: LpModel, tol: float = 1e-7, iter_limit: int | None = None, method: str = "revised",
             exact: bool = False, record_pivots: bool = False) -> LpSolution:
    """
    Solve a bounded-variable LP.

    :param tol:             primal feasibility and optimality tolerance
    :param iter_limit:      pivot limit; when hit the status is ``iteration-limit``
    :param method:          ``"revised"`` (dense revised simplex), ``"highs"`` or ``"barrier"``
    :param exact:           re-solve the optimal basis in rational arithmetic
                            (revised only; meant for small models)
    :param record_pivots:   keep the (entering, leaving row) sequence on the solution

    A numerically singular basis in the revised simplex falls back to HiGHS
    unless exact duals or the pivot record were requested.
    """
    if method == "revised":
        try:
            return _solve_revised(model, tol, iter_limit, exact, record_pivots)
        except np.linalg.LinAlgError:
            # numerically singular basis; only the float answer can be recovered elsewhere
            if exact or record_pivots:
                raise
            return _solve_highs(model, tol, iter_limit)
    if method == "barrier":
        if exact:
            raise ValueError("exact re-solve needs the revised simplex basis")
        return _solve_barrier(model, tol, iter_limit)
    if method == "highs":
        if exact:
            raise ValueError("exact re-solve needs the revised simplex basis")
        return _solve_highs(model, tol, iter_limit)
    raise ValueError(f"unknown LP method {method!r}")
