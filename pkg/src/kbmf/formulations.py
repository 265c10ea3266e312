"""
Model builders: compact formulation, master problems over a column pool,
the pricing integer program and the explicit exponential formulation.

Every builder accepts a plain :class:`BinaryMatrix` or a reduced
:class:`WeightedBinaryMatrix`; in the latter case cell (i, j) carries weight
``r_i * c_j``. Missing cells never enter a model. Variables are laid out in
row-major order so that solves are reproducible. Index maps for reading
solutions back are stored in ``model.meta``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .lp import EQ, GE, LE, INF, LpBuilder, LpModel, LpSolution
from .matrix import BinaryMatrix, Factorisation, Rank1Pattern
from .milp import MilpModel
from .objective import ObjectiveSpec
from .preprocess import WeightedBinaryMatrix

MasterMode = ObjectiveSpec

MAX_EXPONENTIAL_M = 12


class ColumnPool:
    """Ordered set of distinct nonzero rank-1 patterns."""

    def __init__(self, patterns: Iterable[Rank1Pattern] = ()):
        self._patterns: list[Rank1Pattern] = []
        self._index: dict[bytes, int] = {}
        for p in patterns:
            self.add(p)

    def add(self, pattern: Rank1Pattern) -> bool:
        """Append ``pattern`` unless its support is already present. Returns whether it was added."""
        if self._patterns and pattern.shape != self._patterns[0].shape:
            raise ValueError("pattern shape does not match the pool")
        if pattern.key in self._index:
            return False
        self._index[pattern.key] = len(self._patterns)
        self._patterns.append(pattern)
        return True

    def extend(self, patterns: Iterable[Rank1Pattern]) -> int:
        return sum(self.add(p) for p in patterns)

    def index(self, pattern: Rank1Pattern) -> int:
        return self._index[pattern.key]

    def __contains__(self, pattern) -> bool:
        return isinstance(pattern, Rank1Pattern) and pattern.key in self._index

    def __len__(self) -> int:
        return len(self._patterns)

    def __iter__(self) -> Iterator[Rank1Pattern]:
        return iter(self._patterns)

    def __getitem__(self, i) -> Rank1Pattern:
        return self._patterns[i]

    @property
    def patterns(self) -> list[Rank1Pattern]:
        return list(self._patterns)

    def copy(self) -> "ColumnPool":
        return ColumnPool(self._patterns)


def as_weighted(X) -> WeightedBinaryMatrix:
    if isinstance(X, WeightedBinaryMatrix):
        return X
    if isinstance(X, BinaryMatrix):
        return WeightedBinaryMatrix.unweighted(X)
    raise TypeError("expected a BinaryMatrix or WeightedBinaryMatrix")


def all_patterns(n: int, m: int) -> list[Rank1Pattern]:
    """Every nonzero rank-1 pattern of an n x m matrix, (2^n - 1)(2^m - 1) in total."""
    if n > 16 or m > 16:
        raise ValueError("full pattern enumeration is only meant for tiny matrices")
    rows = _nonzero_vectors(n)
    cols = _nonzero_vectors(m)
    return [Rank1Pattern(a, b) for a in rows for b in cols]


def _nonzero_vectors(n: int) -> np.ndarray:
    codes = np.arange(1, 2 ** n)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(bool)


# --------------------------------------------------------------------------
# compact formulation
# --------------------------------------------------------------------------

def build_compact(X, k: int, relaxed: bool = True) -> LpModel | MilpModel:
    """
    Compact model over a (n x k), b (k x m), y (products) and z (Boolean product).

    y_ilj lies in the McCormick envelope of (a_il, b_lj) and
    max_l y_ilj <= z_ij <= sum_l y_ilj. The objective counts uncovered ones
    and covered zeros, weighted when X is weighted. z is continuous in [0, 1]
    even in the integer model; a and b carry the integrality (b first when branching).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    wx = as_weighted(X)
    core = wx.core
    W = wx.weights
    n, m = core.shape
    lp = LpBuilder()
    a = np.array([[lp.add_var(0, 1, 0, f"a[{i},{l}]") for l in range(k)] for i in range(n)], dtype=np.int64)
    b = np.array([[lp.add_var(0, 1, 0, f"b[{l},{j}]") for j in range(m)] for l in range(k)], dtype=np.int64)
    y = np.full((n, k, m), -1, dtype=np.int64)
    z = np.full((n, m), -1, dtype=np.int64)
    for i in range(n):
        for j in range(m):
            if core.missing[i, j]:
                continue
            for l in range(k):
                y[i, l, j] = lp.add_var(0, 1, 0, f"y[{i},{l},{j}]")
    for i in range(n):
        for j in range(m):
            if core.missing[i, j]:
                continue
            w = int(W[i, j])
            if core.ones[i, j]:
                z[i, j] = lp.add_var(0, 1, -w, f"z[{i},{j}]")
                lp.constant += w
            else:
                z[i, j] = lp.add_var(0, 1, w, f"z[{i},{j}]")
    for i in range(n):
        for j in range(m):
            if z[i, j] < 0:
                continue
            for l in range(k):
                v = y[i, l, j]
                lp.add_row({v: 1, a[i, l]: -1}, LE, 0)
                lp.add_row({v: 1, b[l, j]: -1}, LE, 0)
                lp.add_row({v: 1, a[i, l]: -1, b[l, j]: -1}, GE, -1)
                lp.add_row({v: 1, z[i, j]: -1}, LE, 0)
            row = {z[i, j]: 1}
            row.update({y[i, l, j]: -1 for l in range(k)})
            lp.add_row(row, LE, 0)
    meta = {"kind": "compact", "k": k, "shape": (n, m), "a": a, "b": b, "y": y, "z": z}
    model = lp.build(meta)
    if relaxed:
        return model
    return MilpModel(model, np.concatenate([b.ravel(), a.ravel()]),
                     priority=[b.ravel(), a.ravel()], integral_objective=True)


def compact_factorisation(model: LpModel | MilpModel, x) -> Factorisation:
    """Read (A, B) from an integral compact solution."""
    meta = model.meta
    x = np.asarray(x)
    A = np.round(x[meta["a"]]).astype(bool)
    B = np.round(x[meta["b"]]).astype(bool)
    return Factorisation(A, B)


def compact_point(model: LpModel | MilpModel, f: Factorisation) -> np.ndarray:
    """Feasible compact solution encoding a factorisation, usable as a warm start."""
    meta = model.meta
    base = model.base if isinstance(model, MilpModel) else model
    x = np.zeros(base.num_vars)
    A = f.A.astype(float)
    B = f.B.astype(float)
    x[meta["a"]] = A
    x[meta["b"]] = B
    y, z = meta["y"], meta["z"]
    n, k, m = y.shape
    for i in range(n):
        for j in range(m):
            if z[i, j] < 0:
                continue
            prods = A[i] * B[:, j]
            x[y[i, :, j]] = prods
            x[z[i, j]] = float(prods.max(initial=0.0))
    return x


# --------------------------------------------------------------------------
# master problems
# --------------------------------------------------------------------------

def build_master(X, k: int, mode: MasterMode, pool: ColumnPool | Iterable[Rank1Pattern],
                 relaxed: bool = True) -> LpModel | MilpModel:
    """
    Master problem over the patterns in ``pool``.

    Frobenius mode: variables q_r and z_ij (every known cell) with
    z_ij <= sum of q over patterns covering (i, j) on ones, that sum <= k z_ij on
    zeros, and sum q <= k. Objective: weighted uncovered ones plus covered zeros.

    Rho mode: variables q_r and xi_ij (ones only) with
    sum of covering q + xi_ij >= 1 on ones and sum q <= k. Objective: weighted xi
    plus rho times the weighted number of times each zero is covered.

    In the relaxation q has no upper bound; q > 1 never helps, and leaving it
    unbounded keeps the pricing bound exact.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not isinstance(mode, ObjectiveSpec):
        raise TypeError("mode must be a MasterMode")
    pool = pool if isinstance(pool, ColumnPool) else ColumnPool(pool)
    wx = as_weighted(X)
    core = wx.core
    W = wx.weights
    n, m = core.shape
    for p in pool:
        if p.shape != (n, m):
            raise ValueError("pattern shape does not match the matrix")
    rho = mode.rho
    frob = mode.mode == "frobenius"

    lp = LpBuilder()
    q_ub = INF if relaxed else 1
    q = np.empty(len(pool), dtype=np.int64)
    for t, p in enumerate(pool):
        cost = Fraction(0)
        if not frob:
            sup = np.outer(p.a, p.b) & core.zeros
            cost = rho * int(W[sup].sum())
        q[t] = lp.add_var(0, q_ub, cost, f"q[{t}]")

    cell = np.full((n, m), -1, dtype=np.int64)
    for i in range(n):
        for j in range(m):
            w = int(W[i, j])
            if core.ones[i, j]:
                if frob:
                    cell[i, j] = lp.add_var(0, 1, -w, f"z[{i},{j}]")
                    lp.constant += w
                else:
                    cell[i, j] = lp.add_var(0, INF if relaxed else 1, w, f"xi[{i},{j}]")
            elif core.zeros[i, j] and frob:
                cell[i, j] = lp.add_var(0, INF if relaxed else 1, w, f"z[{i},{j}]")

    # cover lists: which pool members cover each cell
    covers: dict[tuple[int, int], list[int]] = {}
    for t, p in enumerate(pool):
        for i in np.flatnonzero(p.a):
            for j in np.flatnonzero(p.b):
                covers.setdefault((int(i), int(j)), []).append(int(q[t]))

    row_one = np.full((n, m), -1, dtype=np.int64)
    row_zero = np.full((n, m), -1, dtype=np.int64)
    for i in range(n):
        for j in range(m):
            cov = covers.get((i, j), [])
            if core.ones[i, j]:
                if frob:
                    row = {cell[i, j]: 1}
                    row.update({v: -1 for v in cov})
                    row_one[i, j] = lp.add_row(row, LE, 0, f"one[{i},{j}]")
                else:
                    row = {v: 1 for v in cov}
                    row[cell[i, j]] = 1
                    row_one[i, j] = lp.add_row(row, GE, 1, f"one[{i},{j}]")
            elif core.zeros[i, j] and frob:
                row = {v: 1 for v in cov}
                row[cell[i, j]] = -k
                row_zero[i, j] = lp.add_row(row, LE, 0, f"zero[{i},{j}]")
    row_card = lp.add_row({int(v): 1 for v in q}, LE, k, "card")

    meta = {"kind": "master", "mode": mode, "k": k, "shape": (n, m), "q": q, "cell": cell,
            "row_one": row_one, "row_zero": row_zero, "row_card": row_card,
            "pool": pool, "weights": W, "core": core}
    model = lp.build(meta)
    if relaxed:
        return model
    integer = np.concatenate([q, cell[cell >= 0]])
    return MilpModel(model, integer, integral_objective=master_objective_integral(mode))


def master_objective_integral(mode: MasterMode) -> bool:
    """Whether every integer master solution has an integral objective (weights are integers)."""
    return mode.mode == "frobenius" or mode.rho.denominator == 1


def pricing_matrix(model: LpModel | MilpModel, duals) -> tuple[np.ndarray, object]:
    """
    Pricing matrix H and the cardinality dual mu from master-LP shadow prices.

    Frobenius: h = p on ones, -s on zeros, where p and s are the (sign-flipped)
    duals of the covering and coupling rows. Rho: h = p on ones, -rho w on zeros.
    Missing cells are 0. The reduced cost of pattern (a, b) is mu - a^T H b.
    Exact (Fraction) duals give an object array of Fractions.
    """
    meta = model.meta
    n, m = meta["shape"]
    mode: ObjectiveSpec = meta["mode"]
    exact = len(duals) > 0 and isinstance(duals[0], Fraction)
    if exact:
        H = np.full((n, m), Fraction(0), dtype=object)
    else:
        H = np.zeros((n, m))
        duals = np.asarray(duals, dtype=float)
    row_one, row_zero, W, core = meta["row_one"], meta["row_zero"], meta["weights"], meta["core"]
    for i in range(n):
        for j in range(m):
            if core.ones[i, j]:
                y = duals[row_one[i, j]]
                H[i, j] = -y if mode.mode == "frobenius" else y
            elif core.zeros[i, j]:
                if mode.mode == "frobenius":
                    H[i, j] = duals[row_zero[i, j]]
                else:
                    H[i, j] = -mode.rho * int(W[i, j]) if exact else -float(mode.rho) * float(W[i, j])
    mu = -duals[meta["row_card"]]
    return H, mu


def master_selection(model: LpModel | MilpModel, x) -> list[int]:
    """Pool indices with q_r = 1 in an integral master solution."""
    q = model.meta["q"]
    x = np.asarray(x)
    return [t for t, v in enumerate(q) if x[v] > 0.5]


def master_point(model: LpModel | MilpModel, selected: Iterable[int]) -> np.ndarray:
    """Integral master solution choosing the given pool members, with optimal z / xi."""
    meta = model.meta
    base = model.base if isinstance(model, MilpModel) else model
    pool, core, cell, k = meta["pool"], meta["core"], meta["cell"], meta["k"]
    selected = list(selected)
    if len(selected) > k:
        raise ValueError("more patterns than k")
    x = np.zeros(base.num_vars)
    n, m = meta["shape"]
    count = np.zeros((n, m), dtype=np.int64)
    for t in selected:
        x[meta["q"][t]] = 1.0
        count += np.outer(pool[t].a, pool[t].b)
    frob = meta["mode"].mode == "frobenius"
    for i in range(n):
        for j in range(m):
            v = cell[i, j]
            if v < 0:
                continue
            if core.ones[i, j]:
                x[v] = float(count[i, j] > 0) if frob else float(count[i, j] == 0)
            else:
                x[v] = float(count[i, j] > 0)
    return x


# --------------------------------------------------------------------------
# pricing integer program
# --------------------------------------------------------------------------

def build_pricing_ip(H, warm: Rank1Pattern | None = None) -> MilpModel:
    """
    Maximise sum h_ij y_ij over binary a, b with y_ij in the McCormick envelope of (a_i, b_j).

    Stated as a minimisation of -sum h_ij y_ij. Cells with h_ij = 0 get no y.
    The empty pattern is feasible, so the optimum is never below 0.
    """
    H = np.asarray(H, dtype=float)
    if not np.all(np.isfinite(H)):
        raise ValueError("H must be finite")
    n, m = H.shape
    lp = LpBuilder()
    a = np.array([lp.add_var(0, 1, 0, f"a[{i}]") for i in range(n)], dtype=np.int64)
    b = np.array([lp.add_var(0, 1, 0, f"b[{j}]") for j in range(m)], dtype=np.int64)
    y = np.full((n, m), -1, dtype=np.int64)
    for i in range(n):
        for j in range(m):
            if H[i, j] != 0:
                y[i, j] = lp.add_var(0, 1, Fraction(-float(H[i, j])), f"y[{i},{j}]")
    for i in range(n):
        for j in range(m):
            v = y[i, j]
            if v < 0:
                continue
            lp.add_row({v: 1, a[i]: -1}, LE, 0)
            lp.add_row({v: 1, b[j]: -1}, LE, 0)
            lp.add_row({v: 1, a[i]: -1, b[j]: -1}, GE, -1)
    model = lp.build({"kind": "pricing", "a": a, "b": b, "y": y, "shape": (n, m)})
    warm_x = None
    if warm is not None:
        warm_x = pricing_point(model, warm.a, warm.b)
    return MilpModel(model, np.concatenate([a, b]), warm_start=warm_x)


def pricing_point(model: LpModel | MilpModel, a, b) -> np.ndarray:
    meta = model.meta
    base = model.base if isinstance(model, MilpModel) else model
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.zeros(base.num_vars)
    x[meta["a"]] = a
    x[meta["b"]] = b
    y = meta["y"]
    mask = y >= 0
    x[y[mask]] = np.outer(a, b)[mask]
    return x


def pricing_solution(model: LpModel | MilpModel, x) -> tuple[np.ndarray, np.ndarray]:
    meta = model.meta
    x = np.asarray(x)
    return np.round(x[meta["a"]]).astype(bool), np.round(x[meta["b"]]).astype(bool)


# --------------------------------------------------------------------------
# explicit exponential formulation
# --------------------------------------------------------------------------

def build_exponential(X, k: int, relaxed: bool = True) -> LpModel | MilpModel:
    """
    Explicit formulation with one indicator d_t per nonzero column-pattern beta_t
    and row-assignment variables alpha_it <= d_t.

    Constraints: z_ij <= sum_t alpha_it beta_tj on ones, sum_t alpha_it beta_tj
    <= k z_ij on zeros, sum_t d_t <= k. Only meant for m <= 12.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    wx = as_weighted(X)
    core = wx.core
    W = wx.weights
    n, m = core.shape
    if m > MAX_EXPONENTIAL_M:
        raise ValueError(f"explicit formulation enumerates 2^m - 1 patterns; m = {m} exceeds {MAX_EXPONENTIAL_M}")
    betas = _nonzero_vectors(m)
    T = len(betas)
    lp = LpBuilder()
    ub = INF if relaxed else 1
    d = np.array([lp.add_var(0, ub, 0, f"d[{t}]") for t in range(T)], dtype=np.int64)
    alpha = np.array([[lp.add_var(0, ub, 0, f"alpha[{i},{t}]") for t in range(T)] for i in range(n)],
                     dtype=np.int64)
    z = np.full((n, m), -1, dtype=np.int64)
    for i in range(n):
        for j in range(m):
            w = int(W[i, j])
            if core.ones[i, j]:
                z[i, j] = lp.add_var(0, 1, -w, f"z[{i},{j}]")
                lp.constant += w
            elif core.zeros[i, j]:
                z[i, j] = lp.add_var(0, ub, w, f"z[{i},{j}]")
    for i in range(n):
        for j in range(m):
            if z[i, j] < 0:
                continue
            ts = np.flatnonzero(betas[:, j])
            if core.ones[i, j]:
                row = {z[i, j]: 1}
                row.update({alpha[i, t]: -1 for t in ts})
                lp.add_row(row, LE, 0)
            else:
                row = {alpha[i, t]: 1 for t in ts}
                row[z[i, j]] = -k
                lp.add_row(row, LE, 0)
    lp.add_row({int(v): 1 for v in d}, LE, k)
    for i in range(n):
        for t in range(T):
            lp.add_row({alpha[i, t]: 1, d[t]: -1}, LE, 0)
    meta = {"kind": "exponential", "k": k, "shape": (n, m), "d": d, "alpha": alpha, "z": z, "betas": betas}
    model = lp.build(meta)
    if relaxed:
        return model
    integer = np.concatenate([d, alpha.ravel(), z[z >= 0]])
    return MilpModel(model, integer, integral_objective=True)


def exponential_factorisation(model: LpModel | MilpModel, x) -> Factorisation:
    """Read (A, B) from an integral exponential-model solution; unused slots are zero factors."""
    meta = model.meta
    x = np.asarray(x)
    n, m = meta["shape"]
    k = meta["k"]
    used = [t for t, v in enumerate(meta["d"]) if x[v] > 0.5]
    A = np.zeros((n, k), dtype=bool)
    B = np.zeros((k, m), dtype=bool)
    for l, t in enumerate(used[:k]):
        A[:, l] = x[meta["alpha"][:, t]] > 0.5
        B[l] = meta["betas"][t]
    return Factorisation(A, B)
