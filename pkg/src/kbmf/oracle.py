"""
Exhaustive reference solvers for tiny instances.

These are deliberately simple and independent of the LP machinery so that
they can serve as test oracles for it.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .matrix import BinaryMatrix, Factorisation
from .objective import ObjectiveSpec
from .preprocess import WeightedBinaryMatrix

MAX_B_CANDIDATES = 200_000
MAX_BBQP_SIZE = 22
MAX_SUBSET_ONES = 24


def _unpack(X):
    if isinstance(X, WeightedBinaryMatrix):
        return X.core, X.weights, (X.row_weights, X.col_weights)
    if isinstance(X, BinaryMatrix):
        return X, np.ones(X.shape, dtype=np.int64), None
    raise TypeError("expected a BinaryMatrix or WeightedBinaryMatrix")


def kbmf_candidates(m: int, k: int) -> int:
    """Number of multisets of k rows from {0,1}^m."""
    return math.comb(2 ** m + k - 1, k)


def brute_force_kbmf(X, k: int, mode: ObjectiveSpec = ObjectiveSpec()) -> tuple[Fraction, Factorisation]:
    """
    Exact minimum of the chosen objective over all rank-k binary factorisations.

    Enumerates B as a sorted multiset of k rows of {0,1}^m over the smaller
    dimension (row order is irrelevant); for fixed B each row of A is chosen
    independently among the 2^k subsets of B's rows.

    :return: (optimal value, one optimal factorisation)
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    core, W, weights = _unpack(X)
    ones, zeros = core.ones, core.zeros
    transposed = core.m > core.n
    if transposed:
        ones, zeros, W = ones.T, zeros.T, W.T
    n, m = ones.shape
    count = kbmf_candidates(m, k)
    if count > MAX_B_CANDIDATES:
        raise ValueError(f"{count} candidate factors exceed the enumeration guard of {MAX_B_CANDIDATES}")

    rho = mode.rho
    rho_mode = mode.mode == "rho"
    W1 = np.where(ones, W, 0).astype(np.int64)  # n x m
    W0 = np.where(zeros, W, 0).astype(np.int64)
    vectors = ((np.arange(2 ** m)[:, None] >> np.arange(m)) & 1).astype(np.int64)
    S = ((np.arange(2 ** k)[:, None] >> np.arange(k)) & 1).astype(np.int64)  # 2^k x k

    best_key = None
    best = None
    combos = itertools.combinations_with_replacement(range(2 ** m), k)
    batch = max(1, 4_000_000 // max(1, (2 ** k) * m * n))
    while True:
        chunk = list(itertools.islice(combos, batch))
        if not chunk:
            break
        Bs = vectors[np.array(chunk)]                           # nb x k x m
        C = np.einsum("sk,bkm->bsm", S, Bs)                     # cover counts
        uncovered = (C == 0).astype(np.int64) @ W1.T            # nb x 2^k x n
        if rho_mode:
            over = C @ W0.T
            # compare uncovered + rho * over in integers
            score = rho.denominator * uncovered + rho.numerator * over
        else:
            score = uncovered + (C > 0).astype(np.int64) @ W0.T
        choice = score.argmin(axis=1)                           # nb x n
        total = np.take_along_axis(score, choice[:, None, :], axis=1)[:, 0, :].sum(axis=1)
        t = int(total.argmin())
        if best_key is None or total[t] < best_key:
            best_key = int(total[t])
            best = (Bs[t].astype(bool), S[choice[t]].astype(bool))

    B, A = best
    f = Factorisation(B.T, A.T) if transposed else Factorisation(A, B)
    value = mode.evaluate(core, f, weights)
    return value, f


def brute_force_bbqp(H) -> tuple[float, np.ndarray, np.ndarray]:
    """
    max a^T H b over binary a, b.

    For fixed a the best b takes every column with positive (a^T H)_j, so only
    one side is enumerated.

    :return: (value, a, b)
    """
    H = np.asarray(H, dtype=float)
    n, m = H.shape
    if n + m > MAX_BBQP_SIZE:
        raise ValueError(f"n + m = {n + m} exceeds the enumeration guard of {MAX_BBQP_SIZE}")
    transposed = n > m
    G = H.T if transposed else H
    rows = ((np.arange(2 ** G.shape[0])[:, None] >> np.arange(G.shape[0])) & 1).astype(float)
    colsum = rows @ G
    vals = np.maximum(colsum, 0).sum(axis=1)
    t = int(vals.argmax())
    a = rows[t].astype(bool)
    b = colsum[t] > 0
    if transposed:
        a, b = b, a
    return float(vals[t]), a, b


def _isolation_graph(X: BinaryMatrix):
    cells = [tuple(c) for c in np.argwhere(X.ones)]
    zeros = X.zeros
    N = len(cells)
    adj = np.zeros((N, N), dtype=bool)
    for s in range(N):
        i1, j1 = cells[s]
        for t in range(s + 1, N):
            i2, j2 = cells[t]
            if i1 == i2 or j1 == j2:
                continue
            if zeros[i1, j2] or zeros[i2, j1]:
                adj[s, t] = adj[t, s] = True
    return cells, adj


def _max_clique_dfs(adj: np.ndarray) -> list[int]:
    N = len(adj)
    best: list[int] = []

    def grow(clique: list[int], cand: list[int]):
        nonlocal best
        if len(clique) > len(best):
            best = clique[:]
        for idx, v in enumerate(cand):
            if len(clique) + len(cand) - idx <= len(best):
                return
            grow(clique + [v], [u for u in cand[idx + 1:] if adj[v, u]])

    grow([], list(range(N)))
    return best


def isolated_set(X: BinaryMatrix, method: str = "auto") -> list[tuple[int, int]]:
    """
    A largest set of ones, pairwise in distinct rows and columns, such that
    every pair (i1, j1), (i2, j2) has a known zero at (i1, j2) or (i2, j1).

    ``method`` is ``"dfs"`` (exhaustive clique search), ``"networkx"`` or
    ``"auto"`` (dfs up to 24 ones).
    """
    cells, adj = _isolation_graph(X)
    if not cells:
        return []
    if method == "auto":
        method = "dfs" if len(cells) <= MAX_SUBSET_ONES else "networkx"
    if method == "dfs":
        clique = _max_clique_dfs(adj)
    elif method == "networkx":
        import networkx as nx

        G = nx.Graph()
        G.add_nodes_from(range(len(cells)))
        G.add_edges_from(zip(*np.nonzero(np.triu(adj))))
        clique, _ = nx.max_weight_clique(G, weight=None)
    else:
        raise ValueError(f"unknown method {method!r}")
    return sorted(cells[v] for v in clique)


def isolation_number(X: BinaryMatrix, method: str = "auto") -> int:
    return len(isolated_set(X, method))


def is_isolated(X: BinaryMatrix, cells) -> bool:
    cells = list(cells)
    for s, (i1, j1) in enumerate(cells):
        if not X.ones[i1, j1]:
            return False
        for i2, j2 in cells[s + 1:]:
            if i1 == i2 or j1 == j2:
                return False
            if not (X.zeros[i1, j2] or X.zeros[i2, j1]):
                return False
    return True


def boolean_rank_small(X: BinaryMatrix) -> int:
    """Least k with an exact Boolean factorisation on the known cells."""
    if not X.ones.any():
        return 0
    for k in range(1, min(X.n, X.m) + 1):
        value, _ = brute_force_kbmf(X, k)
        if value == 0:
            return k
    return min(X.n, X.m)
