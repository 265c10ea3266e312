"""
Zero row/column removal and duplicate folding with multiplicity weights.

A reduced instance keeps one representative per distinct row and column; the
objective on the reduced core is weighted by ``r_i * c_j`` so that it equals
the objective of the expanded solution on the original matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import BinaryMatrix, Factorisation


@dataclass(frozen=True, eq=False)
class WeightedBinaryMatrix:
    """
    Reduced matrix with integer multiplicities.

    :param core:              the reduced matrix X'
    :param row_weights:       r, number of original rows folded into each core row
    :param col_weights:       c, number of original columns folded into each core column
    :param row_map:           original row -> core row, -1 for dropped all-zero rows
    :param col_map:           original column -> core column, -1 for dropped columns
    :param dropped_missing:   missing cells of the original that lie in dropped rows/columns
    """

    core: BinaryMatrix
    row_weights: np.ndarray
    col_weights: np.ndarray
    row_map: np.ndarray
    col_map: np.ndarray
    dropped_missing: np.ndarray

    def __post_init__(self):
        n, m = self.core.shape
        r = np.asarray(self.row_weights, dtype=np.int64)
        c = np.asarray(self.col_weights, dtype=np.int64)
        if r.shape != (n,) or c.shape != (m,):
            raise ValueError("weight vectors do not match the core shape")
        if np.any(r < 1) or np.any(c < 1):
            raise ValueError("weights must be positive integers")
        for name, arr in (("row_weights", r), ("col_weights", c),
                          ("row_map", np.asarray(self.row_map, dtype=np.int64)),
                          ("col_map", np.asarray(self.col_map, dtype=np.int64))):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        dm = np.array(self.dropped_missing, dtype=bool)
        dm.setflags(write=False)
        object.__setattr__(self, "dropped_missing", dm)

    @classmethod
    def unweighted(cls, X: BinaryMatrix) -> "WeightedBinaryMatrix":
        """Wrap X with unit weights and identity maps."""
        return cls(X, np.ones(X.n, dtype=np.int64), np.ones(X.m, dtype=np.int64),
                   np.arange(X.n), np.arange(X.m), np.zeros(X.shape, dtype=bool))

    @property
    def original_shape(self) -> tuple[int, int]:
        return len(self.row_map), len(self.col_map)

    @property
    def weights(self) -> np.ndarray:
        """n' x m' integer matrix w_ij = r_i c_j."""
        return np.outer(self.row_weights, self.col_weights)

    @property
    def is_unit(self) -> bool:
        return bool(np.all(self.row_weights == 1) and np.all(self.col_weights == 1))

    def original(self) -> BinaryMatrix:
        """Rebuild the unreduced matrix from the core and the maps."""
        N, M = self.original_shape
        ones = np.zeros((N, M), dtype=bool)
        missing = self.dropped_missing.copy()
        rows = np.flatnonzero(self.row_map >= 0)
        cols = np.flatnonzero(self.col_map >= 0)
        sub = np.ix_(rows, cols)
        core_sub = np.ix_(self.row_map[rows], self.col_map[cols])
        ones[sub] = self.core.ones[core_sub]
        missing[sub] = self.core.missing[core_sub]
        return BinaryMatrix(ones, missing)


def _cell_codes(X: BinaryMatrix) -> np.ndarray:
    # 0 = known zero, 1 = one, 2 = missing
    return X.ones.astype(np.int8) + 2 * X.missing.astype(np.int8)


def _fold_rows(codes: np.ndarray):
    """
    Keep first occurrences of distinct rows that contain at least one 1.

    Returns (kept original indices, map original -> kept position or -1, counts).
    """
    seen: dict[bytes, int] = {}
    kept: list[int] = []
    counts: list[int] = []
    mapping = np.full(codes.shape[0], -1, dtype=np.int64)
    for i, row in enumerate(codes):
        if not np.any(row == 1):
            continue
        key = row.tobytes()
        pos = seen.get(key)
        if pos is None:
            pos = len(kept)
            seen[key] = pos
            kept.append(i)
            counts.append(0)
        mapping[i] = pos
        counts[pos] += 1
    return np.array(kept, dtype=np.int64), mapping, np.array(counts, dtype=np.int64)


def reduce(X: BinaryMatrix) -> WeightedBinaryMatrix:
    """
    Drop rows/columns without known ones and fold identical rows/columns.

    A missing cell counts as a third symbol, so rows that differ only in which
    cells are unknown are not merged. The passes repeat until nothing changes,
    since dropping a column can make two rows identical.
    """
    if not X.known.any():
        raise ValueError("every cell is missing; no objective is defined")
    if not X.ones.any():
        raise ValueError("matrix has no ones; the zero factorisation is optimal and nothing remains to reduce")

    codes = _cell_codes(X)
    row_map = np.arange(X.n)
    col_map = np.arange(X.m)
    row_w = np.ones(X.n, dtype=np.int64)
    col_w = np.ones(X.m, dtype=np.int64)

    while True:
        kept_r, map_r, cnt_r = _fold_rows(codes)
        # weights of folded rows add up
        new_row_w = np.zeros(len(kept_r), dtype=np.int64)
        np.add.at(new_row_w, map_r[map_r >= 0], row_w[map_r >= 0])
        codes = codes[kept_r]
        row_map = np.where(row_map >= 0, map_r[np.maximum(row_map, 0)], -1)
        row_w = new_row_w

        kept_c, map_c, cnt_c = _fold_rows(codes.T)
        new_col_w = np.zeros(len(kept_c), dtype=np.int64)
        np.add.at(new_col_w, map_c[map_c >= 0], col_w[map_c >= 0])
        codes = codes[:, kept_c]
        col_map = np.where(col_map >= 0, map_c[np.maximum(col_map, 0)], -1)
        col_w = new_col_w

        if np.all(cnt_r == 1) and np.all(cnt_c == 1) and len(kept_r) == len(map_r) and len(kept_c) == len(map_c):
            break

    core = BinaryMatrix(codes == 1, codes == 2)
    dropped = X.missing.copy()
    dropped[np.ix_(row_map >= 0, col_map >= 0)] = False
    return WeightedBinaryMatrix(core, row_w, col_w, row_map, col_map, dropped)


def expand(w: WeightedBinaryMatrix, f: Factorisation) -> Factorisation:
    """
    Lift a factorisation of the reduced core back to the original shape.

    Folded rows of A (columns of B) are copied from their representative;
    dropped rows and columns get zero factors.
    """
    n, m = w.core.shape
    if f.shape != (n, m):
        raise ValueError(f"factorisation shape {f.shape} does not match core shape {(n, m)}")
    k = f.k
    A = np.zeros((len(w.row_map), k), dtype=bool)
    B = np.zeros((k, len(w.col_map)), dtype=bool)
    rows = w.row_map >= 0
    cols = w.col_map >= 0
    A[rows] = f.A[w.row_map[rows]]
    B[:, cols] = f.B[:, w.col_map[cols]]
    return Factorisation(A, B)


def restrict(w: WeightedBinaryMatrix, f: Factorisation) -> Factorisation:
    """
    Project a factorisation of the original matrix onto the core by taking the
    first original row (column) folded into each core row (column).
    """
    if f.shape != w.original_shape:
        raise ValueError(f"factorisation shape {f.shape} does not match original shape {w.original_shape}")
    n, m = w.core.shape
    rep_r = np.array([np.flatnonzero(w.row_map == i)[0] for i in range(n)], dtype=np.int64)
    rep_c = np.array([np.flatnonzero(w.col_map == j)[0] for j in range(m)], dtype=np.int64)
    return Factorisation(f.A[rep_r], f.B[:, rep_c])
