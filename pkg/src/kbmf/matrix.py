"""Binary matrices with missing entries, rank-1 patterns and Boolean products."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MISSING = -1


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=bool, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """
    n x m matrix whose cells are 1, 0 or missing.

    ``ones`` marks the index set E, ``missing`` marks unknown cells; known zeros
    (the set E-bar) are everything else.
    """

    ones: np.ndarray
    missing: np.ndarray

    def __post_init__(self):
        ones = _frozen(self.ones)
        missing = _frozen(self.missing)
        if ones.ndim != 2 or ones.shape != missing.shape:
            raise ValueError("ones and missing must be 2-d arrays of equal shape")
        if ones.shape[0] < 1 or ones.shape[1] < 1:
            raise ValueError("a binary matrix needs at least one row and one column")
        if np.any(ones & missing):
            raise ValueError("a cell cannot be both 1 and missing")
        object.__setattr__(self, "ones", ones)
        object.__setattr__(self, "missing", missing)

    @classmethod
    def from_array(cls, values) -> "BinaryMatrix":
        """
        Build from an array of 0/1 values where missing cells are ``-1`` or NaN.
        """
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        missing = np.isnan(arr) | (arr == MISSING)
        known = arr[~missing]
        if not np.all((known == 0) | (known == 1)):
            raise ValueError("entries must be 0, 1 or missing")
        return cls(ones=(arr == 1) & ~missing, missing=missing)

    @property
    def shape(self) -> tuple[int, int]:
        return self.ones.shape

    @property
    def n(self) -> int:
        return self.ones.shape[0]

    @property
    def m(self) -> int:
        return self.ones.shape[1]

    @property
    def zeros(self) -> np.ndarray:
        """Known zero cells (E-bar)."""
        return ~self.ones & ~self.missing

    @property
    def known(self) -> np.ndarray:
        return ~self.missing

    @property
    def has_missing(self) -> bool:
        return bool(self.missing.any())

    def to_array(self, missing_value: int = MISSING) -> np.ndarray:
        out = self.ones.astype(np.int64)
        out[self.missing] = missing_value
        return out

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix(self.ones.T, self.missing.T)

    @property
    def T(self) -> "BinaryMatrix":
        return self.transpose()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return (self.shape == other.shape
                and np.array_equal(self.ones, other.ones)
                and np.array_equal(self.missing, other.missing))

    def __hash__(self) -> int:
        return hash((self.shape, self.ones.tobytes(), self.missing.tobytes()))

    def __repr__(self) -> str:
        rows = ["".join("?" if mi else ("1" if o else "0") for o, mi in zip(r_o, r_m))
                for r_o, r_m in zip(self.ones, self.missing)]
        return f"BinaryMatrix({self.n}x{self.m}: " + " / ".join(rows) + ")"


@dataclass(frozen=True, eq=False)
class Rank1Pattern:
    """A rank-1 binary matrix a b^T with a and b nonzero."""

    a: np.ndarray
    b: np.ndarray
    _key: bytes = field(init=False, repr=False)

    def __post_init__(self):
        a = _frozen(self.a)
        b = _frozen(self.b)
        if a.ndim != 1 or b.ndim != 1:
            raise ValueError("pattern vectors must be 1-d")
        if not a.any() or not b.any():
            raise ValueError("rank-1 patterns need nonzero a and b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "_key", np.packbits(a).tobytes() + b"|" + np.packbits(b).tobytes()
                           + len(a).to_bytes(4, "little"))

    @classmethod
    def from_rows_cols(cls, n: int, m: int, rows: Iterable[int], cols: Iterable[int]) -> "Rank1Pattern":
        a = np.zeros(n, dtype=bool)
        b = np.zeros(m, dtype=bool)
        a[list(rows)] = True
        b[list(cols)] = True
        return cls(a, b)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.a), len(self.b)

    @property
    def key(self) -> bytes:
        """Hashable identity of the support."""
        return self._key

    def support(self) -> np.ndarray:
        return np.outer(self.a, self.b)

    def covers(self, i: int, j: int) -> bool:
        return bool(self.a[i] and self.b[j])

    def value(self, H) -> float:
        """a^T H b."""
        H = np.asarray(H)
        return H[np.ix_(self.a, self.b)].sum()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Rank1Pattern):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return (f"Rank1Pattern(rows={np.flatnonzero(self.a).tolist()}, "
                f"cols={np.flatnonzero(self.b).tolist()})")


@dataclass(frozen=True, eq=False)
class Factorisation:
    """Binary factors A (n x k) and B (k x m)."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A)
        B = np.asarray(self.B)
        if A.ndim != 2 or B.ndim != 2:
            raise ValueError("A and B must be 2-d")
        if A.shape[1] != B.shape[0]:
            raise ValueError(f"inner dimensions differ: A is {A.shape}, B is {B.shape}")
        if A.shape[1] < 1:
            raise ValueError("rank bound k must be positive")
        for name, M in (("A", A), ("B", B)):
            if not np.all((M == 0) | (M == 1)):
                raise ValueError(f"{name} must be binary")
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "B", _frozen(B))

    @property
    def k(self) -> int:
        return self.A.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape[0], self.B.shape[1]

    def patterns(self) -> list[Rank1Pattern]:
        """Nonzero rank-1 components, in factor order."""
        out = []
        for ell in range(self.k):
            a, b = self.A[:, ell], self.B[ell, :]
            if a.any() and b.any():
                out.append(Rank1Pattern(a, b))
        return out

    def cover_counts(self) -> np.ndarray:
        """Number of rank-1 components covering each cell, sum_l a_il b_lj."""
        return self.A.astype(np.int64) @ self.B.astype(np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Factorisation):
            return NotImplemented
        return np.array_equal(self.A, other.A) and np.array_equal(self.B, other.B)

    __hash__ = None


def boolean_product(f: Factorisation) -> BinaryMatrix:
    """Z = A o B, z_ij = OR_l (a_il AND b_lj)."""
    Z = f.cover_counts() > 0
    return BinaryMatrix(Z, np.zeros_like(Z))


def patterns_to_factorisation(pool: Sequence[Rank1Pattern], selected: Iterable[int], k: int,
                              shape: tuple[int, int] | None = None) -> Factorisation:
    """
    Stack the selected patterns as columns of A / rows of B, padding with zero
    factors up to rank k. ``shape`` is only needed when the pool is empty.
    """
    selected = list(selected)
    if len(selected) > k:
        raise ValueError(f"{len(selected)} patterns selected but k={k}")
    for s in selected:
        if not 0 <= s < len(pool):
            raise IndexError(f"selection index {s} outside pool of size {len(pool)}")
    if shape is None:
        if not pool:
            raise ValueError("cannot infer matrix shape from an empty pool")
        shape = pool[0].shape
    n, m = shape
    A = np.zeros((n, k), dtype=bool)
    B = np.zeros((k, m), dtype=bool)
    for ell, s in enumerate(selected):
        A[:, ell] = pool[s].a
        B[ell, :] = pool[s].b
    return Factorisation(A, B)


def zero_factorisation(n: int, m: int, k: int) -> Factorisation:
    return Factorisation(np.zeros((n, k), dtype=bool), np.zeros((k, m), dtype=bool))


def covers_count(pool: Sequence[Rank1Pattern], selected: Iterable[int], cell: tuple[int, int]) -> int:
    i, j = cell
    return sum(1 for s in selected if pool[s].covers(i, j))
