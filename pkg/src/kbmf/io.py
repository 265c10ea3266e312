"""
Instance input/output and construction.

Matrix text format::

    n m [weighted]
    <n lines of m characters from 0, 1, ?>
    [row weights, n integers]      (weighted files only)
    [column weights, m integers]   (weighted files only)
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .matrix import BinaryMatrix, Factorisation, boolean_product
from .preprocess import WeightedBinaryMatrix

_CHARS = {"0": 0, "1": 1, "?": -1}


# --------------------------------------------------------------------------
# matrix files
# --------------------------------------------------------------------------

def format_matrix(X: BinaryMatrix | WeightedBinaryMatrix) -> str:
    weighted = isinstance(X, WeightedBinaryMatrix)
    core = X.core if weighted else X
    lines = [f"{core.n} {core.m}" + (" weighted" if weighted else "")]
    for r_o, r_m in zip(core.ones, core.missing):
        lines.append("".join("?" if mi else ("1" if o else "0") for o, mi in zip(r_o, r_m)))
    if weighted:
        lines.append(" ".join(str(int(v)) for v in X.row_weights))
        lines.append(" ".join(str(int(v)) for v in X.col_weights))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> BinaryMatrix | WeightedBinaryMatrix:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) not in (2, 3) or (len(head) == 3 and head[2] != "weighted"):
        raise ValueError(f"malformed header {lines[0]!r}; expected 'n m [weighted]'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ValueError(f"malformed header {lines[0]!r}") from None
    if n < 1 or m < 1:
        raise ValueError("matrix dimensions must be positive")
    weighted = len(head) == 3
    expected = 1 + n + (2 if weighted else 0)
    if len(lines) != expected:
        raise ValueError(f"expected {expected} non-empty lines, found {len(lines)}")
    vals = np.zeros((n, m), dtype=np.int64)
    for i, row in enumerate(lines[1:n + 1]):
        row = row.replace(" ", "")
        if len(row) != m:
            raise ValueError(f"row {i} has {len(row)} cells, expected {m}")
        for j, ch in enumerate(row):
            if ch not in _CHARS:
                raise ValueError(f"illegal character {ch!r} in row {i}")
            vals[i, j] = _CHARS[ch]
    X = BinaryMatrix(vals == 1, vals == -1)
    if not weighted:
        return X
    try:
        r = [int(v) for v in lines[n + 1].split()]
        c = [int(v) for v in lines[n + 2].split()]
    except ValueError:
        raise ValueError("weights must be integers") from None
    if len(r) != n or len(c) != m:
        raise ValueError("weight line lengths do not match the matrix")
    return _weighted_from(X, r, c)


def _weighted_from(core: BinaryMatrix, r, c) -> WeightedBinaryMatrix:
    """Weighted matrix whose original is the core with rows/columns repeated by weight."""
    r = np.asarray(r, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    if np.any(r < 1) or np.any(c < 1):
        raise ValueError("weights must be positive")
    row_map = np.repeat(np.arange(core.n), r)
    col_map = np.repeat(np.arange(core.m), c)
    return WeightedBinaryMatrix(core, r, c, row_map, col_map, np.zeros((len(row_map), len(col_map)), dtype=bool))


def write_matrix(path, X: BinaryMatrix | WeightedBinaryMatrix) -> None:
    Path(path).write_text(format_matrix(X))


def read_matrix(path) -> BinaryMatrix | WeightedBinaryMatrix:
    return parse_matrix(Path(path).read_text())


def write_factors(prefix, f: Factorisation) -> tuple[str, str]:
    """Write A and B as matrix files ``<prefix>_A.txt`` and ``<prefix>_B.txt``."""
    pa, pb = f"{prefix}_A.txt", f"{prefix}_B.txt"
    write_matrix(pa, BinaryMatrix(f.A, np.zeros_like(f.A)))
    write_matrix(pb, BinaryMatrix(f.B, np.zeros_like(f.B)))
    return pa, pb


def read_factors(prefix) -> Factorisation:
    A = read_matrix(f"{prefix}_A.txt")
    B = read_matrix(f"{prefix}_B.txt")
    return Factorisation(A.ones, B.ones)


# --------------------------------------------------------------------------
# synthetic instances
# --------------------------------------------------------------------------

def zero_probability(kappa: int, sigma_pct: float) -> float:
    """Entry-wise zero probability of the factors that gives about sigma% zeros in X."""
    return 1 - math.sqrt(1 - (sigma_pct / 100) ** (1 / kappa))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class SyntheticInstance:
    """X together with the planted factors and the clean product."""

    X: BinaryMatrix
    factors: Factorisation
    clean: BinaryMatrix


def generate_synthetic_instance(n: int, m: int, kappa: int, sigma_pct: float, noise_pct: float = 0.0,
                                seed: int = 0) -> SyntheticInstance:
    """
    Boolean product of random n x kappa and kappa x m factors, then independent
    flips with probability noise_pct / 100. The same seed with and without noise
    gives the same clean matrix.
    """
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    if not 0 <= sigma_pct < 100:
        raise ValueError("sigma_pct must lie in [0, 100)")
    if not 0 <= noise_pct <= 100:
        raise ValueError("noise_pct must lie in [0, 100]")
    rng = _rng(seed)
    p = zero_probability(kappa, sigma_pct)
    A = rng.random((n, kappa)) >= p
    B = rng.random((kappa, m)) >= p
    f = Factorisation(A, B)
    clean = boolean_product(f)
    flips = rng.random((n, m)) < noise_pct / 100
    X = BinaryMatrix(clean.ones ^ flips, np.zeros((n, m), dtype=bool))
    return SyntheticInstance(X, f, clean)


def generate_synthetic(n: int, m: int, kappa: int, sigma_pct: float, noise_pct: float = 0.0,
                       seed: int = 0) -> BinaryMatrix:
    return generate_synthetic_instance(n, m, kappa, sigma_pct, noise_pct, seed).X


def apply_mask(X: BinaryMatrix, missing_pct: float, seed: int = 0) -> BinaryMatrix:
    """Hide floor(missing_pct * n * m / 100) cells chosen uniformly (among all cells)."""
    if not 0 <= missing_pct < 100:
        raise ValueError("missing_pct must lie in [0, 100)")
    n, m = X.shape
    count = int(math.floor(missing_pct * n * m / 100))
    cells = _rng(seed).choice(n * m, size=count, replace=False)
    missing = X.missing.copy().ravel()
    missing[cells] = True
    missing = missing.reshape(n, m)
    return BinaryMatrix(X.ones & ~missing, missing)


GRID_SIZES = ((20, 20), (35, 20), (50, 20))
GRID_SPARSITY = {"sparse": 75, "normal": 50}
GRID_NOISE = {"clean": 0, "noisy": 5}
GRID_KAPPA = 10
GRID_SEEDS = 10


def appendix_grid(seed: int = 0) -> list[tuple[str, BinaryMatrix]]:
    """The 120-instance synthetic grid: 3 sizes x 2 sparsities x 2 noise levels x 10 seeds."""
    out = []
    for n, m in GRID_SIZES:
        for sname, sigma in GRID_SPARSITY.items():
            for nname, noise in GRID_NOISE.items():
                for r in range(GRID_SEEDS):
                    s = seed * 1000 + r
                    X = generate_synthetic(n, m, GRID_KAPPA, sigma, noise, s)
                    out.append((f"{n}-{sname}-{nname}-{r:02d}", X))
    return out


# --------------------------------------------------------------------------
# tight instances for the two objectives
# --------------------------------------------------------------------------

def tight_factor(k: int) -> np.ndarray:
    """A'(k) for even k >= 2: a (4t+3) x k binary matrix, t = k/2 - 1."""
    if k < 2 or k % 2:
        raise ValueError("tight_factor needs an even k >= 2")
    t = k // 2 - 1
    I = np.eye(t, dtype=np.int64)
    R = I[::-1]
    one = np.ones((t, 1), dtype=np.int64)
    z = lambda r, c: np.zeros((r, c), dtype=np.int64)  # noqa: E731
    blocks = [
        [I, z(t, 1), z(t, 1), z(t, t)],
        [z(1, t), np.ones((1, 1), dtype=np.int64), z(1, 1), z(1, t)],
        [z(t, t), one, z(t, 1), R],
        [one.T, np.ones((1, 1), dtype=np.int64), np.ones((1, 1), dtype=np.int64), one.T],
        [R, z(t, 1), one, z(t, t)],
        [z(1, t), z(1, 1), np.ones((1, 1), dtype=np.int64), z(1, t)],
        [z(t, t), z(t, 1), z(t, 1), I],
    ]
    return np.block(blocks).astype(bool)


def build_tight_instance(k: int) -> WeightedBinaryMatrix:
    """
    Weighted instance where the best rank-k factorisation has Frobenius error 1
    but error k under the objective that charges every cover of a zero.

    For even k the core is A' o A'^T with the middle cell set to 0, weighted
    k+1 everywhere except the middle row and column (weight 1). For odd k the
    first row and column of the k+1 instance are removed.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if k % 2:
        big = build_tight_instance(k + 1)
        core = BinaryMatrix(big.core.ones[1:, 1:], big.core.missing[1:, 1:])
        w = big.row_weights[1:]
        return _weighted_from(core, w, w)
    A = tight_factor(k).astype(np.int64)
    Z = (A @ A.T) > 0
    mid = Z.shape[0] // 2
    Z[mid, mid] = False
    w = np.full(Z.shape[0], k + 1, dtype=np.int64)
    w[mid] = 1
    return _weighted_from(BinaryMatrix(Z, np.zeros_like(Z)), w, w)


# --------------------------------------------------------------------------
# categorical tables
# --------------------------------------------------------------------------

MISSING_TOKENS = ("", "?", "NA", "nan", "NaN", None)


def _is_missing(v) -> bool:
    if v is None:
        return True
    if isinstance(v, float) and math.isnan(v):
        return True
    return isinstance(v, str) and v.strip() in MISSING_TOKENS


def binarize_categorical(table: Mapping[str, Sequence], config: Mapping[str, Mapping]) -> tuple[BinaryMatrix, list[str]]:
    """
    Turn a column-typed table into a binary matrix.

    ``config[col]["type"]`` is one of:

    * ``categorical``: one column per distinct observed value, in sorted order.
    * ``numeric``: two columns, value <= split and value > split. The split is
      ``config[col]["threshold"]`` when given, else the median of the
      observed values.
    * ``binary``: one column; ``config[col]["true"]`` lists the values mapped to 1
      and ``config[col]["false"]`` those mapped to 0.

    Missing source values make every derived cell missing.

    :return: (matrix, derived column names)
    """
    columns = list(config)
    if not columns:
        raise ValueError("no columns configured")
    lengths = {len(table[c]) for c in columns}
    if len(lengths) != 1:
        raise ValueError("columns have different lengths")
    n = lengths.pop()
    if n == 0:
        raise ValueError("table has no rows")
    blocks: list[np.ndarray] = []
    names: list[str] = []
    for col in columns:
        spec = config[col]
        kind = spec.get("type")
        raw = list(table[col])
        miss = np.array([_is_missing(v) for v in raw])
        if miss.all():
            raise ValueError(f"column {col!r} is empty")
        if kind == "categorical":
            values = sorted({str(v).strip() for v, mi in zip(raw, miss) if not mi})
            block = np.full((n, len(values)), -1, dtype=np.int64)
            for i, v in enumerate(raw):
                if not miss[i]:
                    block[i] = [int(str(v).strip() == u) for u in values]
            names += [f"{col}={u}" for u in values]
        elif kind == "numeric":
            nums = np.full(n, np.nan)
            for i, v in enumerate(raw):
                if not miss[i]:
                    try:
                        nums[i] = float(v)
                    except (TypeError, ValueError):
                        raise ValueError(f"column {col!r} has a non-numeric value {v!r}") from None
            if not np.all(np.isfinite(nums[~miss])):
                raise ValueError(f"column {col!r} has non-finite values")
            split = float(spec["threshold"]) if "threshold" in spec else float(np.median(nums[~miss]))
            block = np.full((n, 2), -1, dtype=np.int64)
            block[~miss, 0] = nums[~miss] <= split
            block[~miss, 1] = nums[~miss] > split
            names += [f"{col}<={split:g}", f"{col}>{split:g}"]
        elif kind == "binary":
            true = {str(v) for v in spec.get("true", ["1"])}
            false = {str(v) for v in spec.get("false", ["0"])}
            block = np.full((n, 1), -1, dtype=np.int64)
            for i, v in enumerate(raw):
                if miss[i]:
                    continue
                s = str(v).strip()
                if s in true:
                    block[i, 0] = 1
                elif s in false:
                    block[i, 0] = 0
                else:
                    raise ValueError(f"column {col!r}: value {v!r} is in neither label set")
            names.append(col)
        else:
            raise ValueError(f"column {col!r}: unknown type {kind!r}")
        blocks.append(block)
    vals = np.hstack(blocks)
    return BinaryMatrix(vals == 1, vals == -1), names


def read_table(path, delimiter: str = ",") -> dict[str, list[str]]:
    """Read a delimited file with a header row into a column mapping."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    if not rows:
        raise ValueError("empty table")
    header, body = rows[0], rows[1:]
    for r, row in enumerate(body):
        if len(row) != len(header):
            raise ValueError(f"row {r + 1} has {len(row)} fields, expected {len(header)}")
    return {h: [row[t] for row in body] for t, h in enumerate(header)}


def read_config(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def instance_name(path) -> str:
    return os.path.splitext(os.path.basename(str(path)))[0]
