"""Factorisation error functionals, evaluated in exact arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .matrix import BinaryMatrix, Factorisation, boolean_product


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string like ``"1/3"`` or float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer, Rational)):
        return Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    # floats go through their shortest repr so that 0.1 means 1/10
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class ObjectiveSpec:
    """``mode`` is ``"frobenius"`` or ``"rho"``; ``rho`` is used only in rho mode."""

    mode: str = "frobenius"
    rho: Fraction = Fraction(1)

    def __post_init__(self):
        if self.mode not in ("frobenius", "rho"):
            raise ValueError(f"unknown objective mode {self.mode!r}")
        rho = as_fraction(self.rho)
        if rho <= 0:
            raise ValueError("rho must be positive")
        object.__setattr__(self, "rho", rho)

    def evaluate(self, X: BinaryMatrix, f: Factorisation, weights=None) -> Fraction:
        """Objective value of ``f``; a weighted matrix supplies its own weights."""
        if hasattr(X, "core"):
            X, weights = X.core, (X.row_weights, X.col_weights)
        if self.mode == "frobenius":
            return Fraction(frobenius_error(X, boolean_product(f), weights))
        return rho_error(X, f, self.rho, weights)


def _weight_matrix(shape, weights) -> np.ndarray:
    n, m = shape
    if weights is None:
        return np.ones((n, m), dtype=np.int64)
    r, c = weights
    r = np.asarray(r, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    if r.shape != (n,) or c.shape != (m,):
        raise ValueError("weight vectors do not match the matrix shape")
    return np.outer(r, c)


def _check_shape(X: BinaryMatrix, shape) -> None:
    if tuple(X.shape) != tuple(shape):
        raise ValueError(f"shape mismatch: X is {X.shape}, other is {tuple(shape)}")


def frobenius_error(X: BinaryMatrix, Z: BinaryMatrix, weights=None) -> int:
    """
    Weighted Hamming distance between X and a fully known Z over the known cells of X.

    :param weights:     optional (r, c); cell (i, j) counts r_i * c_j times
    """
    _check_shape(X, Z.shape)
    if Z.has_missing:
        raise ValueError("Z must be fully known")
    W = _weight_matrix(X.shape, weights)
    missed = X.ones & ~Z.ones
    spurious = X.zeros & Z.ones
    return int(W[missed].sum() + W[spurious].sum())


def rho_error(X: BinaryMatrix, f: Factorisation, rho=1, weights=None) -> Fraction:
    """
    Uncovered ones plus rho times the number of rank-1 factors covering each known zero.
    """
    _check_shape(X, f.shape)
    rho = as_fraction(rho)
    if rho <= 0:
        raise ValueError("rho must be positive")
    W = _weight_matrix(X.shape, weights)
    counts = f.cover_counts()
    uncovered = int(W[X.ones & (counts == 0)].sum())
    overcover = int((W * counts)[X.zeros].sum())
    return uncovered + rho * overcover


def reconstruction_percentage(X_full: BinaryMatrix, f: Factorisation) -> Fraction:
    """100 * (1 - ||X - A o B||_F^2 / ||X||_F^2) against a complete reference matrix."""
    if X_full.has_missing:
        raise ValueError("the reference matrix must be complete")
    norm = int(X_full.ones.sum())
    if norm == 0:
        raise ValueError("reference matrix has no ones; the percentage is undefined")
    d = frobenius_error(X_full, boolean_product(f))
    return 100 * (1 - Fraction(d, norm))
