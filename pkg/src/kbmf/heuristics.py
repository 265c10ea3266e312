"""
k-Greedy: extract k rank-1 patterns one at a time from H = w (2X - 1),
zeroing the cells each pattern covers before extracting the next.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matrix import BinaryMatrix, Factorisation, boolean_product, zero_factorisation
from .objective import frobenius_error
from .preprocess import WeightedBinaryMatrix, expand, reduce
from .pricing import PORTFOLIO_RANDOM, portfolio

DEFAULT_SEEDS = 70


@dataclass
class KGreedyResult:
    """
    :param error:           weighted Frobenius error on the input matrix
    :param seed:            seed of the winning run
    :param preprocessed:    whether the winning run worked on the reduced matrix
    """

    factorisation: Factorisation
    error: int
    seed: int
    preprocessed: bool


def member_seeds(seed: int, step: int) -> list[int]:
    """Random-ordering seeds for the portfolio at extraction step ``step`` of run ``seed``."""
    ss = np.random.SeedSequence([seed, step])
    return [int(v) for v in ss.generate_state(PORTFOLIO_RANDOM)]


def greedy_sequence(X, k: int, seed: int = 0) -> Factorisation:
    """
    One k-Greedy run on X (plain or weighted), without preprocessing.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if isinstance(X, WeightedBinaryMatrix):
        core, W = X.core, X.weights.astype(float)
    else:
        core, W = X, np.ones(X.shape)
    n, m = core.shape
    H = np.where(core.ones, W, np.where(core.zeros, -W, 0.0))
    A = np.zeros((n, k), dtype=bool)
    B = np.zeros((k, m), dtype=bool)
    for ell in range(k):
        out = portfolio(H, seeds=member_seeds(seed, ell))
        if out.value <= 0 or out.pattern is None:
            break
        A[:, ell] = out.a
        B[ell] = out.b
        H[np.ix_(out.a, out.b)] = 0.0
    return Factorisation(A, B)


def k_greedy_detailed(X: BinaryMatrix, k: int, seeds: Sequence[int] | int = DEFAULT_SEEDS,
                      preprocess_first: bool | None = None) -> KGreedyResult:
    """
    Best k-Greedy factorisation of X over several seeds.

    :param seeds:               list of seeds, or a count meaning ``range(count)``
    :param preprocess_first:    run on the reduced matrix (True), on X itself (False)
                                or both (None, the default)
    :return: the run with lowest error; ties go to the earlier seed, and within
             a seed the preprocessed run is tried first
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    seeds = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    if not seeds:
        raise ValueError("at least one seed is needed")
    settings = [True, False] if preprocess_first is None else [bool(preprocess_first)]
    reduced = None
    if True in settings and X.ones.any():
        reduced = reduce(X)

    best: KGreedyResult | None = None
    for seed in seeds:
        for pre in settings:
            if pre:
                f = expand(reduced, greedy_sequence(reduced, k, seed)) if reduced is not None \
                    else zero_factorisation(X.n, X.m, k)
            else:
                f = greedy_sequence(X, k, seed)
            err = frobenius_error(X, boolean_product(f))
            if best is None or err < best.error:
                best = KGreedyResult(f, err, seed, pre)
    return best


def k_greedy(X: BinaryMatrix, k: int, seeds: Sequence[int] | int = DEFAULT_SEEDS,
             preprocess_first: bool | None = None) -> Factorisation:
    """Factorisation from :func:`k_greedy_detailed`."""
    return k_greedy_detailed(X, k, seeds, preprocess_first).factorisation
