"""
Heuristic and exact solvers for max a^T H b over binary vectors (BBQP).

The greedy heuristic scans rows of H in some order and keeps a row when it
raises sum_j max(0, s_j), where s is the running column sum of kept rows;
columns are then taken where the kept-row sum is positive. The portfolio runs
30 greedy variants and polishes each by alternating exact best responses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .formulations import build_pricing_ip, pricing_solution
from .matrix import Rank1Pattern
from .milp import solve_milp

ORDERINGS = ("original", "revised", "original-perturbed", "revised-perturbed", "random")
PERTURBATION = 1e-3
PORTFOLIO_RANDOM = 22

# fixed member layout: (ordering, flip orientation)
_FIXED_MEMBERS = (
    ("original", False), ("original-perturbed", False), ("original", True), ("original-perturbed", True),
    ("revised", False), ("revised-perturbed", False), ("revised", True), ("revised-perturbed", True),
)


@dataclass
class PricingInput:
    """
    :param H:         pricing matrix, n x m
    :param mu_star:   dual of the cardinality row
    :param mode:      ``"frobenius-duals"`` or ``"rho-constant"``
    """

    H: np.ndarray
    mu_star: float
    mode: str = "frobenius-duals"


@dataclass
class PricingOutcome:
    """
    :param value:         a^T H b for the returned vectors
    :param reduced_cost:  mu* - value, when mu* was supplied
    :param exact_bound:   valid upper bound on max a^T H b, from exact search only
    :param member:        which heuristic produced it
    """

    a: np.ndarray
    b: np.ndarray
    value: float
    reduced_cost: float | None = None
    exact_bound: float | None = None
    member: str = ""

    @property
    def pattern(self) -> Rank1Pattern | None:
        """The rank-1 pattern, or None when a or b is zero."""
        if not self.a.any() or not self.b.any():
            return None
        return Rank1Pattern(self.a, self.b)

    def with_mu(self, mu) -> "PricingOutcome":
        self.reduced_cost = float(mu) - self.value
        return self


def bbqp_value(H, a, b):
    """a^T H b, exact when H holds Fractions."""
    H = np.asarray(H)
    sub = H[np.ix_(np.asarray(a, dtype=bool), np.asarray(b, dtype=bool))]
    if H.dtype == object:
        return sum(sub.ravel().tolist(), Fraction(0))
    return float(sub.sum())


def _ordering_keys(G: np.ndarray, kind: str, rng: np.random.Generator | None) -> np.ndarray:
    """Row order for Phase I on G."""
    n = G.shape[0]
    if kind == "random":
        return rng.permutation(n)
    gp = np.maximum(G, 0).sum(axis=1)
    gn = np.minimum(G, 0).sum(axis=1)
    if kind.endswith("perturbed"):
        gp = gp * (1 + rng.uniform(-PERTURBATION, PERTURBATION, size=n))
    if kind.startswith("revised"):
        # larger positive mass first; on ties, less negative mass first
        return np.lexsort((np.arange(n), -gn, -gp))
    if kind.startswith("original"):
        return np.lexsort((np.arange(n), -gp))
    raise ValueError(f"unknown ordering {kind!r}")


def _auto_transpose(H: np.ndarray) -> bool:
    # Phase I runs over the smaller dimension
    return H.shape[0] > H.shape[1]


def _phase_one(G: np.ndarray, orders: np.ndarray) -> np.ndarray:
    """Run Phase I of the greedy for several row orders at once; returns selections (V x n)."""
    V, n = orders.shape
    m = G.shape[1]
    S = np.zeros((V, m))
    sel = np.zeros((V, n), dtype=bool)
    f0 = np.zeros(V)
    rows = np.arange(V)
    for step in range(n):
        idx = orders[:, step]
        cand = S + G[idx]
        f1 = np.maximum(cand, 0).sum(axis=1)
        take = f0 < f1
        S[take] = cand[take]
        f0 = np.where(take, f1, f0)
        sel[rows[take], idx[take]] = True
    return sel


def greedy_bbqp(H, ordering: str = "original", transpose: bool | None = None,
                seed: int | None = None, rng: np.random.Generator | None = None) -> PricingOutcome:
    """
    Two-phase greedy for max a^T H b.

    :param ordering:    one of ``original``, ``revised``, ``original-perturbed``,
                        ``revised-perturbed``, ``random``
    :param transpose:   run Phase I over columns (on H^T); None picks the smaller dimension
    :param seed:        seeds the perturbation or random order
    """
    H = np.asarray(H, dtype=float)
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}")
    if transpose is None:
        transpose = _auto_transpose(H)
    G = H.T if transpose else H
    if rng is None:
        rng = np.random.Generator(np.random.Philox(0 if seed is None else seed))
    order = _ordering_keys(G, ordering, rng)
    sel = _phase_one(G, order[None, :])[0]
    other = sel.astype(float) @ G > 0
    a, b = (other, sel) if transpose else (sel, other)
    return PricingOutcome(a, b, bbqp_value(H, a, b), member=ordering + ("-T" if transpose else ""))


def alternate(H, a, b, max_rounds: int = 1000) -> PricingOutcome:
    """
    Alternate a <- [H b > 0] and b <- [a^T H > 0] until one of them stops changing.
    """
    H = np.asarray(H, dtype=float)
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    A, B = _alternate_batch(H, a[None, :], b[None, :], max_rounds)
    return PricingOutcome(A[0], B[0], bbqp_value(H, A[0], B[0]), member="alternate")


def _alternate_batch(H: np.ndarray, A: np.ndarray, B: np.ndarray, max_rounds: int):
    A = A.copy()
    B = B.copy()
    active = np.ones(len(A), dtype=bool)
    for _ in range(max_rounds):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        newA = (B[idx].astype(float) @ H.T) > 0
        same = (newA == A[idx]).all(axis=1)
        A[idx] = newA
        active[idx[same]] = False
        idx = idx[~same]
        if not len(idx):
            break
        newB = (A[idx].astype(float) @ H) > 0
        same = (newB == B[idx]).all(axis=1)
        B[idx] = newB
        active[idx[same]] = False
    return A, B


def portfolio_members(H, seeds: Sequence[int] | None = None, polish: bool = True) -> list[PricingOutcome]:
    """
    The 30 greedy variants in fixed order: original, original-perturbed, their
    flipped-orientation versions, the same four for the revised ordering, then
    one random ordering per seed. Each is polished by :func:`alternate` unless
    ``polish`` is false.
    """
    H = np.asarray(H, dtype=float)
    seeds = list(range(PORTFOLIO_RANDOM)) if seeds is None else list(seeds)
    auto = _auto_transpose(H)
    members: list[tuple[str, bool, np.random.Generator]] = []
    base = seeds[0] if seeds else 0
    for t, (kind, flip) in enumerate(_FIXED_MEMBERS):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([base, t])))
        members.append((kind, auto != flip, rng))
    for s in seeds:
        members.append(("random", auto, np.random.Generator(np.random.Philox(s))))

    out: list[PricingOutcome | None] = [None] * len(members)
    for transpose in (False, True):
        ids = [t for t, (_, tr, _) in enumerate(members) if tr == transpose]
        if not ids:
            continue
        G = H.T if transpose else H
        orders = np.stack([_ordering_keys(G, members[t][0], members[t][2]) for t in ids])
        sel = _phase_one(G, orders)
        other = sel.astype(float) @ G > 0
        A, B = (other, sel) if transpose else (sel, other)
        if polish:
            A, B = _alternate_batch(H, A, B, 1000)
        for r, t in enumerate(ids):
            name = members[t][0] + ("-T" if transpose else "")
            out[t] = PricingOutcome(A[r], B[r], bbqp_value(H, A[r], B[r]), member=name)
    return out


def portfolio(H, seeds: Sequence[int] | None = None, mu_star=None) -> PricingOutcome:
    """Best member of :func:`portfolio_members`; ties go to the earliest member."""
    members = portfolio_members(H, seeds)
    best = max(range(len(members)), key=lambda t: (members[t].value, -t))
    res = members[best]
    if mu_star is not None:
        res.with_mu(mu_star)
    return res


def distinct_best(outcomes: Sequence[PricingOutcome], limit: int) -> list[PricingOutcome]:
    """Up to ``limit`` outcomes with distinct nonzero supports, highest value first."""
    seen = set()
    ranked = sorted(range(len(outcomes)), key=lambda t: (-outcomes[t].value, t))
    res = []
    for t in ranked:
        p = outcomes[t].pattern
        if p is None or p.key in seen:
            continue
        seen.add(p.key)
        res.append(outcomes[t])
        if len(res) == limit:
            break
    return res


def exact_bbqp(H, warm: PricingOutcome | None = None, node_limit: int | None = 50_000,
               time_limit: float | None = 25.0, engine: str = "highs", mu_star=None) -> PricingOutcome:
    """
    Solve max a^T H b through the McCormick integer program.

    The result is never worse than ``warm``. ``exact_bound`` is a valid upper
    bound on the optimum: equal to ``value`` when solved to optimality, else
    the search's dual bound.
    """
    H = np.asarray(H, dtype=float)
    n, m = H.shape
    if not (H > 0).any():
        a = np.zeros(n, dtype=bool)
        b = np.zeros(m, dtype=bool)
        res = PricingOutcome(a, b, 0.0, exact_bound=0.0, member="exact")
        return res.with_mu(mu_star) if mu_star is not None else res
    warm_pattern = warm.pattern if warm is not None else None
    model = build_pricing_ip(H, warm_pattern)
    r = solve_milp(model, node_limit=node_limit, time_limit=time_limit, engine=engine)
    if r.x is None:
        a = np.zeros(n, dtype=bool)
        b = np.zeros(m, dtype=bool)
    else:
        a, b = pricing_solution(model, r.x)
    value = bbqp_value(H, a, b)
    if warm is not None and warm.value > value:
        a, b, value = warm.a, warm.b, warm.value
    if r.status == "optimal":
        bound = value
    else:
        bound = max(-r.bound, value) if np.isfinite(r.bound) else np.inf
    res = PricingOutcome(a, b, value, exact_bound=float(bound), member="exact")
    return res.with_mu(mu_star) if mu_star is not None else res
