"""Approximate degree, block approximate degree and k-wise distinguishing
advantage, all as exact rational LPs.

Degrees follow the 0/1 convention: for a pm1 function ``f`` we approximate
``f01 = (1 - f) / 2``.  The LPs themselves run on the +-1 side, where a
polynomial G with |f - G| <= 2e gives g = (1 - G)/2 with |f01 - g| <= e.
Advantages are computed for the 0/1 side, Pr[f01(mu) = 1] - Pr[f01(nu) = 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .boolfn import BoolFn, popcount
from .config import check_guard
from .lp import Constraint, LPInstance, LPResult, solve_lp

__all__ = [
    "Approximant", "DistinguisherWitness", "LPInstance", "Constraint", "LPResult",
    "solve_lp", "approx_degree", "block_approx_degree", "best_error",
    "max_advantage_kwise", "duality_check", "blockdeg_relations_check",
    "block_partition", "block_degree",
]

MAX_DEGREE_ARITY = 12
MAX_ADVANTAGE_ARITY = 8
DEFAULT_EPS = Fraction(1, 3)


@dataclass(frozen=True)
class Approximant:
    """g = sum_S c_S chi_S approximating f01 with max_x |f01(x) - g(x)| = sup_error."""

    n: int
    monomials: tuple[int, ...]
    coefficients: tuple[Fraction, ...]
    sup_error: Fraction

    def values(self) -> list[Fraction]:
        out = []
        for x in range(1 << self.n):
            out.append(sum((c * (1 - 2 * (popcount(x & S) & 1))
                            for S, c in zip(self.monomials, self.coefficients)), Fraction(0)))
        return out

    def degree(self) -> int:
        return max((popcount(S) for S, c in zip(self.monomials, self.coefficients) if c != 0),
                   default=0)


@dataclass(frozen=True)
class DistinguisherWitness:
    mu: tuple[Fraction, ...]
    nu: tuple[Fraction, ...]
    k: int
    advantage: Fraction


def _check_pm1(f: BoolFn, limit: int) -> None:
    if f.range != "pm1":
        raise ValueError("degree/advantage LPs need a pm1 function")
    check_guard("lp_arity", f.n, limit)


def _f01(f: BoolFn) -> list[int]:
    return [0 if v == 1 else 1 for v in f.values]


def block_partition(n: int, k: int, partition: Optional[Sequence[Sequence[int]]] = None):
    if partition is None:
        if k <= 0 or n % k:
            raise ValueError(f"block size {k} does not divide {n}")
        return tuple(tuple(range(b, b + k)) for b in range(0, n, k))
    blocks = tuple(tuple(sorted(b)) for b in partition)
    flat = sorted(i for b in blocks for i in b)
    if flat != list(range(n)) or any(not b for b in blocks):
        raise ValueError("partition must split range(n) into nonempty blocks")
    return blocks


def block_degree(S: int, blocks) -> int:
    """Number of blocks that the monomial chi_S touches."""
    return sum(1 for b in blocks if any((S >> i) & 1 for i in b))


def _error_lp_primal(f: BoolFn, monomials: Sequence[int]) -> tuple[Fraction, tuple[Fraction, ...]]:
    """min t s.t. |f - sum c_S chi_S| <= t, solved directly.  Kept as a second route."""
    K = len(monomials)
    lp = LPInstance(K + 1, [0] * K + [-1], free=frozenset(range(K)))
    for x in range(1 << f.n):
        row = {j: 1 - 2 * (popcount(x & S) & 1) for j, S in enumerate(monomials)}
        fx = f.values[x]
        lp.add({**row, K: -1}, "<=", fx)
        lp.add({**row, K: 1}, ">=", fx)
    res = solve_lp(lp)
    assert res.status == "optimal", res.status
    return res.x[K], res.x[:K]


def _error_lp(f: BoolFn, monomials: Sequence[int]) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Same optimum through the dual: max <f, p - q> with p - q orthogonal to the
    monomials and sum(p + q) = 1.  The row duals of the orthogonality constraints
    are the best coefficients, which we certify by evaluating them."""
    size = 1 << f.n
    lp = LPInstance(2 * size, [int(v) for v in f.values] + [-int(v) for v in f.values])
    for S in monomials:
        row = {}
        for x in range(size):
            s = 1 - 2 * (popcount(x & S) & 1)
            row[x] = s
            row[size + x] = -s
        lp.add(row, "=", 0)
    lp.add({j: 1 for j in range(2 * size)}, "=", 1)
    res = solve_lp(lp)
    assert res.status == "optimal", res.status
    coeffs = res.duals[:len(monomials)]
    err = max(abs(f.values[x] - sum((c * (1 - 2 * (popcount(x & S) & 1))
                                     for S, c in zip(monomials, coeffs)), Fraction(0)))
              for x in range(size))
    if err != res.value:
        raise AssertionError(f"dual certificate mismatch: {err} != {res.value}")
    return res.value, tuple(coeffs)


@lru_cache(maxsize=4096)
def _cached_error(n: int, values: tuple, monomials: tuple) -> tuple:
    f = BoolFn(n, values, "pm1")
    return _error_lp(f, monomials)


def best_error(f: BoolFn, monomials: Sequence[int]) -> tuple[Fraction, Approximant]:
    """Least 0/1-side uniform error using the given monomials, with its witness."""
    err_pm, coeffs = _cached_error(f.n, tuple(int(v) for v in f.values), tuple(monomials))
    mons = tuple(monomials)
    c01 = [(-c / 2) for c in coeffs]
    if 0 in mons:
        c01[mons.index(0)] += Fraction(1, 2)
    else:
        mons = (0,) + mons
        c01 = [Fraction(1, 2)] + c01
    target = _f01(f)
    approx = Approximant(f.n, mons, tuple(c01), Fraction(0))
    sup = max(abs(t - g) for t, g in zip(target, approx.values()))
    return err_pm / 2, Approximant(f.n, mons, tuple(c01), sup)


def _degree_scan(f: BoolFn, eps: Fraction, admissible, top: int) -> tuple[int, Approximant]:
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    for level in range(top + 1):
        mons = [S for S in range(1 << f.n) if admissible(S) <= level]
        err, approx = best_error(f, mons)
        if err <= eps:
            return level, approx
    raise AssertionError("full monomial basis must be exact")


def approx_degree(f: BoolFn, eps=DEFAULT_EPS) -> tuple[int, Approximant]:
    """Smallest degree of a polynomial within eps of f01 everywhere."""
    _check_pm1(f, MAX_DEGREE_ARITY)
    return _degree_scan(f, eps, popcount, f.n)


def block_approx_degree(f: BoolFn, k: int, eps=DEFAULT_EPS,
                        partition: Optional[Sequence[Sequence[int]]] = None) -> tuple[int, Approximant]:
    """Smallest block degree (blocks touched per monomial) of an eps-approximant."""
    _check_pm1(f, MAX_DEGREE_ARITY)
    blocks = block_partition(f.n, k, partition)
    return _degree_scan(f, eps, lambda S: block_degree(S, blocks), len(blocks))


def max_advantage_kwise(f: BoolFn, k: int) -> tuple[Fraction, DistinguisherWitness]:
    """max Pr[f01(mu)=1] - Pr[f01(nu)=1] over k-wise indistinguishable (mu, nu).

    Marginals on every |S| <= k agree iff the Fourier coefficients of mu - nu
    vanish on every |T| <= k, which is the constraint set used here.
    """
    _check_pm1(f, MAX_ADVANTAGE_ARITY)
    N = f.n
    size = 1 << N
    if k < 0:
        raise ValueError("k must be non-negative")
    target = _f01(f)
    lp = LPInstance(2 * size, target + [-t for t in target])
    lp.add({y: 1 for y in range(size)}, "=", 1)
    lp.add({size + y: 1 for y in range(size)}, "=", 1)
    for T in range(1, size):
        if popcount(T) <= k:
            row = {}
            for y in range(size):
                s = 1 - 2 * (popcount(y & T) & 1)
                row[y] = s
                row[size + y] = -s
            lp.add(row, "=", 0)
    res = solve_lp(lp)
    assert res.status == "optimal", res.status
    mu, nu = res.x[:size], res.x[size:]
    adv = sum((m - v for m, v, t in zip(mu, nu, target) if t), Fraction(0))
    return adv, DistinguisherWitness(tuple(mu), tuple(nu), k, adv)


def duality_check(f: BoolFn, k: int, eps=DEFAULT_EPS) -> bool:
    """[advantage at level k <= eps] iff [eps/2-approximate degree <= k]."""
    eps = Fraction(eps)
    adv, _ = max_advantage_kwise(f, k)
    deg, _ = approx_degree(f, eps / 2)
    return (adv <= eps) == (deg <= k)


@dataclass(frozen=True)
class BlockRelations:
    degree: int
    block_degree: int
    blocks: int
    left_implication: bool
    right_implication: bool
    sandwich: bool
    right_strict: bool  # deg < n - k; fails for chi_S inside one block, reported only

    @property
    def ok(self) -> bool:
        return self.left_implication and self.right_implication and self.sandwich


def blockdeg_relations(f: BoolFn, k: int, eps=DEFAULT_EPS, partition=None) -> BlockRelations:
    n = f.n
    blocks = block_partition(n, k, partition)
    d, _ = approx_degree(f, eps)
    b, _ = block_approx_degree(f, k, eps, partition)
    nb = len(blocks)
    left = (not d < nb) or b < nb
    # monomials touching at most nb - 1 blocks have degree at most n - k
    right = (not b < nb) or d <= n - k
    strict = (not b < nb) or d < n - k
    sandwich = b <= d <= k * b
    return BlockRelations(d, b, nb, left, right, sandwich, strict)


def blockdeg_relations_check(f: BoolFn, k: int, eps=DEFAULT_EPS, partition=None) -> bool:
    return blockdeg_relations(f, k, eps, partition).ok
