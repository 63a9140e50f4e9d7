"""Exact two-phase simplex over the rationals with Bland's rule.

The tableau is kept fraction-free: an integer matrix ``M`` and a positive
integer ``d`` (the basis determinant up to sign) with true entries ``M/d``.
Each pivot is Edmonds' integer-preserving Gauss-Jordan step, so every
division is exact and no gcd work happens inside the loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .config import check_guard

MAX_NONZEROS = 50_000

Coeffs = Union[Mapping[int, object], Sequence[object]]


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[int, Fraction]
    relation: str
    rhs: Fraction


@dataclass
class LPInstance:
    """max (or min) objective . x subject to the rows; variables >= 0 unless free."""

    num_vars: int
    objective: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    maximize: bool = True
    free: frozenset = frozenset()

    def __post_init__(self):
        if not self.objective:
            self.objective = [Fraction(0)] * self.num_vars
        self.objective = [Fraction(c) for c in self.objective]
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length differs from variable count")

    def add(self, coeffs: Coeffs, relation: str, rhs) -> None:
        if relation not in ("<=", "=", ">="):
            raise ValueError(f"unknown relation {relation!r}")
        if not isinstance(coeffs, Mapping):
            coeffs = {j: c for j, c in enumerate(coeffs) if c != 0}
        row = {int(j): Fraction(c) for j, c in coeffs.items() if c != 0}
        for j in row:
            if not 0 <= j < self.num_vars:
                raise ValueError(f"variable {j} out of range")
        self.constraints.append(Constraint(row, relation, Fraction(rhs)))

    @property
    def nonzeros(self) -> int:
        return sum(len(c.coeffs) for c in self.constraints)

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        for j, v in enumerate(x):
            if j not in self.free and v < 0:
                return False
        for con in self.constraints:
            lhs = sum((c * x[j] for j, c in con.coeffs.items()), Fraction(0))
            ok = {"<=": lhs <= con.rhs, "=": lhs == con.rhs, ">=": lhs >= con.rhs}[con.relation]
            if not ok:
                return False
        return True


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction] = None
    x: Optional[tuple] = None
    pivots: int = 0
    duals: Optional[tuple] = None  # one per constraint, valid when optimal


def _lcm_den(values) -> int:
    out = 1
    for v in values:
        out = out * v.denominator // math.gcd(out, v.denominator)
    return out


class _Tableau:
    def __init__(self, M: np.ndarray, basis: list[int]):
        self.M = M
        self.basis = basis
        self.d = 1
        self.pivots = 0

    @property
    def rows(self) -> int:
        return self.M.shape[0] - 1

    def pivot(self, r: int, e: int) -> None:
        M = self.M
        p = M[r, e]
        row = M[r].copy()
        col = M[:, e].copy()
        M[:] = (p * M - np.outer(col, row)) // self.d
        M[r] = row
        if p < 0:
            M[:] = -M
            p = -p
        self.d = p
        self.basis[r] = e
        self.pivots += 1

    def bland(self, allowed: int) -> str:
        """Iterate until optimal/unbounded over columns [0, allowed)."""
        M = self.M
        rhs = M.shape[1] - 1
        obj = M[-1]
        while True:
            e = next((j for j in range(allowed) if obj[j] > 0), None)
            if e is None:
                return "optimal"
            best = None
            for i in range(self.rows):
                a = M[i, e]
                if a > 0:
                    if best is None:
                        best = i
                        continue
                    lhs = M[i, rhs] * M[best, e]
                    rhs_ = M[best, rhs] * a
                    if lhs < rhs_ or (lhs == rhs_ and self.basis[i] < self.basis[best]):
                        best = i
            if best is None:
                return "unbounded"
            self.pivot(best, e)
            obj = M[-1]


def solve_lp(lp: LPInstance) -> LPResult:
    check_guard("lp_nonzeros", lp.nonzeros, MAX_NONZEROS)

    # structural columns: one per variable, plus a negative copy for free ones
    col_of: list[tuple[int, int]] = []  # (variable, sign)
    neg_col: dict[int, int] = {}
    for j in range(lp.num_vars):
        col_of.append((j, 1))
    for j in sorted(lp.free):
        neg_col[j] = len(col_of)
        col_of.append((j, -1))
    ns = len(col_of)

    rows = []
    flips = []
    for con in lp.constraints:
        coeffs, rel, rhs = dict(con.coeffs), con.relation, con.rhs
        flip = 1
        if rhs < 0:
            coeffs = {j: -c for j, c in coeffs.items()}
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
            flip = -1
        rows.append((coeffs, rel, rhs))
        flips.append(flip)

    m = len(rows)
    n_slack = sum(1 for _, rel, _ in rows if rel != "=")
    n_art = sum(1 for _, rel, _ in rows if rel != "<=")
    width = ns + n_slack + n_art
    M = np.empty((m + 1, width + 1), dtype=object)
    M[:] = 0
    basis = [0] * m
    slack = ns
    art = ns + n_slack
    art_rows = []
    unit_col = [0] * m  # a column equal to e_i, used to read duals
    row_scale = [1] * m
    for i, (coeffs, rel, rhs) in enumerate(rows):
        scale = _lcm_den(list(coeffs.values()) + [rhs])
        row_scale[i] = scale
        for j, c in coeffs.items():
            v = int(c * scale)
            M[i, j] = v
            if j in neg_col:
                M[i, neg_col[j]] = -v
        M[i, width] = int(rhs * scale)
        if rel == "<=":
            M[i, slack] = 1
            basis[i] = slack
            unit_col[i] = slack
            slack += 1
        else:
            if rel == ">=":
                M[i, slack] = -1
                slack += 1
            M[i, art] = 1
            basis[i] = art
            unit_col[i] = art
            art_rows.append(i)
            art += 1

    tab = _Tableau(M, basis)
    first_art = ns + n_slack
    kept = list(range(m))

    # phase 1: maximize -(sum of artificials)
    if art_rows:
        M[m, :] = 0
        for i in art_rows:
            M[m, :] += M[i, :]
        M[m, first_art:width] = 0
        tab.bland(first_art)
        if M[m, width] != 0:
            return LPResult("infeasible", pivots=tab.pivots)
        # drive remaining artificials out of the basis, dropping redundant rows
        keep = []
        for i in range(m):
            if tab.basis[i] >= first_art:
                j = next((j for j in range(first_art) if M[i, j] != 0), None)
                if j is None:
                    continue
                tab.pivot(i, j)
            keep.append(i)
        # artificial columns stay (never re-enter) so every row keeps a unit column
        M = np.vstack([M[keep], M[m:m + 1]])
        tab.M = M
        tab.basis = [tab.basis[i] for i in keep]
        kept = keep
        m = len(keep)

    sign = 1 if lp.maximize else -1
    obj = [sign * c for c in lp.objective]
    scale = _lcm_den(obj)
    cost = [0] * width
    for col, (j, s) in enumerate(col_of):
        cost[col] = int(obj[j] * scale) * s
    row = np.empty(width + 1, dtype=object)
    row[:width] = [tab.d * c for c in cost]
    row[width] = 0
    for i in range(m):
        cb = cost[tab.basis[i]]
        if cb:
            row -= cb * tab.M[i]
    tab.M[m] = row
    status = tab.bland(first_art)
    if status == "unbounded":
        return LPResult("unbounded", pivots=tab.pivots)

    values = [Fraction(0)] * width
    for i in range(m):
        values[tab.basis[i]] = Fraction(int(tab.M[i, width]), int(tab.d))
    x = [Fraction(0)] * lp.num_vars
    for col, (j, s) in enumerate(col_of):
        x[j] += s * values[col]
    value = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))

    # y = c_B B^-1; the reduced cost of the unit column of row i is -y_i
    duals = [Fraction(0)] * len(rows)
    for i in kept:
        y = Fraction(-int(tab.M[m, unit_col[i]]), int(tab.d) * scale)
        duals[i] = sign * y * flips[i] * row_scale[i]
    return LPResult("optimal", value, tuple(x), tab.pivots, tuple(duals))
