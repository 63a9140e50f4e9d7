"""From a shallow circuit to a nonlocal parity game.

Inputs whose forward lightcones are pairwise disjoint act as separate players;
every other input is fixed, and the outputs outside the chosen lightcones are
referee outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import config
from ._rng import stream
from .boolfn import BoolFn, parity_signs, popcount
from .nsc import NSChannel, is_no_signaling
from .qsim import Circuit, forward_lightcone, outcome_table

DEFAULT_BUDGET = 1 << 12


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ConflictGraph:
    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.shape != (self.n, self.n) or (adj != adj.T).any() or adj.diagonal().any():
            raise ValueError("conflict graph must be symmetric and irreflexive")
        adj = adj.copy()
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @property
    def max_degree(self) -> int:
        return int(self.adjacency.sum(axis=1).max()) if self.n else 0

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in range(a + 1, self.n) if self.adjacency[a, b]]

    def is_independent(self, S: Sequence[int]) -> bool:
        S = list(S)
        return not self.adjacency[np.ix_(S, S)].any() if S else True


def lightcones(c: Circuit) -> list[frozenset]:
    return [forward_lightcone(c, j) for j in range(c.n)]


def conflict_graph(c: Circuit) -> ConflictGraph:
    cones = lightcones(c)
    adj = np.zeros((c.n, c.n), dtype=bool)
    for a in range(c.n):
        for b in range(a + 1, c.n):
            if cones[a] & cones[b]:
                adj[a, b] = adj[b, a] = True
    return ConflictGraph(c.n, adj)


def greedy_independent_set(g: ConflictGraph) -> tuple[int, ...]:
    """Ascending greedy; each pick blocks at most max_degree others, so |S| >= n/(max_degree+1)."""
    chosen: list[int] = []
    blocked = np.zeros(g.n, dtype=bool)
    for v in range(g.n):
        if not blocked[v]:
            chosen.append(v)
            blocked |= g.adjacency[v]
    return tuple(chosen)


# -- extraction ---------------------------------------------------------------

def _complement(n: int, S: Sequence[int]) -> tuple[int, ...]:
    s = set(S)
    return tuple(i for i in range(n) if i not in s)


def embed(n: int, S: Sequence[int], z: int, fixing: Sequence[int]) -> int:
    """Input mask with x_S read from the bits of z and x_{S^c} from the fixing bits."""
    x = 0
    for t, i in enumerate(S):
        x |= ((z >> t) & 1) << i
    for t, i in enumerate(_complement(n, S)):
        x |= (int(fixing[t]) & 1) << i
    return x


def _snap(table: np.ndarray, N: int, tol: float) -> np.ndarray:
    """Round to multiples of 2^-N; exact for circuits whose amplitudes are dyadic up to phase."""
    scale = 1 << N
    ints = np.rint(table * scale)
    err = float(np.max(np.abs(ints / scale - table), initial=0.0))
    if err > tol:
        raise ExtractionError(f"outcome probabilities are not dyadic (error {err:.2e}); use arith=f64")
    out = np.empty(table.shape, dtype=object)
    out.flat[:] = [Fraction(int(v), scale) for v in ints.flat]
    return out


def circuit_table(c: Circuit, inputs: Optional[Sequence[int]] = None, arith: str = "f64",
                  tol: Optional[float] = None) -> np.ndarray:
    table = outcome_table(c, inputs)
    if arith == "rat":
        return _snap(table, c.num_qubits, config.logical(tol))
    if arith != "f64":
        raise ValueError(f"unknown arithmetic path {arith!r}")
    return table


@dataclass(frozen=True)
class PlayerAssignment:
    players: tuple[tuple[int, ...], ...]
    referee: tuple[int, ...]


def player_assignment(c: Circuit, S: Sequence[int]) -> tuple[PlayerAssignment, tuple]:
    cones = [forward_lightcone(c, j) for j in S]
    B = []
    for q in range(c.num_qubits):
        owner = [p for p, cone in enumerate(cones) if q in cone]
        B.append(owner[0] if owner else None)
    players = tuple(tuple(q for q in range(c.num_qubits) if B[q] == p) for p in range(len(S)))
    referee = tuple(q for q in range(c.num_qubits) if B[q] is None)
    return PlayerAssignment(players, referee), tuple(B)


def extract_channel(c: Circuit, S: Sequence[int], fixing: Sequence[int] = (), arith: str = "f64",
                    tol: Optional[float] = None) -> NSChannel:
    """Channel from the |S| free inputs (in ascending order) to all measured qubits."""
    S = tuple(sorted(S))
    if len(_complement(c.n, S)) != len(fixing):
        raise ExtractionError(f"fixing has {len(fixing)} bits, expected {c.n - len(S)}")
    g = conflict_graph(c)
    if not g.is_independent(S):
        raise ExtractionError("inputs in S have overlapping lightcones")
    _, B = player_assignment(c, S)
    inputs = [embed(c.n, S, z, fixing) for z in range(1 << len(S))]
    table = circuit_table(c, inputs, arith, tol)
    ch = NSChannel(len(S), c.num_qubits, B, table)
    check = is_no_signaling(ch, tol)
    if not check:
        raise AssertionError(f"extracted channel signals: {check.witness}")
    return NSChannel(ch.n, ch.N, ch.B, ch.table, True)


# -- restriction search ------------------------------------------------------

def input_expectations(c: Circuit, f: BoolFn, arith: str = "f64", tol: Optional[float] = None):
    """E[f(C(x))] for every input mask, exact Fractions on the rat path."""
    if f.n != c.num_qubits:
        raise ValueError(f"f has arity {f.n}, circuit measures {c.num_qubits} qubits")
    table = circuit_table(c, None, arith, tol)
    if arith == "rat":
        vals = [Fraction(int(v)) for v in f.values] if f.exact or f.range == "pm1" \
            else [Fraction(v) for v in f.values]
        return [sum((p * v for p, v in zip(row, vals) if p), Fraction(0)) for row in table]
    return list(table @ f.as_float())


def restricted_correlations(c: Circuit, f: BoolFn, S: Sequence[int], fixings, arith: str = "f64",
                            tol: Optional[float] = None) -> list:
    """corr(f o C_y, PAR_|S|) for each fixing y of the inputs outside S."""
    S = tuple(sorted(S))
    E = input_expectations(c, f, arith, tol)
    par = parity_signs(len(S))
    size = 1 << len(S)
    out = []
    for y in fixings:
        total = sum(int(par[z]) * E[embed(c.n, S, z, y)] for z in range(size))
        out.append(total / size if arith == "f64" else Fraction(total) / size)
    return out


def fixing_bits(value: int, width: int) -> tuple[int, ...]:
    return tuple((value >> t) & 1 for t in range(width))


def averaging_identity(c: Circuit, f: BoolFn, S: Sequence[int], arith: str = "f64",
                       tol: Optional[float] = None):
    """Return (full correlation, E_y[PAR(y) corr_y]); equal by splitting the parity."""
    S = tuple(sorted(S))
    width = c.n - len(S)
    fixings = [fixing_bits(v, width) for v in range(1 << width)]
    corrs = restricted_correlations(c, f, S, fixings, arith, tol)
    E = input_expectations(c, f, arith, tol)
    par_n = parity_signs(c.n)
    full = sum(int(par_n[x]) * E[x] for x in range(1 << c.n))
    avg = sum((1 - 2 * (sum(y) & 1)) * cy for y, cy in zip(fixings, corrs))
    if arith == "rat":
        return Fraction(full) / (1 << c.n), Fraction(avg) / (1 << width)
    return full / (1 << c.n), avg / (1 << width)


@dataclass(frozen=True)
class ReductionResult:
    S: tuple[int, ...]
    fixing: tuple[int, ...]
    sign: int
    correlation: object  # correlation of sign * f o C_y with PAR_|S|, non-negative
    advantage: object  # correlation / 2
    exhaustive: bool
    channel: NSChannel
    assignment: PlayerAssignment


def best_restriction_search(c: Circuit, f: BoolFn, S: Optional[Sequence[int]] = None,
                            budget: int = DEFAULT_BUDGET, seed: int = 0, arith: str = "f64",
                            tol: Optional[float] = None) -> ReductionResult:
    """Pick the fixing of S^c (and the sign of f) maximizing |corr(f o C_y, PAR_|S|)|.

    Exhaustive when 2^{|S^c|} <= budget; otherwise ``budget`` fixings drawn from
    a seeded stream.  Ties go to the lexicographically smallest fixing.
    """
    if S is None:
        S = greedy_independent_set(conflict_graph(c))
    S = tuple(sorted(S))
    width = c.n - len(S)
    total = 1 << width
    exhaustive = total <= budget
    if exhaustive:
        values = range(total)
    else:
        rng = stream(seed, "restriction-search", c.n, S)
        values = sorted({int(v) for v in rng.integers(0, total, size=budget)})
    fixings = sorted(fixing_bits(v, width) for v in values)
    corrs = restricted_correlations(c, f, S, fixings, arith, tol)
    # fixings are sorted, so the first maximizer is the lexicographically smallest
    top = max(abs(v) for v in corrs)
    best = next(i for i, v in enumerate(corrs) if abs(v) == top)
    corr = corrs[best]
    sign = -1 if corr < 0 else 1
    ch = extract_channel(c, S, fixings[best], arith, tol)
    assignment, _ = player_assignment(c, S)
    return ReductionResult(S, fixings[best], sign, abs(corr), abs(corr) / 2, exhaustive, ch, assignment)


__all__ = [
    "ConflictGraph", "ReductionResult", "PlayerAssignment", "ExtractionError",
    "lightcones", "conflict_graph", "greedy_independent_set", "extract_channel",
    "best_restriction_search", "averaging_identity", "restricted_correlations",
    "input_expectations", "circuit_table", "embed", "fixing_bits", "player_assignment",
]
