"""No-signaling channels as dense probability tables.

A channel maps n input bits to a distribution over N output bits.  ``table[x, y]``
is P(y | x) with x and y masks (bit i set means coordinate i is -1).  ``B[j]`` is
the input that output j may depend on, or ``None`` for a referee output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import config
from ._rng import stream
from .boolfn import STAR, BoolFn, Restriction, mask_to_point, parity_signs, popcount, restrict
from .lp import LPInstance, solve_lp

MAX_RAT_SIZE = 16
MAX_F64_SIZE = 20
MAX_CHECK_INPUTS = 8


def _as_table(table) -> np.ndarray:
    arr = np.asarray(table)
    if arr.dtype == object:
        if all(isinstance(v, Fraction) for v in arr.flat):
            return arr
        if all(isinstance(v, (int, Fraction)) for v in arr.flat):
            out = np.empty(arr.shape, dtype=object)
            out.flat[:] = [Fraction(v) for v in arr.flat]
            return out
        return arr.astype(np.float64)
    if np.issubdtype(arr.dtype, np.integer):
        out = np.empty(arr.shape, dtype=object)
        out.flat[:] = [Fraction(int(v)) for v in arr.flat]
        return out
    return arr.astype(np.float64)


def _same(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    if a.dtype == object and b.dtype == object:
        return bool(np.all(a == b))
    return bool(np.max(np.abs(a.astype(np.float64) - b.astype(np.float64)), initial=0.0) <= tol)


def _marginal(table: np.ndarray, N: int, T: Sequence[int]) -> np.ndarray:
    """Marginalize each row of a (rows, 2^N) table onto the sorted output set T."""
    rows = table.shape[0]
    keep = set(T)
    axes = tuple(1 + (N - 1 - j) for j in range(N) if j not in keep)
    t = table.reshape((rows,) + (2,) * N)
    if axes:
        t = t.sum(axis=axes)
    return t.reshape(rows, 1 << len(keep))


@dataclass(frozen=True, eq=False)
class NSChannel:
    n: int
    N: int
    B: tuple
    table: np.ndarray
    no_signaling: bool = False
    degenerate_rows: frozenset = frozenset()

    def __post_init__(self):
        table = _as_table(self.table)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "B", tuple(None if b is None else int(b) for b in self.B))
        if table.shape != (1 << self.n, 1 << self.N):
            raise ValueError(f"table shape {table.shape} != ({1 << self.n}, {1 << self.N})")
        if len(self.B) != self.N:
            raise ValueError(f"lightcone map has {len(self.B)} entries, expected {self.N}")
        for b in self.B:
            if b is not None and not 0 <= b < self.n:
                raise ValueError(f"lightcone entry {b} outside [0, {self.n})")
        limit = MAX_RAT_SIZE if self.exact else MAX_F64_SIZE
        config.check_guard("channel_size", self.n + self.N, limit)
        if self.exact:
            if any(v < 0 for v in table.flat):
                raise ValueError("negative probability")
            sums = table.sum(axis=1)
            bad = [x for x, s in enumerate(sums) if s != 1]
            if bad:
                raise ValueError(f"row {bad[0]} sums to {sums[bad[0]]}, not 1")
        else:
            if (table < -config.STRUCTURAL).any():
                raise ValueError("negative probability")
            err = np.abs(table.sum(axis=1) - 1.0)
            if (err > config.STRUCTURAL).any():
                raise ValueError(f"row {int(np.argmax(err))} does not sum to 1")
        table.setflags(write=False)

    @property
    def exact(self) -> bool:
        return self.table.dtype == object

    def row(self, x: int) -> np.ndarray:
        return self.table[x]

    def outputs_of(self, player) -> tuple[int, ...]:
        return tuple(j for j, b in enumerate(self.B) if b == player)

    def lightcone_inputs(self, T: Sequence[int]) -> frozenset:
        return frozenset(self.B[j] for j in T if self.B[j] is not None)

    def as_float(self) -> "NSChannel":
        return NSChannel(self.n, self.N, self.B, self.table.astype(np.float64),
                         self.no_signaling, self.degenerate_rows)

    def same_as(self, other: "NSChannel", tol: float = 0.0) -> bool:
        return (self.n, self.N, self.B) == (other.n, other.N, other.B) \
            and _same(self.table, other.table, tol)


@dataclass(frozen=True, eq=False)
class OutputDistribution:
    N: int
    probabilities: np.ndarray

    def __post_init__(self):
        p = _as_table(np.asarray(self.probabilities).reshape(1, -1))[0]
        object.__setattr__(self, "probabilities", p)
        if p.shape != (1 << self.N,):
            raise ValueError(f"expected {1 << self.N} probabilities")
        total = p.sum()
        if (total != 1) if p.dtype == object else abs(total - 1) > config.STRUCTURAL:
            raise ValueError(f"distribution sums to {total}")

    @property
    def exact(self) -> bool:
        return self.probabilities.dtype == object

    def marginal(self, T: Sequence[int]) -> np.ndarray:
        return _marginal(self.probabilities.reshape(1, -1), self.N, sorted(T))[0]


@dataclass(frozen=True)
class ParityGame:
    """Players 0..n-1 own output bits [i*k, (i+1)*k); the last m bits are the referee's."""

    n: int
    k: int
    m: int
    f: BoolFn

    def __post_init__(self):
        if self.f.range != "pm1":
            raise ValueError("game predicate must be pm1")
        if self.f.n != self.k * self.n + self.m:
            raise ValueError(f"predicate arity {self.f.n} != k*n + m = {self.k * self.n + self.m}")

    @property
    def N(self) -> int:
        return self.k * self.n + self.m

    @property
    def B(self) -> tuple:
        return block_map(self.n, self.k, self.m)


def block_map(n: int, k: int, m: int = 0) -> tuple:
    return tuple(j // k for j in range(n * k)) + (None,) * m


# -- verification ------------------------------------------------------------

@dataclass(frozen=True)
class SignalingWitness:
    S: frozenset
    x: int
    x_prime: int
    T: tuple


@dataclass(frozen=True)
class NSCheck:
    ok: bool
    witness: Optional[SignalingWitness] = None

    def __bool__(self) -> bool:
        return self.ok


def _subsets_by_size(n: int):
    for size in range(n + 1):
        for combo in combinations(range(n), size):
            yield combo


def is_no_signaling(ch: NSChannel, tol: Optional[float] = None) -> NSCheck:
    """Check the definition over every S; the witness has the smallest |S|."""
    config.check_guard("nsc_check_inputs", ch.n, MAX_CHECK_INPUTS)
    tol = config.logical(tol)
    for S in _subsets_by_size(ch.n):
        smask = sum(1 << i for i in S)
        Sset = frozenset(S)
        T = tuple(j for j, b in enumerate(ch.B) if b is None or b in Sset)
        red = _marginal(ch.table, ch.N, T)
        rep: dict[int, int] = {}
        for x in range(1 << ch.n):
            key = x & smask
            if key not in rep:
                rep[key] = x
            elif not _same(red[rep[key]], red[x], tol):
                return NSCheck(False, SignalingWitness(Sset, rep[key], x, T))
    return NSCheck(True)


# -- reduction, conditioning, pushforward -----------------------------------

def reduce(ch: NSChannel, T: Sequence[int]) -> NSChannel:
    T = sorted(set(T))
    for j in T:
        if not 0 <= j < ch.N:
            raise ValueError(f"output {j} outside [0, {ch.N})")
    return NSChannel(ch.n, len(T), tuple(ch.B[j] for j in T), _marginal(ch.table, ch.N, T),
                     ch.no_signaling, ch.degenerate_rows)


def condition(ch: NSChannel, J: Sequence[int], Y: Sequence[int],
              x_fix: Optional[tuple[int, int]] = None) -> NSChannel:
    """N^{[N] minus J}(x | y_J = Y), optionally with input b fixed to X via x_fix = (b, X).

    Outputs whose lightcone is the fixed input become referee outputs.  Rows
    where the event has probability zero get the uniform conditional and are
    listed in ``degenerate_rows``.
    """
    J = list(J)
    Y = list(Y)
    if len(J) != len(Y) or len(set(J)) != len(J):
        raise ValueError("J must be distinct outputs with one value each")
    for j, v in zip(J, Y):
        if not 0 <= j < ch.N:
            raise ValueError(f"output {j} outside [0, {ch.N})")
        if v not in (1, -1):
            raise ValueError(f"conditioning value {v} is not +-1")
    t = ch.table.reshape((1 << ch.n,) + (2,) * ch.N)
    index = [slice(None)] * (1 + ch.N)
    for j, v in zip(J, Y):
        index[1 + (ch.N - 1 - j)] = 0 if v == 1 else 1
    t = t[tuple(index)]
    rest = [j for j in range(ch.N) if j not in set(J)]
    joint = t.reshape(1 << ch.n, 1 << len(rest))

    n_new = ch.n
    if x_fix is not None:
        b, X = x_fix
        if not 0 <= b < ch.n or X not in (1, -1):
            raise ValueError(f"bad input fixing {x_fix}")
        bit = 0 if X == 1 else 1
        rows = [x for x in range(1 << ch.n) if (x >> b) & 1 == bit]
        joint = joint[rows]
        n_new = ch.n - 1

    exact = ch.exact
    out = np.empty(joint.shape, dtype=object if exact else np.float64)
    degenerate = []
    width = joint.shape[1]
    for r in range(joint.shape[0]):
        mass = joint[r].sum()
        if (mass == 0) if exact else (mass <= config.STRUCTURAL):
            degenerate.append(r)
            out[r] = Fraction(1, width) if exact else 1.0 / width
        else:
            out[r] = joint[r] / mass
    if len(degenerate) == joint.shape[0]:
        raise ValueError("conditioning event has probability zero for every input")

    B_new = []
    for j in rest:
        bj = ch.B[j]
        if x_fix is not None and bj is not None:
            if bj == x_fix[0]:
                bj = None
            elif bj > x_fix[0]:
                bj -= 1
        B_new.append(bj)
    allowed = {None} if x_fix is None else {None, x_fix[0]}
    ns = ch.no_signaling and all(ch.B[j] in allowed for j in J)
    return NSChannel(n_new, len(rest), tuple(B_new), out, ns, frozenset(degenerate))


def pushforward(ch: NSChannel, input_dist: Sequence) -> OutputDistribution:
    d = _as_table(np.asarray(list(input_dist), dtype=object).reshape(1, -1))[0]
    if d.shape != (1 << ch.n,):
        raise ValueError(f"input distribution needs {1 << ch.n} entries")
    if d.dtype == object and ch.exact:
        probs = np.empty(1 << ch.N, dtype=object)
        probs[:] = [sum((d[x] * ch.table[x, y] for x in range(1 << ch.n) if d[x]), Fraction(0))
                    for y in range(1 << ch.N)]
    else:
        probs = d.astype(np.float64) @ ch.table.astype(np.float64)
    return OutputDistribution(ch.N, probs)


def point_distribution(n: int, x: int) -> list[Fraction]:
    return [Fraction(int(z == x)) for z in range(1 << n)]


def uniform_even(n: int) -> list[Fraction]:
    par = parity_signs(n)
    return [Fraction(2, 1 << n) if p == 1 else Fraction(0) for p in par]


def uniform_odd(n: int) -> list[Fraction]:
    if n == 0:
        raise ValueError("no odd strings on zero bits")
    par = parity_signs(n)
    return [Fraction(2, 1 << n) if p == -1 else Fraction(0) for p in par]


def even_odd_pushforwards(ch: NSChannel) -> tuple[OutputDistribution, OutputDistribution]:
    return pushforward(ch, uniform_even(ch.n)), pushforward(ch, uniform_odd(ch.n))


# -- indistinguishability ----------------------------------------------------

def _check_pair(mu: OutputDistribution, nu: OutputDistribution) -> float:
    if mu.N != nu.N:
        raise ValueError(f"arity mismatch {mu.N} != {nu.N}")
    return 0.0 if (mu.exact and nu.exact) else config.LOGICAL


def kwise_level(mu: OutputDistribution, nu: OutputDistribution, tol: Optional[float] = None) -> int:
    """Largest k with mu_S = nu_S for every |S| <= k."""
    tol = _check_pair(mu, nu) if tol is None else tol
    for k in range(1, mu.N + 1):
        for S in combinations(range(mu.N), k):
            if not _same(mu.marginal(S), nu.marginal(S), tol):
                return k - 1
    return mu.N


def blockwise_level(mu: OutputDistribution, nu: OutputDistribution, k: int,
                    tol: Optional[float] = None) -> int:
    """Largest b such that every union of at most b consecutive size-k blocks agrees."""
    tol = _check_pair(mu, nu) if tol is None else tol
    if k <= 0 or mu.N % k:
        raise ValueError(f"block size {k} does not divide {mu.N}")
    nb = mu.N // k
    for b in range(1, nb + 1):
        for blocks in combinations(range(nb), b):
            S = [blk * k + i for blk in blocks for i in range(k)]
            if not _same(mu.marginal(S), nu.marginal(S), tol):
                return b - 1
    return nb


# -- the no-signaling polytope -----------------------------------------------

MAX_GAME_PLAYERS = 4
MAX_GAME_WIDTH = 2
MAX_GAME_REFEREE = 2


def _check_game_size(n: int, k: int, m: int) -> None:
    config.check_guard("game_players", n, MAX_GAME_PLAYERS)
    config.check_guard("game_width", k, MAX_GAME_WIDTH)
    config.check_guard("game_referee", m, MAX_GAME_REFEREE)


def _polytope_lp(n: int, k: int, m: int, objective) -> LPInstance:
    """Variables P(y|x) at index x * 2^N + y.

    Equal marginals under single-player flips generate every constraint of
    the definition: x and x' agreeing on S differ by a chain of flips outside S.
    """
    N = n * k + m
    size = 1 << N
    lp = LPInstance((1 << n) * size, objective)
    for x in range(1 << n):
        lp.add({x * size + y: 1 for y in range(size)}, "=", 1)
    for p in range(n):
        others = [j for j in range(N) if not p * k <= j < (p + 1) * k]
        for x in range(1 << n):
            if (x >> p) & 1:
                continue
            xp = x | (1 << p)
            for t in range(1 << len(others)):
                row = {}
                for y in range(size):
                    if all(((y >> j) & 1) == ((t >> r) & 1) for r, j in enumerate(others)):
                        row[x * size + y] = 1
                        row[xp * size + y] = -1
                lp.add(row, "=", 0)
    return lp


def _vertex_channel(n: int, k: int, m: int, objective) -> tuple[Fraction, NSChannel]:
    lp = _polytope_lp(n, k, m, objective)
    res = solve_lp(lp)
    if res.status != "optimal":
        raise AssertionError(f"no-signaling LP returned {res.status}")
    N = n * k + m
    table = np.empty((1 << n, 1 << N), dtype=object)
    table.flat[:] = list(res.x)
    ch = NSChannel(n, N, block_map(n, k, m), table)
    if not is_no_signaling(ch):
        raise AssertionError("LP vertex violates no-signaling")
    return res.value, NSChannel(n, N, ch.B, table, True)


def game_objective(g: ParityGame) -> list[Fraction]:
    par = parity_signs(g.n)
    size = 1 << g.N
    w = Fraction(1, 1 << g.n)
    return [w if g.f.values[y] == par[x] else Fraction(0)
            for x in range(1 << g.n) for y in range(size)]


def game_value_nosignaling(g: ParityGame) -> tuple[Fraction, NSChannel]:
    """Exact max over no-signaling strategies of Pr_x[f(y) = PAR(x)]."""
    _check_game_size(g.n, g.k, g.m)
    return _vertex_channel(g.n, g.k, g.m, game_objective(g))


def game_value(g: ParityGame, ch: NSChannel):
    """Winning probability of a given strategy channel."""
    par = parity_signs(g.n)
    total = Fraction(0) if ch.exact else 0.0
    for x in range(1 << g.n):
        hits = [y for y in range(1 << g.N) if g.f.values[y] == par[x]]
        total += ch.table[x, hits].sum()
    return total / (1 << g.n)



def best_referee_outcome(g: ParityGame, ch: NSChannel) -> tuple[int, object, object]:
    """Referee outcome r maximizing the conditional winning probability.

    Returns (r, Pr[r], conditional value); r is a mask over the referee bits and
    ties go to the smallest r.  Averaging the conditional values with weights
    Pr[r] gives game_value(g, ch) back.
    """
    if g.m == 0:
        return 0, Fraction(1) if ch.exact else 1.0, game_value(g, ch)
    nk = g.n * g.k
    ref = list(range(nk, g.N))
    marg = _marginal(ch.table, ch.N, ref)[0]
    best = None
    for r in range(1 << g.m):
        if not marg[r]:
            continue
        Y = [-1 if (r >> t) & 1 else 1 for t in range(g.m)]
        sub = condition(ch, ref, Y)
        rho = Restriction((STAR,) * nk + tuple(Y))
        value = game_value(ParityGame(g.n, g.k, 0, restrict(g.f, rho)), sub)
        if best is None or value > best[2]:
            best = (r, marg[r], value)
    return best

# -- generators --------------------------------------------------------------

def deterministic_local_channel(n: int, k: int, strategies: Sequence[tuple[int, int]],
                                referee: int = 0, m: int = 0) -> NSChannel:
    """Player i answers strategies[i][0] on input +1 and strategies[i][1] on -1."""
    N = n * k + m
    table = np.empty((1 << n, 1 << N), dtype=object)
    table[:] = Fraction(0)
    for x in range(1 << n):
        y = referee << (n * k)
        for i, (a, b) in enumerate(strategies):
            y |= (b if (x >> i) & 1 else a) << (i * k)
        table[x, y] = Fraction(1)
    return NSChannel(n, N, block_map(n, k, m), table, True)


def mixture(channels: Sequence[NSChannel], weights: Sequence) -> NSChannel:
    weights = [Fraction(w) for w in weights]
    if sum(weights) != 1 or any(w < 0 for w in weights):
        raise ValueError("mixture weights must be a probability vector")
    first = channels[0]
    table = sum((w * c.table for w, c in zip(weights, channels)), np.zeros_like(first.table))
    return NSChannel(first.n, first.N, first.B, table, all(c.no_signaling for c in channels))


def random_nosignaling_channel(n: int, k: int, seed: int, method: str = "shared-randomness",
                               m: int = 0) -> NSChannel:
    if method == "shared-randomness":
        config.check_guard("channel_size", n + n * k + m, MAX_RAT_SIZE)
        rng = stream(seed, "nsc", "shared", n, k, m)
        r = int(rng.integers(1, 5))
        raw = [int(v) for v in rng.integers(1, 10, size=r)]
        weights = [Fraction(v, sum(raw)) for v in raw]
        parts = []
        for _ in range(r):
            strat = [(int(rng.integers(1 << k)), int(rng.integers(1 << k))) for _ in range(n)]
            parts.append(deterministic_local_channel(n, k, strat, int(rng.integers(1 << m)), m))
        return mixture(parts, weights)
    if method == "polytope-vertex":
        _check_game_size(n, k, m)
        rng = stream(seed, "nsc", "vertex", n, k, m)
        size = (1 << n) * (1 << (n * k + m))
        objective = [int(v) for v in rng.integers(-4, 5, size=size)]
        return _vertex_channel(n, k, m, objective)[1]
    raise ValueError(f"unknown generator {method!r}")


def identity_channel(n: int) -> NSChannel:
    return deterministic_local_channel(n, 1, [(0, 1)] * n)


def parity_channel(n: int) -> NSChannel:
    """Even inputs give uniform even strings, odd inputs uniform odd strings."""
    par = parity_signs(n)
    w = Fraction(2, 1 << n) if n else Fraction(1)
    table = np.empty((1 << n, 1 << n), dtype=object)
    for x in range(1 << n):
        for y in range(1 << n):
            table[x, y] = w if par[x] == par[y] else Fraction(0)
    return NSChannel(n, n, tuple(range(n)), table, True)


def pr_box() -> NSChannel:
    """y1 XOR y2 = x1 AND x2 on bits, uniform marginals."""
    table = np.empty((4, 4), dtype=object)
    for x in range(4):
        target = 1 if x == 3 else 0
        for y in range(4):
            table[x, y] = Fraction(1, 2) if (popcount(y) & 1) == target else Fraction(0)
    return NSChannel(2, 2, (0, 1), table, True)


# -- quantum channels ---------------------------------------------------------

def _kron_all(mats):
    out = mats[0]
    for M in mats[1:]:
        out = np.kron(out, M)
    return out


def _check_povm(ops, dim: int, label: str) -> None:
    total = np.zeros((dim, dim), dtype=complex)
    for E in ops:
        E = np.asarray(E, dtype=complex)
        if E.shape != (dim, dim):
            raise ValueError(f"{label}: element shape {E.shape} != ({dim}, {dim})")
        if np.max(np.abs(E - E.conj().T)) > 1e-10 or np.linalg.eigvalsh(E).min() < -1e-10:
            raise ValueError(f"{label}: element is not positive semidefinite")
        total += E
    if np.max(np.abs(total - np.eye(dim))) > 1e-10:
        raise ValueError(f"{label}: elements do not sum to the identity")
    if len(ops) & (len(ops) - 1):
        raise ValueError(f"{label}: outcome count {len(ops)} is not a power of two")


def quantum_channel(state, party_spaces: Sequence[int], povms, referee_povm=None,
                    exact: bool = False) -> NSChannel:
    """P(y|x) = <psi| (x)_i M^{y_i}_{i, x_i} (x) M^{y_ref}_ref |psi>.

    ``party_spaces`` lists tensor factor dimensions with party 0 first; when a
    referee POVM is given its space is the last factor.  ``povms[i][b]`` is the
    outcome list of party i on input bit b (0 for +1).  With ``exact=True``
    entries may be sympy expressions and probabilities must come out rational.
    """
    n = len(povms)
    dims = list(party_spaces)
    if len(dims) != n + (referee_povm is not None):
        raise ValueError("party_spaces must list one dimension per party (plus the referee)")
    D = int(np.prod(dims))
    psi_num = np.asarray([complex(v) for v in state], dtype=complex)
    if psi_num.shape != (D,):
        raise ValueError(f"state dimension {psi_num.shape[0]} != {D}")
    if abs(np.vdot(psi_num, psi_num) - 1) > 1e-10:
        raise ValueError("state is not normalized")
    widths = set()
    for i, per_input in enumerate(povms):
        if len(per_input) != 2:
            raise ValueError(f"party {i} needs one POVM per input bit")
        for b, ops in enumerate(per_input):
            _check_povm([np.asarray(np.array(E, dtype=complex)) for E in ops], dims[i], f"party {i} input {b}")
            widths.add(len(ops))
    if len(widths) != 1:
        raise ValueError("all parties must have the same number of outcomes")
    k = (widths.pop()).bit_length() - 1
    m = 0
    if referee_povm is not None:
        _check_povm([np.array(E, dtype=complex) for E in referee_povm], dims[-1], "referee")
        m = len(referee_povm).bit_length() - 1
    N = n * k + m
    ref_ops = list(referee_povm) if referee_povm is not None else [None]

    if exact:
        import sympy

        psi = sympy.Matrix(list(state))
        rho = psi * psi.H
        table = np.empty((1 << n, 1 << N), dtype=object)
        for x in range(1 << n):
            for y in range(1 << N):
                mats = [sympy.Matrix(povms[i][(x >> i) & 1][(y >> (i * k)) & ((1 << k) - 1)])
                        for i in range(n)]
                if referee_povm is not None:
                    mats.append(sympy.Matrix(ref_ops[y >> (n * k)]))
                op = mats[0]
                for M in mats[1:]:
                    op = sympy.kronecker_product(op, M)
                val = sympy.nsimplify(sympy.expand((rho * op).trace()))
                if not val.is_Rational:
                    raise ValueError(f"P({y}|{x}) = {val} is not rational")
                table[x, y] = Fraction(int(val.p), int(val.q))
    else:
        table = np.empty((1 << n, 1 << N), dtype=np.float64)
        for x in range(1 << n):
            for y in range(1 << N):
                mats = [np.array(povms[i][(x >> i) & 1][(y >> (i * k)) & ((1 << k) - 1)], dtype=complex)
                        for i in range(n)]
                if referee_povm is not None:
                    mats.append(np.array(ref_ops[y >> (n * k)], dtype=complex))
                table[x, y] = float(np.real(np.vdot(psi_num, _kron_all(mats) @ psi_num)))
        table = np.clip(table, 0.0, None)
        table /= table.sum(axis=1, keepdims=True)
    ch = NSChannel(n, N, block_map(n, k, m), table)
    if not is_no_signaling(ch):
        raise AssertionError("quantum channel failed the no-signaling check")
    return NSChannel(n, N, ch.B, ch.table, True)


def _projectors(direction, exact: bool):
    """(I + n.sigma)/2 and (I - n.sigma)/2 for a real or complex Bloch direction."""
    if exact:
        import sympy

        I2 = sympy.eye(2)
        X = sympy.Matrix([[0, 1], [1, 0]])
        Y = sympy.Matrix([[0, -sympy.I], [sympy.I, 0]])
        Z = sympy.Matrix([[1, 0], [0, -1]])
        a, b, c = (sympy.nsimplify(v) for v in direction)
    else:
        I2 = np.eye(2)
        X = np.array([[0, 1], [1, 0]], dtype=complex)
        Y = np.array([[0, -1j], [1j, 0]])
        Z = np.array([[1, 0], [0, -1]], dtype=complex)
        a, b, c = (float(v) for v in direction)
    obs = a * X + b * Y + c * Z
    return [(I2 + obs) / 2, (I2 - obs) / 2]


def ghz_channel(exact: bool = True) -> NSChannel:
    """Three parties share (|000> + |111>)/sqrt2 and measure X on +1, Y on -1."""
    if exact:
        import sympy
        amp = 1 / sympy.sqrt(2)
        state = [amp] + [0] * 6 + [amp]
    else:
        state = [2 ** -0.5] + [0] * 6 + [2 ** -0.5]
    X = _projectors((1, 0, 0), exact)
    Y = _projectors((0, 1, 0), exact)
    return quantum_channel(state, [2, 2, 2], [[X, Y]] * 3, exact=exact)


def singlet_channel(exact: bool = True) -> NSChannel:
    """Singlet with Alice measuring Z / X and Bob along (+-3/5, 0, 4/5) (exact) or
    at the usual 45-degree CHSH angles (float)."""
    if exact:
        import sympy
        amp = 1 / sympy.sqrt(2)
        state = [0, amp, -amp, 0]
        bob = [_projectors((Fraction(3, 5), 0, Fraction(4, 5)), True),
               _projectors((Fraction(-3, 5), 0, Fraction(4, 5)), True)]
    else:
        s = 2 ** -0.5
        state = [0, s, -s, 0]
        bob = [_projectors((s, 0, s), False), _projectors((-s, 0, s), False)]
    alice = [_projectors((0, 0, 1), exact), _projectors((1, 0, 0), exact)]
    return quantum_channel(state, [2, 2], [alice, bob], exact=exact)


def chsh_value(ch: NSChannel):
    """Sum over inputs of (-1)^{[x = (-1,-1)]} E[y1 y2 | x] for a two-party channel."""
    total = 0
    for x in range(4):
        corr = sum(ch.table[x, y] * (1 - 2 * (popcount(y) & 1)) for y in range(4))
        total += -corr if x == 3 else corr
    return total


def correlators(ch: NSChannel, x: int) -> dict:
    """E[prod_{j in S} y_j | x] for every output subset S."""
    return {S: sum(ch.table[x, y] * (1 - 2 * (popcount(y & S) & 1)) for y in range(1 << ch.N))
            for S in range(1 << ch.N)}


__all__ = [
    "NSChannel", "OutputDistribution", "ParityGame", "NSCheck", "SignalingWitness",
    "block_map", "is_no_signaling", "reduce", "condition", "pushforward",
    "point_distribution", "uniform_even", "uniform_odd", "even_odd_pushforwards",
    "kwise_level", "blockwise_level", "game_value_nosignaling", "game_value",
    "game_objective", "best_referee_outcome", "deterministic_local_channel", "mixture",
    "random_nosignaling_channel",
    "identity_channel", "parity_channel", "pr_box", "quantum_channel", "ghz_channel",
    "singlet_channel", "chsh_value", "correlators",
]
