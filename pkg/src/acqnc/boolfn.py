"""Real-valued functions on the Boolean cube, their Fourier spectra,
restrictions and decision trees.

Conventions used across the package:

* A point of {+1,-1}^n is encoded as an integer mask.  Bit ``i`` of the
  mask is 0 when ``x_i = +1`` and 1 when ``x_i = -1``.  Bit 0 is the first
  variable.  Subsets S of [n] are encoded as masks in the same bit order.
* Variables are 0-based in the Python API and 1-based in the text formats.
* Exact values are stored as ``fractions.Fraction`` in object arrays; any
  float input switches a function to the double-precision path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from ._rng import stream

MAX_ARITY = 20
STAR = "*"

Number = Union[int, float, Fraction]


def popcount(mask: int) -> int:
    return int(mask).bit_count()


def mask_to_point(mask: int, n: int) -> tuple[int, ...]:
    return tuple(-1 if (mask >> i) & 1 else 1 for i in range(n))


def point_to_mask(x: Sequence[int]) -> int:
    mask = 0
    for i, xi in enumerate(x):
        if xi == -1:
            mask |= 1 << i
        elif xi != 1:
            raise ValueError(f"coordinate {i} is {xi!r}, expected +1 or -1")
    return mask


def subset_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def mask_indices(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def parity_signs(n: int) -> np.ndarray:
    """PAR_n as an int array indexed by input mask."""
    bits = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts += (bits >> i) & 1
    return 1 - 2 * (counts & 1)


def as_values(values: Iterable[Number]) -> np.ndarray:
    """Object array of Fractions when every entry is rational, else float64."""
    vals = list(values)
    if all(isinstance(v, (Rational, Fraction)) and not isinstance(v, bool) for v in vals):
        arr = np.empty(len(vals), dtype=object)
        arr[:] = [Fraction(v) for v in vals]
        return arr
    return np.asarray([float(v) for v in vals], dtype=np.float64)


def is_exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def is_zero(value, tol: float = 0.0) -> bool:
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) <= tol


class BoolFn:
    """Dense truth table of f: {+1,-1}^n -> R, indexed by input mask."""

    __slots__ = ("n", "values", "range")

    def __init__(self, n: int, values: Iterable[Number], range: str = "real"):
        if not 0 <= n <= MAX_ARITY:
            raise ValueError(f"arity {n} outside [0, {MAX_ARITY}]")
        arr = values if isinstance(values, np.ndarray) and values.dtype in (object, np.float64) \
            else as_values(values)
        if arr.dtype == object and any(not isinstance(v, Fraction) for v in arr):
            arr = as_values(arr)
        if arr.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} values, got {arr.shape[0]}")
        if range not in ("pm1", "real"):
            raise ValueError(f"unknown range tag {range!r}")
        if range == "pm1" and not all(v == 1 or v == -1 for v in arr):
            raise ValueError("pm1 function has a value other than +1/-1")
        arr = arr.copy()
        arr.setflags(write=False)
        self.n = n
        self.values = arr
        self.range = range

    @property
    def exact(self) -> bool:
        return is_exact(self.values)

    def __call__(self, x: Union[int, Sequence[int]]):
        mask = x if isinstance(x, (int, np.integer)) else point_to_mask(x)
        return self.values[mask]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoolFn) or other.n != self.n:
            return NotImplemented
        return bool(np.all(self.values == other.values))

    def __neg__(self) -> "BoolFn":
        return BoolFn(self.n, -self.values, self.range)

    def __repr__(self) -> str:
        return f"BoolFn(n={self.n}, range={self.range}, exact={self.exact})"

    def as_float(self) -> np.ndarray:
        return self.values.astype(np.float64)

    def to_01(self) -> np.ndarray:
        """Standard identification +1 -> 0, -1 -> 1 (pm1 functions only)."""
        if self.range != "pm1":
            raise ValueError("0/1 identification needs a pm1 function")
        return (1 - self.as_float().astype(np.int64)) // 2


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    n: int
    coefficients: np.ndarray

    @property
    def exact(self) -> bool:
        return is_exact(self.coefficients)

    def __getitem__(self, S: int):
        return self.coefficients[S]

    def degree(self, tol: float = 1e-12) -> int:
        """Largest |S| with a nonzero coefficient (-1 for the zero function)."""
        deg = -1
        for S, c in enumerate(self.coefficients):
            if not is_zero(c, tol):
                deg = max(deg, popcount(S))
        return deg

    def nonzero(self, tol: float = 1e-12) -> list[tuple[int, Number]]:
        return [(S, c) for S, c in enumerate(self.coefficients) if not is_zero(c, tol)]


# -- constructors ------------------------------------------------------------

def from_callable(n: int, fn: Callable[[tuple[int, ...]], Number], range: str = "pm1") -> BoolFn:
    return BoolFn(n, [fn(mask_to_point(m, n)) for m in range(1 << n)], range)


def constant(n: int, c: Number = 1) -> BoolFn:
    return BoolFn(n, [c] * (1 << n), "pm1" if c in (1, -1) else "real")


def character(n: int, S: int) -> BoolFn:
    """chi_S(x) = prod_{i in S} x_i, with S a subset mask."""
    return BoolFn(n, [1 - 2 * (popcount(m & S) & 1) for m in range(1 << n)], "pm1")


def parity(n: int) -> BoolFn:
    return character(n, (1 << n) - 1)


def dictator(n: int, i: int) -> BoolFn:
    return character(n, 1 << i)


def trojan_horse(m: int) -> BoolFn:
    """h on 2m bits: PAR of the first m bits when the last m bits are all -1, else +1.

    The trigger block uses the bit identification 1 -> -1, so fixing the
    trailing block to ones (bits) gives back PAR_m.
    """
    n = 2 * m
    low = (1 << m) - 1
    vals = []
    for mask in range(1 << n):
        if mask >> m == low:
            vals.append(1 - 2 * (popcount(mask & low) & 1))
        else:
            vals.append(1)
    return BoolFn(n, vals, "pm1")


def random_pm1(n: int, seed: int, *labels) -> BoolFn:
    rng = stream(seed, "random_pm1", n, *labels)
    return BoolFn(n, [int(v) for v in rng.choice([-1, 1], size=1 << n)], "pm1")


# -- Fourier analysis ----------------------------------------------------------

def _butterfly(arr: np.ndarray) -> np.ndarray:
    a = arr.copy()
    n = a.size.bit_length() - 1
    for i in range(n):
        v = a.reshape(-1, 2, 1 << i)
        lo = v[:, 0, :].copy()
        hi = v[:, 1, :].copy()
        v[:, 0, :] = lo + hi
        v[:, 1, :] = lo - hi
    return a


def wht(f: BoolFn) -> FourierSpectrum:
    """Fourier coefficients f^(S) = E_x[f(x) chi_S(x)], in O(n 2^n)."""
    coeffs = _butterfly(f.values)
    scale = 1 << f.n
    coeffs = coeffs / scale if f.exact else coeffs / float(scale)
    coeffs.setflags(write=False)
    return FourierSpectrum(f.n, coeffs)


def inverse_wht(spec: FourierSpectrum, range: str = "real") -> BoolFn:
    return BoolFn(spec.n, _butterfly(spec.coefficients), range)


def fourier_tail(spec: FourierSpectrum, k: int):
    """W^{>=k}[f] = sum over |S| >= k of f^(S)^2."""
    if not 0 <= k <= spec.n + 1:
        raise ValueError(f"tail level {k} outside [0, {spec.n + 1}]")
    total = Fraction(0) if spec.exact else 0.0
    for S, c in enumerate(spec.coefficients):
        if popcount(S) >= k:
            total += c * c
    return total


def correlation(f: BoolFn, g: BoolFn):
    """E_x[f(x) g(x)] under the uniform distribution."""
    if f.n != g.n:
        raise ValueError(f"arity mismatch: {f.n} vs {g.n}")
    total = np.sum(f.values * g.values)
    if f.exact and g.exact:
        return Fraction(total) / (1 << f.n)
    return float(total) / (1 << f.n)


# -- restrictions ------------------------------------------------------------

@dataclass(frozen=True)
class Restriction:
    """Each coordinate is +1, -1 or STAR (left free)."""

    assignment: tuple

    def __post_init__(self):
        for a in self.assignment:
            if a not in (1, -1, STAR):
                raise ValueError(f"bad restriction symbol {a!r}")

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def stars(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.assignment) if a == STAR)

    def fill(self, z: Sequence[int]) -> tuple[int, ...]:
        """Substitute the free coordinates by z, in order."""
        it = iter(z)
        return tuple(next(it) if a == STAR else a for a in self.assignment)

    def __str__(self) -> str:
        return "".join({1: "+", -1: "-", STAR: "*"}[a] for a in self.assignment)


def restrict(f: BoolFn, rho: Restriction) -> BoolFn:
    if rho.n != f.n:
        raise ValueError(f"restriction arity {rho.n} != function arity {f.n}")
    stars = rho.stars
    base = point_to_mask([1 if a == STAR else a for a in rho.assignment])
    k = len(stars)
    idx = np.empty(1 << k, dtype=np.int64)
    for z in range(1 << k):
        m = base
        for j, i in enumerate(stars):
            if (z >> j) & 1:
                m |= 1 << i
        idx[z] = m
    return BoolFn(k, f.values[idx], f.range)


def sample_restriction(n: int, delta: float, seed: int) -> Restriction:
    """Each coordinate is free with probability delta, else a uniform sign."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"star probability {delta} outside [0, 1]")
    rng = stream(seed, "restriction", n)
    free = rng.random(n) < delta
    signs = rng.choice([1, -1], size=n)
    return Restriction(tuple(STAR if s else int(v) for s, v in zip(free, signs)))


def permute_inputs(f: BoolFn, pi: Sequence[int]) -> BoolFn:
    """g(x) = f(x o pi), i.e. g(x)_i reads x_{pi(i)}; pi is 0-based."""
    n = f.n
    if sorted(pi) != list(range(n)):
        raise ValueError(f"{list(pi)} is not a permutation of range({n})")
    src = np.zeros(1 << n, dtype=np.int64)
    masks = np.arange(1 << n, dtype=np.int64)
    for i in range(n):
        src |= ((masks >> pi[i]) & 1) << i
    return BoolFn(n, f.values[src], f.range)


# -- decision trees ----------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    value: int


@dataclass(frozen=True)
class Node:
    var: int
    left: "DecisionTree"  # taken when the variable is +1
    right: "DecisionTree"  # taken when the variable is -1


DecisionTree = Union[Leaf, Node]


def eval_dt(tree: DecisionTree, x: Union[int, Sequence[int]]) -> int:
    """Evaluate on a +-1 point or an input mask."""
    if isinstance(x, (int, np.integer)):
        get = lambda i: -1 if (x >> i) & 1 else 1  # noqa: E731
    else:
        get = x.__getitem__
    while isinstance(tree, Node):
        tree = tree.left if get(tree.var) == 1 else tree.right
    return tree.value


def dt_depth(tree: DecisionTree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(dt_depth(tree.left), dt_depth(tree.right))


def dt_variables(tree: DecisionTree) -> set[int]:
    if isinstance(tree, Leaf):
        return set()
    return {tree.var} | dt_variables(tree.left) | dt_variables(tree.right)


def tree_function(tree: DecisionTree, n: int) -> BoolFn:
    return BoolFn(n, [eval_dt(tree, m) for m in range(1 << n)], "pm1")


def canonical_tree(f: BoolFn) -> DecisionTree:
    """Query x_1, x_2, ... in order; subtrees with equal children collapse."""
    if f.range != "pm1":
        raise ValueError("decision trees carry +-1 leaves")

    def build(i: int, prefix: int) -> DecisionTree:
        if i == f.n:
            return Leaf(int(f.values[prefix]))
        left = build(i + 1, prefix)
        right = build(i + 1, prefix | (1 << i))
        return left if left == right else Node(i, left, right)

    return build(0, 0)


def parity_tree(variables: Sequence[int], sign: int = 1) -> DecisionTree:
    """Full tree computing sign * prod of the given variables."""
    if not variables:
        return Leaf(sign)
    v, rest = variables[0], variables[1:]
    return Node(v, parity_tree(rest, sign), parity_tree(rest, -sign))


def has_repeated_queries(tree: DecisionTree, seen: frozenset = frozenset()) -> bool:
    if isinstance(tree, Leaf):
        return False
    if tree.var in seen:
        return True
    seen = seen | {tree.var}
    return has_repeated_queries(tree.left, seen) or has_repeated_queries(tree.right, seen)


def canonicalize(tree: DecisionTree, fixed: dict | None = None) -> DecisionTree:
    """Drop queries of variables already fixed on the path; collapse equal children."""
    fixed = fixed or {}
    if isinstance(tree, Leaf):
        return tree
    if tree.var in fixed:
        return canonicalize(tree.left if fixed[tree.var] == 1 else tree.right, fixed)
    left = canonicalize(tree.left, {**fixed, tree.var: 1})
    right = canonicalize(tree.right, {**fixed, tree.var: -1})
    return left if left == right else Node(tree.var, left, right)


def random_tree(num_vars: int, depth: int, seed: int, *labels, repeats: bool = False) -> DecisionTree:
    """Seeded random tree; internal nodes stop early with probability 1/4."""
    rng = stream(seed, "random_tree", num_vars, depth, *labels)

    def grow(d: int, used: frozenset) -> DecisionTree:
        pool = list(range(num_vars)) if repeats else [v for v in range(num_vars) if v not in used]
        if d == 0 or not pool or rng.random() < 0.25:
            return Leaf(int(rng.choice([1, -1])))
        v = int(rng.choice(pool))
        return Node(v, grow(d - 1, used | {v}), grow(d - 1, used | {v}))

    return grow(depth, frozenset())
