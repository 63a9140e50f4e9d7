"""Decision trees over the outputs of a no-signaling channel, rewritten as
distributions over decision trees over its inputs of no greater depth.

One step looks at the root query y_i of the output tree.  A referee output is
sampled from its (input-independent) marginal.  A player output depends on a
single input x_b, so its univariate channel splits into deterministic maps of
x_b; the step emits a one-node tree on x_b whose children continue with the
channel conditioned on x_b and y_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import config
from .boolfn import BoolFn, DecisionTree, Leaf, Node, canonicalize, dt_depth, eval_dt, popcount
from .nsc import NSChannel, condition, is_no_signaling, _marginal

MAX_TREE_DEPTH = 5
MAX_INPUTS = 6


# -- univariate split ------------------------------------------------------------

@dataclass(frozen=True)
class UnivariateDecomposition:
    """Weights of the four maps x -> y: keys are (value on +1, value on -1)."""

    a_pp: Fraction  # (1, 1): constant +1
    a_mm: Fraction  # (-1, -1): constant -1
    a_pm: Fraction  # (1, -1): identity
    a_mp: Fraction  # (-1, 1): negation

    def items(self) -> list[tuple[tuple[int, int], Fraction]]:
        return [((1, 1), self.a_pp), ((-1, -1), self.a_mm), ((1, -1), self.a_pm), ((-1, 1), self.a_mp)]

    def weight(self, L: int, R: int) -> Fraction:
        return dict(self.items())[(L, R)]

    def reconstruct(self) -> tuple[Fraction, Fraction]:
        """(Pr[y=+1 | x=+1], Pr[y=+1 | x=-1])."""
        return self.a_pp + self.a_pm, self.a_pp + self.a_mp


def decompose_univariate(p, q) -> UnivariateDecomposition:
    """Canonical min-based split of the channel with Pr[y=+1|x=+1]=p, Pr[y=+1|x=-1]=q."""
    for v in (p, q):
        if not 0 <= v <= 1:
            raise ValueError(f"probability {v} outside [0, 1]")
    lo, hi = min(p, q), max(p, q)
    return UnivariateDecomposition(lo, 1 - hi, p - lo, q - lo)


# -- hybrid trees ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Composed:
    """tau o ch, with the channel's local inputs and the outputs already consumed.

    ``inputs[j]`` is the original index of local input j; ``fixed_outputs`` maps
    original output indices to the value they were conditioned on, and
    ``outputs[i]`` is the original index of local output i.
    """

    tau: DecisionTree
    ch: NSChannel
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    fixed_outputs: tuple[tuple[int, int], ...] = ()

    @classmethod
    def root(cls, tau: DecisionTree, ch: NSChannel) -> "Composed":
        return cls(tau, ch, tuple(range(ch.n)), tuple(range(ch.N)))

    def plus_probability(self, x: int):
        """Pr[tau(y) = +1] for the original input mask x."""
        local = 0
        for j, orig in enumerate(self.inputs):
            local |= ((x >> orig) & 1) << j
        fixed = dict(self.fixed_outputs)
        total = Fraction(0) if self.ch.exact else 0.0
        row = self.ch.table[local]
        for y in range(1 << self.ch.N):
            if not row[y]:
                continue
            vals = dict(fixed)
            for i, o in enumerate(self.outputs):
                vals[o] = -1 if (y >> i) & 1 else 1
            if _eval_outputs(self.tau, vals) == 1:
                total += row[y]
        return total


def _eval_outputs(tau: DecisionTree, vals: dict) -> int:
    while isinstance(tau, Node):
        tau = tau.left if vals[tau.var] == 1 else tau.right
    return tau.value


@dataclass(frozen=True, eq=False)
class HLeaf:
    payload: Union[Composed, NSChannel, "HybridTree", int]


@dataclass(frozen=True, eq=False)
class HNode:
    var: int
    left: "HybridTree"
    right: "HybridTree"


HybridTree = Union[HLeaf, HNode]


def leaves(t: HybridTree) -> list[HLeaf]:
    if isinstance(t, HLeaf):
        return [t]
    return leaves(t.left) + leaves(t.right)


def _leaf_plus(payload, x: int):
    if isinstance(payload, int):
        return Fraction(int(payload == 1))
    if isinstance(payload, Composed):
        return payload.plus_probability(x)
    if isinstance(payload, NSChannel):
        if payload.N != 1:
            raise ValueError("hybrid leaves hold channels with one output")
        return payload.table[x, 0]
    return hybrid_plus(payload, x)


def hybrid_plus(t: HybridTree, x: int):
    """Pr[T(x) = +1] for a hybrid tree on the original input mask x."""
    while isinstance(t, HNode):
        t = t.left if not (x >> t.var) & 1 else t.right
    return _leaf_plus(t.payload, x)


def hybrid_table(t: HybridTree, n: int) -> list:
    return [hybrid_plus(t, x) for x in range(1 << n)]


def replace_leaf(t: HybridTree, index: int, sub: HybridTree) -> HybridTree:
    """Graft ``sub`` in place of the index-th leaf (left to right)."""
    counter = [index]

    def go(node):
        if isinstance(node, HLeaf):
            if counter[0] == 0:
                counter[0] -= 1
                return sub
            counter[0] -= 1
            return node
        left = go(node.left)
        right = go(node.right)
        return HNode(node.var, left, right)

    if not 0 <= index < len(leaves(t)):
        raise IndexError(f"leaf {index} out of range")
    return go(t)


def flatten(t: HybridTree) -> HybridTree:
    """Substitute nested hybrid trees held in leaves into the outer tree."""
    if isinstance(t, HNode):
        return HNode(t.var, flatten(t.left), flatten(t.right))
    if isinstance(t.payload, (HLeaf, HNode)):
        return flatten(t.payload)
    return t


# -- the decomposition step ------------------------------------------------------

def _is_zero(w, exact: bool) -> bool:
    return w == 0 if exact else abs(w) <= config.STRUCTURAL


def _plus_marginal(ch: NSChannel, i: int) -> np.ndarray:
    return _marginal(ch.table, ch.N, [i])[:, 0]


def step(c: Composed) -> list[tuple[object, HybridTree]]:
    """One expansion of tau o ch into weighted hybrid trees (zero weights dropped)."""
    tau, ch = c.tau, c.ch
    exact = ch.exact
    one = Fraction(1) if exact else 1.0
    if isinstance(tau, Leaf):
        return [(one, HLeaf(tau.value))]
    fixed = dict(c.fixed_outputs)
    if tau.var in fixed:
        child = tau.left if fixed[tau.var] == 1 else tau.right
        return [(one, HLeaf(replace(c, tau=child)))]
    if tau.var not in c.outputs:
        raise ValueError(f"tree queries output {tau.var}, which the channel lacks")
    i = c.outputs.index(tau.var)
    rest = c.outputs[:i] + c.outputs[i + 1:]
    branch = {1: tau.left, -1: tau.right}
    b = ch.B[i]
    out = []
    if b is None:
        plus = _plus_marginal(ch, i)
        if exact and any(v != plus[0] for v in plus):
            raise ValueError(f"referee output {tau.var} depends on the input")
        for w, omega in ((plus[0], 1), (one - plus[0], -1)):
            if _is_zero(w, exact):
                continue
            sub = condition(ch, [i], [omega])
            out.append((w, HLeaf(Composed(branch[omega], sub, c.inputs, rest,
                                          c.fixed_outputs + ((tau.var, omega),)))))
        return out
    plus = _plus_marginal(ch, i)
    p, q = plus[0], plus[1 << b]
    split = decompose_univariate(p, q)
    inputs = c.inputs[:b] + c.inputs[b + 1:]
    for (L, R), a in split.items():
        if _is_zero(a, exact):
            continue
        left = Composed(branch[L], condition(ch, [i], [L], (b, 1)), inputs, rest,
                        c.fixed_outputs + ((tau.var, L),))
        right = Composed(branch[R], condition(ch, [i], [R], (b, -1)), inputs, rest,
                         c.fixed_outputs + ((tau.var, R),))
        out.append((a, HNode(c.inputs[b], HLeaf(left), HLeaf(right))))
    return out


def expand_leaf(t: HybridTree, index: int, tau: Optional[DecisionTree] = None,
                ch: Optional[NSChannel] = None) -> list[tuple[object, HybridTree]]:
    """Apply one step to the index-th leaf and graft each outcome back into t.

    With ``tau`` and ``ch`` given, the leaf is first set to tau o ch.
    """
    leaf = leaves(t)[index]
    payload = Composed.root(tau, ch) if tau is not None else leaf.payload
    if not isinstance(payload, Composed):
        raise ValueError("leaf does not hold a tree-channel composition")
    return [(w, replace_leaf(t, index, sub)) for w, sub in step(payload)]


# -- full decomposition ----------------------------------------------------------

@dataclass(frozen=True)
class TreeDistribution:
    n: int
    entries: tuple[tuple[object, DecisionTree], ...]

    def __post_init__(self):
        total = sum(w for w, _ in self.entries)
        exact = all(isinstance(w, Fraction) for w, _ in self.entries)
        if (total != 1) if exact else abs(total - 1) > config.STRUCTURAL:
            raise ValueError(f"tree weights sum to {total}")
        if any(w < 0 for w, _ in self.entries):
            raise ValueError("negative tree weight")

    @property
    def max_depth(self) -> int:
        return max((dt_depth(t) for _, t in self.entries), default=0)

    def plus_probability(self, x: int):
        return sum((w for w, t in self.entries if eval_dt(t, x) == 1), Fraction(0))

    def __len__(self) -> int:
        return len(self.entries)


def _merge(items) -> list[tuple[object, DecisionTree]]:
    acc: dict = {}
    for w, t in items:
        acc[t] = acc.get(t, 0) + w
    return [(w, t) for t, w in acc.items()]


def _resolve(t: HybridTree) -> list[tuple[object, DecisionTree]]:
    if isinstance(t, HLeaf):
        if isinstance(t.payload, int):
            return [(Fraction(1), Leaf(t.payload))]
        return _expand(t.payload)
    lefts = _resolve(t.left)
    rights = _resolve(t.right)
    return _merge((wl * wr, canonicalize(Node(t.var, tl, tr)))
                  for wl, tl in lefts for wr, tr in rights)


def _expand(c: Composed) -> list[tuple[object, DecisionTree]]:
    items = []
    for w, sub in step(c):
        items.extend((w * w2, t) for w2, t in _resolve(sub))
    return _merge(items)


def decompose(tau: DecisionTree, ch: NSChannel, check: bool = True) -> TreeDistribution:
    """Distribution over input trees matching tau o ch pointwise, depth <= depth(tau)."""
    config.check_guard("tree_depth", dt_depth(tau), MAX_TREE_DEPTH)
    config.check_guard("decompose_inputs", ch.n, MAX_INPUTS)
    if check:
        verdict = is_no_signaling(ch)
        if not verdict:
            raise ValueError(f"channel signals: {verdict.witness}")
        ch = NSChannel(ch.n, ch.N, ch.B, ch.table, True)
    entries = sorted(_expand(Composed.root(tau, ch)), key=lambda e: repr(e[1]))
    return TreeDistribution(ch.n, tuple(entries))


def composed_plus(tau: DecisionTree, ch: NSChannel) -> list:
    """Pr[tau(y) = +1 | x] for every input mask, straight from the table."""
    c = Composed.root(tau, ch)
    return [c.plus_probability(x) for x in range(1 << ch.n)]


@dataclass(frozen=True)
class Verification:
    deviation: object
    max_depth: int
    depth_bound: int

    @property
    def ok(self) -> bool:
        return self.deviation == 0 and self.max_depth <= self.depth_bound


def verify_decomposition(tau: DecisionTree, ch: NSChannel, gamma: TreeDistribution) -> Verification:
    target = composed_plus(tau, ch)
    dev = max(abs(gamma.plus_probability(x) - target[x]) for x in range(1 << ch.n))
    return Verification(dev, gamma.max_depth, dt_depth(tau))


def expected_function(f: BoolFn, ch: NSChannel) -> BoolFn:
    """x -> E_{y ~ ch(x)} f(y)."""
    if f.n != ch.N:
        raise ValueError(f"f has arity {f.n}, channel has {ch.N} outputs")
    if ch.exact and f.exact:
        vals = [sum((p * v for p, v in zip(row, f.values) if p), Fraction(0)) for row in ch.table]
    elif ch.exact and f.range == "pm1":
        vals = [sum((p * int(v) for p, v in zip(row, f.values) if p), Fraction(0)) for row in ch.table]
    else:
        vals = list(ch.table.astype(np.float64) @ f.as_float())
    return BoolFn(ch.n, vals, "real")


__all__ = [
    "UnivariateDecomposition", "decompose_univariate", "Composed", "HLeaf", "HNode",
    "HybridTree", "leaves", "hybrid_plus", "hybrid_table", "replace_leaf", "flatten", "step",
    "expand_leaf", "TreeDistribution", "decompose", "composed_plus", "Verification",
    "verify_decomposition", "expected_function",
]
