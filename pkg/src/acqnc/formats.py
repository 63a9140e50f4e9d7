"""Text formats.  Indices are 1-based in text and 0-based in the API; bit strings
list variable 1 first."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .boolfn import BoolFn, DecisionTree, Leaf, Node
from .qsim import ONE_QUBIT, TWO_QUBIT, Circuit, Gate


class FormatError(ValueError):
    pass


# -- scalars -----------------------------------------------------------------------

def mask_str(mask: int, n: int) -> str:
    return "".join(str((mask >> i) & 1) for i in range(n))


def parse_mask(text: str, n: Optional[int] = None) -> int:
    if n is not None and len(text) != n:
        raise FormatError(f"bit string {text!r} should have {n} bits")
    if text and set(text) - {"0", "1"}:
        raise FormatError(f"bad bit string {text!r}")
    return sum(int(c) << i for i, c in enumerate(text))


def fmt_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def parse_value(text: str, exact: bool = True):
    """Rationals and decimals parse exactly unless ``exact`` is False."""
    try:
        if exact or "/" in text:
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError) as err:
        raise FormatError(f"bad number {text!r}") from err


def _header(line: str, kind: str) -> dict:
    parts = line.split()
    if not parts or parts[0] != kind:
        raise FormatError(f"expected a '{kind}' header, got {line!r}")
    out = {}
    for p in parts[1:]:
        if "=" not in p:
            raise FormatError(f"bad header field {p!r}")
        k, v = p.split("=", 1)
        out[k] = v
    return out


def _int_field(fields: dict, key: str) -> int:
    try:
        return int(fields[key])
    except (KeyError, ValueError) as err:
        raise FormatError(f"header needs an integer {key}=") from err


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


# -- truth tables -------------------------------------------------------------------

def dump_boolfn(f: BoolFn) -> str:
    out = [f"boolfn n={f.n} range={f.range}"]
    for x in range(1 << f.n):
        out.append(f"{mask_str(x, f.n)} {fmt_value(f.values[x])}")
    return "\n".join(out) + "\n"


def load_boolfn(text: str) -> BoolFn:
    lines = _lines(text)
    if not lines:
        raise FormatError("empty truth table")
    fields = _header(lines[0], "boolfn")
    n = _int_field(fields, "n")
    rng = fields.get("range", "real")
    rows = lines[1:]
    if len(rows) != 1 << n:
        raise FormatError(f"expected {1 << n} rows, got {len(rows)}")
    values = []
    for x, row in enumerate(rows):
        parts = row.split()
        if n == 0 and len(parts) == 1:
            parts = ["", parts[0]]
        if len(parts) != 2:
            raise FormatError(f"bad truth-table row {row!r}")
        if parse_mask(parts[0], n) != x:
            raise FormatError(f"masks must ascend: expected {mask_str(x, n)}, got {parts[0]}")
        values.append(parse_value(parts[1]))
    return BoolFn(n, values, rng)


# -- decision trees ----------------------------------------------------------------

def dump_tree(t: DecisionTree) -> str:
    if isinstance(t, Leaf):
        return "+1" if t.value == 1 else "-1"
    return f"(x{t.var + 1} {dump_tree(t.left)} {dump_tree(t.right)})"


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def load_tree(text: str) -> DecisionTree:
    tokens = _TOKEN.findall(text)
    pos = 0

    def parse() -> DecisionTree:
        nonlocal pos
        if pos >= len(tokens):
            raise FormatError("tree ends early")
        tok = tokens[pos]
        pos += 1
        if tok in ("+1", "1"):
            return Leaf(1)
        if tok == "-1":
            return Leaf(-1)
        if tok != "(":
            raise FormatError(f"unexpected token {tok!r}")
        if pos >= len(tokens) or not re.fullmatch(r"x\d+", tokens[pos]):
            raise FormatError("node must start with x<i>")
        var = int(tokens[pos][1:]) - 1
        if var < 0:
            raise FormatError("variables are numbered from 1")
        pos += 1
        left = parse()
        right = parse()
        if pos >= len(tokens) or tokens[pos] != ")":
            raise FormatError("missing ')'")
        pos += 1
        return Node(var, left, right)

    tree = parse()
    if pos != len(tokens):
        raise FormatError(f"trailing tokens after tree: {tokens[pos:]}")
    return tree


# -- circuits --------------------------------------------------------------------------

def _fmt_complex(z: complex) -> str:
    return f"{float(z.real)!r}:{float(z.imag)!r}"


def dump_circuit(c: Circuit) -> str:
    out = [f"circuit n={c.n} m={c.m} v={c.v} depth={c.depth}"]
    if c.advice is not None:
        out.append("advice")
        out.extend(f"{float(a.real)!r} {float(a.imag)!r}" for a in c.advice)
    for ell, layer in enumerate(c.layers, start=1):
        for g in layer:
            q = ",".join(str(x + 1) for x in g.qubits)
            table = ONE_QUBIT if len(g.qubits) == 1 else TWO_QUBIT
            if g.name in table and np.array_equal(table[g.name], g.matrix):
                out.append(f"layer={ell} q={q} gate={g.name}")
            else:
                entries = ",".join(_fmt_complex(z) for z in g.matrix.flat)
                out.append(f"layer={ell} q={q} matrix={entries}")
    return "\n".join(out) + "\n"


def _parse_complex(text: str) -> complex:
    try:
        re_, im = text.split(":") if ":" in text else (text, "0")
        return complex(float(re_), float(im))
    except ValueError as err:
        raise FormatError(f"bad complex entry {text!r}") from err


def load_circuit(text: str) -> Circuit:
    lines = _lines(text)
    if not lines:
        raise FormatError("empty circuit file")
    fields = _header(lines[0], "circuit")
    n, m = _int_field(fields, "n"), _int_field(fields, "m")
    v = _int_field(fields, "v") if "v" in fields else 0
    depth = _int_field(fields, "depth")
    rest = lines[1:]
    advice = None
    if rest and rest[0] == "advice":
        amps = []
        for row in rest[1:1 + (1 << v)]:
            parts = row.split()
            if len(parts) != 2:
                raise FormatError(f"bad advice amplitude {row!r}")
            amps.append(complex(float(parts[0]), float(parts[1])))
        if len(amps) != 1 << v:
            raise FormatError(f"advice needs {1 << v} amplitudes")
        advice = np.array(amps)
        rest = rest[1 + (1 << v):]
    elif v:
        raise FormatError("v > 0 requires an advice block")
    layers: list[list[Gate]] = [[] for _ in range(depth)]
    for row in rest:
        kv = dict(p.split("=", 1) for p in row.split() if "=" in p)
        if "layer" not in kv or "q" not in kv:
            raise FormatError(f"bad gate line {row!r}")
        ell = int(kv["layer"])
        if not 1 <= ell <= depth:
            raise FormatError(f"layer {ell} outside [1, {depth}]")
        qubits = tuple(int(q) - 1 for q in kv["q"].split(","))
        if "gate" in kv:
            gate = Gate.named(kv["gate"], *qubits)
        elif "matrix" in kv:
            entries = [_parse_complex(e) for e in kv["matrix"].split(",")]
            dim = 1 << len(qubits)
            if len(entries) != dim * dim:
                raise FormatError(f"matrix needs {dim * dim} entries")
            gate = Gate(qubits, np.array(entries).reshape(dim, dim))
        else:
            raise FormatError(f"gate line needs gate= or matrix=: {row!r}")
        layers[ell - 1].append(gate)
    return Circuit(n, m, tuple(tuple(layer) for layer in layers), advice)


# -- channels --------------------------------------------------------------------------

def dump_channel(ch) -> str:
    B = ",".join("_" if b is None else str(b + 1) for b in ch.B)
    out = [f"channel n={ch.n} N={ch.N} arith={'rat' if ch.exact else 'f64'} B={B}"]
    for x in range(1 << ch.n):
        out.append(f"x={mask_str(x, ch.n)}")
        for y in range(1 << ch.N):
            val = fmt_value(ch.table[x, y])
            out.append(f"{mask_str(y, ch.N)} {val}" if ch.N else val)
    return "\n".join(out) + "\n"


def _load_channel_lines(lines: list[str]):
    from .nsc import NSChannel

    fields = _header(lines[0], "channel")
    n, N = _int_field(fields, "n"), _int_field(fields, "N")
    arith = fields.get("arith", "rat")
    if arith not in ("rat", "f64"):
        raise FormatError(f"unknown arith {arith!r}")
    Btext = fields.get("B", "")
    B = [] if Btext == "" else [None if b == "_" else int(b) - 1 for b in Btext.split(",")]
    if len(B) != N:
        raise FormatError(f"B lists {len(B)} outputs, expected {N}")
    block = 1 + (1 << N)
    need = 1 + (1 << n) * block
    if len(lines) < need:
        raise FormatError(f"channel needs {need} lines, got {len(lines)}")
    table = np.empty((1 << n, 1 << N), dtype=object if arith == "rat" else np.float64)
    for x in range(1 << n):
        head = lines[1 + x * block]
        if not head.startswith("x=") or parse_mask(head[2:], n) != x:
            raise FormatError(f"expected block x={mask_str(x, n)}, got {head!r}")
        for y in range(1 << N):
            parts = lines[2 + x * block + y].split()
            if N == 0:
                parts = [""] + parts
            if len(parts) != 2 or parse_mask(parts[0], N) != y:
                raise FormatError(f"bad outcome line {lines[2 + x * block + y]!r}")
            table[x, y] = parse_value(parts[1], exact=arith == "rat")
    return NSChannel(n, N, tuple(B), table), lines[need:]


def load_channel(text: str):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty channel file")
    ch, rest = _load_channel_lines(lines)
    if rest:
        raise FormatError(f"unexpected trailing line {rest[0]!r}")
    return ch


# -- tree distributions -------------------------------------------------------------------

def dump_treedist(gamma) -> str:
    out = [f"treedist n={gamma.n} count={len(gamma.entries)}"]
    for w, t in gamma.entries:
        out.append(f"w={fmt_value(w)}")
        out.append(dump_tree(t))
    return "\n".join(out) + "\n"


def load_treedist(text: str):
    from .dtdecomp import TreeDistribution

    lines = _lines(text)
    if not lines:
        raise FormatError("empty tree distribution")
    fields = _header(lines[0], "treedist")
    n, count = _int_field(fields, "n"), _int_field(fields, "count")
    body = lines[1:]
    if len(body) != 2 * count:
        raise FormatError(f"expected {count} weighted trees")
    entries = []
    for i in range(count):
        if not body[2 * i].startswith("w="):
            raise FormatError(f"expected w=<p/q>, got {body[2 * i]!r}")
        entries.append((parse_value(body[2 * i][2:]), load_tree(body[2 * i + 1])))
    return TreeDistribution(n, tuple(entries))


# -- reductions and LP results -----------------------------------------------------------

def dump_reduction(r) -> str:
    S = ",".join(str(i + 1) for i in r.S)
    fixing = "".join(str(b) for b in r.fixing)
    sign = "+" if r.sign > 0 else "-"
    head = f"reduction S={S} fixing={fixing} sign={sign} advantage={float(r.advantage)!r}"
    return head + "\n" + dump_channel(r.channel)


def load_reduction_header(text: str) -> dict:
    lines = _lines(text)
    fields = _header(lines[0], "reduction")
    ch = load_channel("\n".join(lines[1:]))
    return {
        "S": tuple(int(s) - 1 for s in fields["S"].split(",") if s),
        "fixing": tuple(int(c) for c in fields.get("fixing", "")),
        "sign": 1 if fields["sign"] == "+" else -1,
        "advantage": float(fields["advantage"]),
        "channel": ch,
    }


def dump_adeg(source: str, eps, k: int, approx) -> str:
    out = [f"adeg f={source} eps={fmt_value(Fraction(eps))} -> k={k} err={fmt_value(approx.sup_error)}"]
    for S, c in zip(approx.monomials, approx.coefficients):
        if c != 0:
            out.append(f"coef S={mask_str(S, approx.n)} c={fmt_value(c)}")
    return "\n".join(out) + "\n"


def read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise FormatError(f"cannot read {path}: {err.strerror}") from err


__all__ = [
    "FormatError", "mask_str", "parse_mask", "fmt_value", "parse_value",
    "dump_boolfn", "load_boolfn", "dump_tree", "load_tree", "dump_circuit", "load_circuit",
    "dump_channel", "load_channel", "dump_treedist", "load_treedist", "dump_reduction",
    "load_reduction_header", "dump_adeg", "read_text",
]
