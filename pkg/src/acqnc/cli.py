"""Command-line front end.

Reports are ``key=value`` lines in a fixed field order, or JSON with the same
field names under ``--json``.  Exit codes: 0 success, 2 a checked property
failed, 1 bad usage, unreadable input or a size guard.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import __version__, config
from . import adeg, boolfn, dtdecomp, lightcone, nsc, qsim
from .formats import (FormatError, dump_adeg, dump_boolfn, dump_channel, dump_reduction,
                      dump_treedist, fmt_value, load_boolfn, load_channel, load_circuit,
                      load_tree, load_treedist, mask_str, parse_mask, read_text)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Report:
    def __init__(self, command: str):
        self.command = command
        self.items: list[tuple[str, object]] = []
        self.ok = True

    def add(self, text: Optional[str] = None, **fields) -> None:
        """One record; ``text`` overrides the default key=value rendering."""
        fields = {k: _show(v) for k, v in fields.items()}
        self.items.append(("record", (fields, text)))

    def block(self, fmt: str, text: str) -> None:
        self.items.append(("block", (fmt, text)))

    def fail(self) -> None:
        self.ok = False

    def render(self, as_json: bool) -> str:
        if as_json:
            out = []
            for kind, payload in self.items:
                if kind == "record":
                    out.append(payload[0])
                else:
                    out.append({"format": payload[0], "text": payload[1]})
            return json.dumps({"command": self.command, "ok": self.ok, "records": out}, indent=1) + "\n"
        lines = []
        for kind, payload in self.items:
            if kind == "record":
                fields, text = payload
                lines.append(text if text is not None else " ".join(f"{k}={v}" for k, v in fields.items()))
            else:
                lines.append(payload[1].rstrip("\n"))
        return "\n".join(lines) + "\n"


def _show(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (Fraction, int, np.integer)):
        return fmt_value(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+}j"
    if isinstance(v, (list, tuple, frozenset, set)):
        return ",".join(str(x) for x in v)
    return str(v)


def _ones(indices) -> list[int]:
    return [i + 1 for i in sorted(indices)]


def _fn(path: str) -> boolfn.BoolFn:
    return load_boolfn(read_text(path))


def _arith(args, default: str) -> str:
    return args.arith or default


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as err:
        raise UsageError(f"not a rational number: {text!r}") from err


# -- boolfn ----------------------------------------------------------------------

def cmd_fourier(args, rep: Report) -> None:
    f = _fn(args.truthtable)
    spec = boolfn.wht(f)
    tol = 0.0 if spec.exact else config.STRUCTURAL
    rows = list(enumerate(spec.coefficients)) if args.all else spec.nonzero(tol)
    arith = "rat" if spec.exact else "f64"
    nz = len(spec.nonzero(tol))
    rep.add(n=f.n, arith=arith, degree=spec.degree(tol), nonzero=nz,
            text=f"fourier n={f.n} arith={arith} degree={spec.degree(tol)} nonzero={nz}")
    for S, c in rows:
        rep.add(S=mask_str(S, f.n), c=c, text=f"S={mask_str(S, f.n)} {_show(c)}")


def cmd_tail(args, rep: Report) -> None:
    f = _fn(args.truthtable)
    spec = boolfn.wht(f)
    ks = [args.k] if args.k is not None else list(range(f.n + 2))
    for k in ks:
        try:
            rep.add(k=k, tail=boolfn.fourier_tail(spec, k))
        except ValueError as err:
            raise UsageError(str(err)) from err


def cmd_correlate(args, rep: Report) -> None:
    f, g = _fn(args.f), _fn(args.g)
    if f.n != g.n:
        raise UsageError(f"arity mismatch {f.n} != {g.n}")
    direct = boolfn.correlation(f, g)
    fs, gs = boolfn.wht(f), boolfn.wht(g)
    planch = sum(a * b for a, b in zip(fs.coefficients, gs.coefficients))
    rep.add(correlation=direct, plancherel=planch)


# -- qsim ------------------------------------------------------------------------------

def _circuit(path: str) -> qsim.Circuit:
    return load_circuit(read_text(path))


def _input_mask(text: Optional[str], n: int) -> int:
    if text is None:
        return 0
    try:
        return parse_mask(text, n)
    except FormatError as err:
        raise UsageError(str(err)) from err


def cmd_simulate(args, rep: Report) -> None:
    c = _circuit(args.circuit)
    x = _input_mask(args.x, c.n)
    arith = _arith(args, "f64")
    row = lightcone.circuit_table(c, [x], arith)[0]
    rep.add(n=c.n, m=c.m, x=mask_str(x, c.n), arith=arith,
            text=f"simulate n={c.n} m={c.m} x={mask_str(x, c.n)} arith={arith}")
    for y, p in enumerate(row):
        if (p != 0) if arith == "rat" else p > config.STRUCTURAL:
            rep.add(y=mask_str(y, c.num_qubits), p=p)


def cmd_expectation(args, rep: Report) -> None:
    c, f = _circuit(args.circuit), _fn(args.truthtable)
    x = _input_mask(args.x, c.n)
    if f.n != c.num_qubits:
        raise UsageError(f"observable arity {f.n} != {c.num_qubits} qubits")
    rep.add(x=mask_str(x, c.n), expectation=qsim.expectation(c, f, x))


def cmd_parity_correlation(args, rep: Report) -> None:
    c, f = _circuit(args.circuit), _fn(args.truthtable)
    if f.n != c.num_qubits:
        raise UsageError(f"observable arity {f.n} != {c.num_qubits} qubits")
    corr = qsim.parity_correlation(c, f)
    fields = {"parity_correlation": corr}
    if c.m == 0 and c.n:
        k = math.ceil(c.n / (1 << c.depth))
        bound = math.sqrt(float(boolfn.fourier_tail(boolfn.wht(f), k)))
        ok = corr <= bound + config.LOGICAL
        fields.update(tail_level=k, bound=bound, bound_holds=ok)
        if not ok:
            rep.fail()
    rep.add(**fields)


def cmd_heisenberg_trace(args, rep: Report) -> None:
    c = _circuit(args.circuit)
    traces = qsim.heisenberg_traces(c)
    masks = [_input_mask(args.S, c.n)] if args.S is not None else range(1 << c.n)
    for S in masks:
        size = boolfn.popcount(S)
        t = float(traces[S])
        must_vanish = size * (1 << c.depth) < c.n
        fields = {"S": mask_str(S, c.n), "trace": t, "must_vanish": must_vanish}
        if must_vanish and abs(t) > config.LOGICAL:
            rep.fail()
        rep.add(**fields)


def cmd_lightcone(args, rep: Report) -> None:
    c = _circuit(args.circuit)
    for j, cone in enumerate(lightcone.lightcones(c)):
        rep.add(j=j + 1, cone=_ones(cone))
    g = lightcone.conflict_graph(c)
    S = lightcone.greedy_independent_set(g)
    ok = len(S) * (g.max_degree + 1) >= c.n
    rep.add(edges=";".join(f"{a + 1}-{b + 1}" for a, b in g.edges()) or "none",
            max_degree=g.max_degree, independent_set=_ones(S), size=len(S), bound_holds=ok)
    if not ok:
        rep.fail()


def cmd_reduce_to_game(args, rep: Report) -> None:
    c, f = _circuit(args.circuit), _fn(args.truthtable)
    if f.n != c.num_qubits:
        raise UsageError(f"f arity {f.n} != {c.num_qubits} qubits")
    S = None if args.S is None else [int(s) - 1 for s in args.S.split(",") if s]
    arith = _arith(args, "f64")
    budget = args.budget if args.budget is not None else lightcone.DEFAULT_BUDGET
    r = lightcone.best_restriction_search(c, f, S, budget, args.seed, arith)
    full = lightcone.averaging_identity(c, f, r.S, arith)[0] if r.exhaustive else None
    rep.block("reduction", dump_reduction(r))
    fields = {"correlation": r.correlation, "advantage": r.advantage, "exhaustive": r.exhaustive}
    if full is not None:
        ok = r.advantage >= abs(full) / 2 - (0 if arith == "rat" else config.LOGICAL)
        fields.update(full_correlation=full, accounting_holds=ok)
        if not ok:
            rep.fail()
    rep.add(**fields)


# -- nsc -----------------------------------------------------------------------------------

def _channel(path: str) -> nsc.NSChannel:
    return load_channel(read_text(path))


def cmd_nsc_check(args, rep: Report) -> None:
    ch = _channel(args.channel)
    res = nsc.is_no_signaling(ch)
    if res:
        rep.add(no_signaling=True)
        return
    w = res.witness
    rep.add(no_signaling=False, S=_ones(w.S) or "none", x=mask_str(w.x, ch.n),
            x_prime=mask_str(w.x_prime, ch.n), T=_ones(w.T) or "none")
    rep.fail()


def _input_distribution(name: str, n: int):
    if name == "even":
        return nsc.uniform_even(n)
    if name == "odd":
        return nsc.uniform_odd(n)
    if name == "uniform":
        return [Fraction(1, 1 << n)] * (1 << n)
    if name.startswith("point:"):
        return nsc.point_distribution(n, _input_mask(name[6:], n))
    raise UsageError(f"unknown input distribution {name!r} (even, odd, uniform, point:<bits>)")


def cmd_pushforward(args, rep: Report) -> None:
    ch = _channel(args.channel)
    mu = nsc.pushforward(ch, _input_distribution(args.input, ch.n))
    for y, p in enumerate(mu.probabilities):
        if p:
            rep.add(y=mask_str(y, ch.N), p=p)


def cmd_kwise(args, rep: Report) -> None:
    ch = _channel(args.channel)
    mu, nu = nsc.even_odd_pushforwards(ch)
    level = nsc.kwise_level(mu, nu)
    ok = level >= ch.n - 1 or not ch.n
    rep.add(level=level, players=ch.n, at_least_n_minus_1=ok)
    if not ok:
        rep.fail()


def cmd_block_kwise(args, rep: Report) -> None:
    ch = _channel(args.channel)
    if args.k is None:
        raise UsageError("--k is required")
    mu, nu = nsc.even_odd_pushforwards(ch)
    try:
        rep.add(block_level=nsc.blockwise_level(mu, nu, args.k), k=args.k)
    except ValueError as err:
        raise UsageError(str(err)) from err


def cmd_game_value(args, rep: Report) -> None:
    f = _fn(args.truthtable)
    g = nsc.ParityGame(args.n, args.k if args.k is not None else 1, args.m, f)
    value, witness = nsc.game_value_nosignaling(g)
    rep.add(value=value, advantage=value - Fraction(1, 2))
    if args.witness:
        rep.block("channel", dump_channel(witness))


def cmd_gen_channel(args, rep: Report) -> None:
    method = args.method
    exact = _arith(args, "rat") == "rat"
    if method in ("shared-randomness", "polytope-vertex"):
        ch = nsc.random_nosignaling_channel(args.n, args.k if args.k is not None else 1,
                                            args.seed, method, args.m)
    elif method == "parity":
        ch = nsc.parity_channel(args.n)
    elif method == "identity":
        ch = nsc.identity_channel(args.n)
    elif method == "pr-box":
        ch = nsc.pr_box()
    elif method == "ghz":
        ch = nsc.ghz_channel(exact)
    elif method == "singlet":
        ch = nsc.singlet_channel(exact)
    else:
        raise UsageError(f"unknown channel generator {method!r}")
    rep.block("channel", dump_channel(ch))


# -- dtdecomp ------------------------------------------------------------------------------

def _tree(path: str):
    return load_tree(read_text(path))


def _verify(rep: Report, tau, ch, gamma) -> None:
    v = dtdecomp.verify_decomposition(tau, ch, gamma)
    rep.add(deviation=v.deviation, max_depth=v.max_depth, depth_bound=v.depth_bound,
            support=len(gamma), holds=v.ok)
    if not v.ok:
        rep.fail()


def cmd_decompose(args, rep: Report) -> None:
    tau, ch = _tree(args.tree), _channel(args.channel)
    check = nsc.is_no_signaling(ch)
    if not check:
        w = check.witness
        rep.add(no_signaling=False, S=_ones(w.S) or "none", x=mask_str(w.x, ch.n),
                x_prime=mask_str(w.x_prime, ch.n))
        rep.fail()
        return
    gamma = dtdecomp.decompose(tau, ch)
    rep.block("treedist", dump_treedist(gamma))
    if args.verify:
        _verify(rep, tau, ch, gamma)


def cmd_verify_decomp(args, rep: Report) -> None:
    tau, ch = _tree(args.tree), _channel(args.channel)
    gamma = load_treedist(read_text(args.treedist))
    _verify(rep, tau, ch, gamma)


def cmd_expected_fn(args, rep: Report) -> None:
    f, ch = _fn(args.truthtable), _channel(args.channel)
    if f.n != ch.N:
        raise UsageError(f"f arity {f.n} != channel outputs {ch.N}")
    e = dtdecomp.expected_function(f, ch)
    tol = 0.0 if e.exact else config.STRUCTURAL
    d_f = boolfn.wht(f).degree(0.0 if f.exact else config.STRUCTURAL)
    d_e = boolfn.wht(e).degree(tol)
    rep.block("boolfn", dump_boolfn(e))
    ok = d_e <= d_f
    rep.add(degree_f=d_f, degree_expected=d_e, non_increase=ok)
    if not ok:
        rep.fail()


# -- adeg ------------------------------------------------------------------------------------

def _eps(args) -> Fraction:
    eps = _frac(args.eps) if args.eps is not None else adeg.DEFAULT_EPS
    if eps < 0:
        raise UsageError("eps must be non-negative")
    return eps


def cmd_adeg(args, rep: Report) -> None:
    f, eps = _fn(args.truthtable), _eps(args)
    k, approx = adeg.approx_degree(f, eps)
    rep.block("adeg", dump_adeg(args.truthtable, eps, k, approx))


def cmd_bdeg(args, rep: Report) -> None:
    f, eps = _fn(args.truthtable), _eps(args)
    if args.k is None:
        raise UsageError("--k is required")
    try:
        D, approx = adeg.block_approx_degree(f, args.k, eps)
    except ValueError as err:
        raise UsageError(str(err)) from err
    text = dump_adeg(args.truthtable, eps, D, approx)
    text = text.replace("adeg ", f"bdeg k={args.k} ", 1).replace("-> k=", "-> D=", 1)
    rep.block("bdeg", text)
    if f.n % args.k == 0:
        rel = adeg.blockdeg_relations(f, args.k, eps)
        rep.add(degree=rel.degree, block_degree=rel.block_degree, blocks=rel.blocks,
                relations_hold=rel.ok)
        if not rel.ok:
            rep.fail()


def cmd_max_advantage(args, rep: Report) -> None:
    f = _fn(args.truthtable)
    if args.k is None:
        raise UsageError("--k is required")
    adv, w = adeg.max_advantage_kwise(f, args.k)
    rep.add(k=args.k, advantage=adv)
    for y, (a, b) in enumerate(zip(w.mu, w.nu)):
        if a or b:
            rep.add(y=mask_str(y, f.n), mu=a, nu=b)


def cmd_duality_check(args, rep: Report) -> None:
    f, eps = _fn(args.truthtable), _eps(args)
    if args.k is None:
        raise UsageError("--k is required")
    adv, _ = adeg.max_advantage_kwise(f, args.k)
    deg, _ = adeg.approx_degree(f, eps / 2)
    holds = (adv <= eps) == (deg <= args.k)
    rep.add(k=args.k, eps=eps, advantage=adv, degree_half_eps=deg, holds=holds)
    if not holds:
        rep.fail()


# -- worked examples ---------------------------------------------------------------------------

def _example_args(pairs: Sequence[str]) -> dict:
    out = {}
    for p in pairs:
        if "=" not in p:
            raise UsageError(f"example parameters look like key=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k] = v
    return out


def cmd_example(args, rep: Report) -> None:
    params = _example_args(args.params)
    if args.name == "trojan-horse":
        m = int(params.get("m", 2))
        if m < 1:
            raise UsageError("m must be positive")
        h = boolfn.trojan_horse(m)
        spec = boolfn.wht(h)
        rep.add(example="trojan-horse", m=m, n=2 * m)
        for S, c in spec.nonzero(0.0):
            rep.add(S=mask_str(S, 2 * m), c=c, text=f"S={mask_str(S, 2 * m)} {_show(c)}")
        rho = boolfn.Restriction((boolfn.STAR,) * m + (-1,) * m)
        restricted = boolfn.restrict(h, rho) == boolfn.parity(m)
        corr = qsim.parity_correlation(qsim.trojan_circuit(m), h)
        rep.add(tail_1=boolfn.fourier_tail(spec, 1), restriction_is_parity=restricted,
                composed_correlation=corr)
        if not restricted or abs(corr - 1) > config.LOGICAL:
            rep.fail()
    elif args.name == "ghz":
        ch = nsc.ghz_channel(_arith(args, "rat") == "rat")
        rep.block("channel", dump_channel(ch))
        for x in range(1 << ch.n):
            if boolfn.popcount(x) % 2 == 0:
                corr = nsc.correlators(ch, x)[(1 << ch.N) - 1]
                rep.add(x=mask_str(x, ch.n), product_mean=corr)
        rep.add(no_signaling=bool(nsc.is_no_signaling(ch)))
    elif args.name == "parity-channel":
        n = int(params.get("n", 2))
        ch = nsc.parity_channel(n)
        rep.block("channel", dump_channel(ch))
        single = nsc.reduce(ch, [0])
        cond = nsc.condition(ch, list(range(1, n)), [1] * (n - 1))
        rep.add(no_signaling=bool(nsc.is_no_signaling(ch)),
                single_output_uniform=all(v == Fraction(1, 2) for v in single.table.flat),
                conditioned_is_parity=all(cond.table[x, 0 if boolfn.popcount(x) % 2 == 0 else 1] == 1
                                          for x in range(1 << n)))
    else:
        raise UsageError(f"unknown example {args.name!r}")


# -- parser -------------------------------------------------------------------------------------

COMMANDS = {
    "fourier": (cmd_fourier, ["truthtable"]),
    "tail": (cmd_tail, ["truthtable"]),
    "correlate": (cmd_correlate, ["f", "g"]),
    "simulate": (cmd_simulate, ["circuit"]),
    "expectation": (cmd_expectation, ["circuit", "truthtable"]),
    "parity-correlation": (cmd_parity_correlation, ["circuit", "truthtable"]),
    "heisenberg-trace": (cmd_heisenberg_trace, ["circuit"]),
    "lightcone": (cmd_lightcone, ["circuit"]),
    "reduce-to-game": (cmd_reduce_to_game, ["circuit", "truthtable"]),
    "nsc-check": (cmd_nsc_check, ["channel"]),
    "pushforward": (cmd_pushforward, ["channel"]),
    "kwise": (cmd_kwise, ["channel"]),
    "block-kwise": (cmd_block_kwise, ["channel"]),
    "game-value": (cmd_game_value, ["truthtable"]),
    "gen-channel": (cmd_gen_channel, []),
    "decompose": (cmd_decompose, ["tree", "channel"]),
    "verify-decomp": (cmd_verify_decomp, ["tree", "channel", "treedist"]),
    "expected-fn": (cmd_expected_fn, ["truthtable", "channel"]),
    "adeg": (cmd_adeg, ["truthtable"]),
    "bdeg": (cmd_bdeg, ["truthtable"]),
    "max-advantage": (cmd_max_advantage, ["truthtable"]),
    "duality-check": (cmd_duality_check, ["truthtable"]),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--arith", choices=["rat", "f64"])
    common.add_argument("--tol", type=float)
    common.add_argument("--out")
    common.add_argument("--json", action="store_true")
    common.add_argument("--budget", type=int)
    common.add_argument("--guard-override", action="store_true")

    parser = _Parser(prog="acqnc", description="Parity versus shallow circuits: exact checks.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, positionals) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common])
        for pos in positionals:
            p.add_argument(pos)
        if name == "fourier":
            p.add_argument("--all", action="store_true", help="include zero coefficients")
        if name in ("tail", "block-kwise", "bdeg", "max-advantage", "duality-check",
                    "game-value", "gen-channel"):
            p.add_argument("--k", type=int)
        if name in ("simulate", "expectation"):
            p.add_argument("--x", help="input bit string, variable 1 first")
        if name == "heisenberg-trace":
            p.add_argument("--S", help="subset bit string; all subsets when omitted")
        if name == "reduce-to-game":
            p.add_argument("--S", help="comma list of free inputs (1-based)")
        if name == "pushforward":
            p.add_argument("--input", default="uniform")
        if name in ("game-value", "gen-channel"):
            p.add_argument("--n", type=int, default=2)
            p.add_argument("--m", type=int, default=0)
        if name == "game-value":
            p.add_argument("--witness", action="store_true")
        if name == "gen-channel":
            p.add_argument("--method", default="shared-randomness")
        if name == "decompose":
            p.add_argument("--verify", action="store_true")
        if name in ("adeg", "bdeg", "duality-check"):
            p.add_argument("--eps", help="rational, default 1/3")
    ex = sub.add_parser("example", parents=[common])
    ex.add_argument("name", choices=["trojan-horse", "ghz", "parity-channel"])
    ex.add_argument("params", nargs="*")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    saved_tol, saved_guards = config.LOGICAL, config.guards_enabled()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        if args.tol is not None:
            if args.tol < 0:
                raise UsageError("--tol must be non-negative")
            config.LOGICAL = args.tol
        if args.guard_override:
            config.set_guards(False)
        rep = Report(args.command)
        handler = cmd_example if args.command == "example" else COMMANDS[args.command][0]
        handler(args, rep)
        text = rep.render(args.json)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0 if rep.ok else 2
    except UsageError as err:
        sys.stderr.write(f"usage error: {err}\n")
        return 1
    except (FormatError, config.GuardError, qsim.CircuitError, lightcone.ExtractionError,
            ValueError, OSError) as err:
        sys.stderr.write(f"error: {err}\n")
        return 1
    finally:
        config.LOGICAL = saved_tol
        config.set_guards(saved_guards)


if __name__ == "__main__":
    sys.exit(main())
