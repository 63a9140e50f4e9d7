"""Acceptance criteria 1-12, each at its stated tolerance and runtime bound.

Every criterion records one PASS/FAIL line, shown in the pytest terminal
summary (and printed directly when the module is run as a script).
"""

import time
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from acqnc import adeg
from acqnc import boolfn as bf
from acqnc import dtdecomp as dd
from acqnc import lightcone as lc
from acqnc import nsc, qsim
from acqnc.boolfn import STAR, BoolFn, Restriction
from conftest import record
from instances import quantum, tree_channel_instance
from test_nsc import brute_no_signaling
from test_qsim import dense_unitary

pytestmark = pytest.mark.acceptance
TOL = 1e-9


# -- 1. Trojan horse ------------------------------------------------------------------

def closed_form(m):
    """Reference closed form: 1 - 2^-m on the empty set, -2^-m on nonempty subsets
    of the first block, 2^-m on supersets of the trailing block, 0 elsewhere."""
    low = (1 << m) - 1
    high = low << m
    out = []
    for S in range(1 << (2 * m)):
        if S == 0:
            out.append(1 - Fraction(1, 1 << m))
        elif S & ~low == 0:
            out.append(-Fraction(1, 1 << m))
        elif S & high == high:
            out.append(Fraction(1, 1 << m))
        else:
            out.append(Fraction(0))
    return out


def block_swapped_variant(m):
    """Parity of the trailing block, triggered by the first block equal to +1^m."""
    low = (1 << m) - 1
    return BoolFn(2 * m, [1 - 2 * (bin(x >> m).count("1") & 1) if x & low == 0 else 1
                          for x in range(1 << (2 * m))], "pm1")


def trojan_clauses(m):
    h = bf.trojan_horse(m)
    spec = bf.wht(h)
    mismatches = sum(1 for a, b in zip(spec.coefficients, closed_form(m)) if a != b)
    rho = Restriction((STAR,) * m + (-1,) * m)
    restricted = bf.restrict(h, rho) == bf.parity(m)
    corr = qsim.parity_correlation(qsim.trojan_circuit(m), h)
    variant = list(bf.wht(block_swapped_variant(m)).coefficients) == closed_form(m)
    return mismatches, restricted, corr, variant


def test_criterion_01_restriction_and_circuit():
    for m in (2, 3, 4):
        _, restricted, corr, _ = trojan_clauses(m)
        assert restricted and abs(corr - 1) <= TOL


@pytest.mark.xfail(strict=True, reason="the reference closed form is not the spectrum of the "
                                       "function whose restriction and circuit clauses hold")
def test_criterion_01():
    start = time.perf_counter()
    parts, ok = [], True
    for m in (2, 3, 4):
        mismatches, restricted, corr, variant = trojan_clauses(m)
        ok &= mismatches == 0 and restricted and abs(corr - 1) <= TOL
        parts.append(f"m={m}: closed-form mismatches={mismatches}/{1 << (2 * m)} "
                     f"restriction={restricted} corr={corr} swapped-variant-matches={variant}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1
    record(1, ok, "; ".join(parts) + f" ({elapsed:.2f}s)")
    assert ok


# -- 2-4. circuits ----------------------------------------------------------------------

def circuit_pool(count, n_max, d_max, label):
    for seed in range(count):
        rng = np.random.default_rng([seed, hash(label) & 0xFFFF])
        n = int(rng.integers(2, n_max + 1))
        d = int(rng.integers(1, d_max + 1))
        yield seed, n, d, qsim.random_circuit(n, d, seed, fill=float(rng.uniform(0.5, 1.0)))


def test_criterion_02():
    start = time.perf_counter()
    worst, checked, count = 0.0, 0, 0
    for seed, n, d, c in circuit_pool(120, 10, 3, "lightcone"):
        traces = qsim.heisenberg_traces(c)
        for S in range(1 << n):
            if bin(S).count("1") * (1 << d) < n:
                worst = max(worst, abs(traces[S]))
                checked += 1
        count += 1
    elapsed = time.perf_counter() - start
    ok = count >= 100 and worst <= TOL and elapsed < 120
    record(2, ok, f"{count} circuits, {checked} traces, max |trace|={worst:.2e} ({elapsed:.1f}s)")
    assert ok


def test_criterion_03():
    start = time.perf_counter()
    worst_gap, closest, count = -np.inf, np.inf, 0
    for seed, n, d, c in circuit_pool(120, 10, 3, "tail"):
        f = bf.random_pm1(n, seed, "tail")
        corr = qsim.parity_correlation(c, f)
        bound = float(bf.fourier_tail(bf.wht(f), -(-n // (1 << d)))) ** 0.5
        worst_gap = max(worst_gap, corr - bound)
        if bound > 1e-6:
            closest = min(closest, bound - abs(corr))
        count += 1
    # tightness probe (no contract): parity through the identity meets the bound exactly
    probe = 1.0 - qsim.parity_correlation(qsim.identity_circuit(6), bf.parity(6))
    elapsed = time.perf_counter() - start
    ok = count >= 100 and worst_gap <= TOL and elapsed < 300
    record(3, ok, f"{count} pairs, max(corr - bound)={worst_gap:.3e}, closest random pair to "
                  f"equality={closest:.3f}, identity/parity gap={probe:.1e} ({elapsed:.1f}s)")
    assert ok


def test_criterion_04():
    start = time.perf_counter()
    worst, count = 0.0, 0
    for seed, n, d, c in circuit_pool(110, 6, 3, "symmetry"):
        f, g = bf.random_pm1(n, seed, "f"), bf.random_pm1(n, seed, "g")
        lhs = float(qsim.expectations(c, f) @ g.as_float()) / (1 << n)
        rhs = float(f.as_float() @ qsim.expectations(c.inverse(), g)) / (1 << n)
        U = dense_unitary(c)
        tr = np.trace(np.diag(f.as_float()) @ U @ np.diag(g.as_float()) @ U.conj().T) / (1 << n)
        worst = max(worst, abs(lhs - rhs), abs(lhs - tr.real), abs(tr.imag))
        count += 1
    elapsed = time.perf_counter() - start
    ok = count >= 100 and worst <= TOL and elapsed < 60
    record(4, ok, f"{count} instances, max disagreement={worst:.2e} ({elapsed:.1f}s)")
    assert ok


# -- 5-6. no-signaling algebra ------------------------------------------------------------

def fixed_channels():
    return [nsc.parity_channel(2), nsc.parity_channel(3), nsc.parity_channel(4),
            nsc.identity_channel(2), nsc.identity_channel(4), nsc.pr_box(),
            quantum("ghz"), quantum("singlet")]


def seeded_channel(seed):
    rng = np.random.default_rng([seed, 5])
    n = int(rng.integers(1, 5))
    k = 1 if n > 2 else int(rng.integers(1, 3))
    m = int(rng.integers(0, min(3, 5 - n * k))) if n * k < 4 else 0
    method = "polytope-vertex" if seed % 3 == 0 and n * k + m <= 3 else "shared-randomness"
    return nsc.random_nosignaling_channel(n, k, seed, method, m)


def algebra_failures(ch):
    fails, checks = 0, 0
    N = ch.N
    # reduction composition
    for V in range(1 << N):
        Vl = [j for j in range(N) if (V >> j) & 1]
        inner = nsc.reduce(ch, Vl)
        for U in range(1 << N):
            if U & ~V:
                continue
            Ul = [j for j in range(N) if (U >> j) & 1]
            checks += 1
            fails += not nsc.reduce(inner, [Vl.index(j) for j in Ul]).same_as(nsc.reduce(ch, Ul))
    # conditional marginals depend only on x restricted to B(J u T)
    for jsize in range(1, N + 1):
        for J in combinations(range(N), jsize):
            rest = [j for j in range(N) if j not in J]
            for ybits in range(1 << jsize):
                Y = [1 - 2 * ((ybits >> t) & 1) for t in range(jsize)]
                try:
                    cond = nsc.condition(ch, J, Y)
                except ValueError:
                    continue
                for tsize in range(len(rest) + 1):
                    for T in combinations(rest, tsize):
                        red = nsc.reduce(cond, [rest.index(t) for t in T])
                        cone = {ch.B[j] for j in J + T if ch.B[j] is not None}
                        for x in range(1 << ch.n):
                            for xp in range(x + 1, 1 << ch.n):
                                if any((x >> i) & 1 != (xp >> i) & 1 for i in cone):
                                    continue
                                checks += 1
                                dx, dxp = x in cond.degenerate_rows, xp in cond.degenerate_rows
                                if dx or dxp:
                                    fails += dx != dxp
                                else:
                                    fails += list(red.table[x]) != list(red.table[xp])
    # conditioning on outputs owned by a fixed input (or the referee) stays no-signaling
    for b in range(ch.n):
        pool = [j for j in range(N) if ch.B[j] in (None, b)]
        for X in (1, -1):
            for jsize in range(len(pool) + 1):
                for J in combinations(pool, jsize):
                    for ybits in range(1 << jsize):
                        Y = [1 - 2 * ((ybits >> t) & 1) for t in range(jsize)]
                        try:
                            cond = nsc.condition(ch, J, Y, (b, X))
                        except ValueError:
                            continue
                        checks += 1
                        fails += not (cond.no_signaling and nsc.is_no_signaling(cond))
    return fails, checks


def test_criterion_05():
    start = time.perf_counter()
    fails, checks, count = 0, 0, 0
    pool = fixed_channels() + [seeded_channel(s) for s in range(200)]
    for ch in pool:
        f, c = algebra_failures(ch)
        fails, checks, count = fails + f, checks + c, count + 1
    # spot-check the checker itself against the literal definition
    oracle_ok = all(brute_no_signaling(ch) for ch in pool[:40])
    elapsed = time.perf_counter() - start
    ok = fails == 0 and count >= 200 and oracle_ok and elapsed < 120
    record(5, ok, f"{count} channels, {checks} exact identities, {fails} failures ({elapsed:.1f}s)")
    assert ok


def kwise_pool():
    for n in range(1, 7):
        for k in (1, 2):
            for m in (0, 1):
                if n + n * k + m > 14:
                    continue
                for seed in range(6):
                    yield nsc.random_nosignaling_channel(n, k, seed, "shared-randomness", m), k
    for n, k, m in [(2, 1, 0), (2, 1, 1), (3, 1, 0), (2, 2, 0), (1, 2, 1)]:
        for seed in range(4):
            yield nsc.random_nosignaling_channel(n, k, seed, "polytope-vertex", m), k
    for n in range(1, 7):
        yield nsc.parity_channel(n), 1
        yield nsc.identity_channel(n), 1
    yield quantum("ghz"), 1
    yield quantum("singlet"), 1
    yield nsc.pr_box(), 1


def test_criterion_06():
    start = time.perf_counter()
    worst_margin, count = None, 0
    for ch, k in kwise_pool():
        mu, nu = nsc.even_odd_pushforwards(ch)
        margin = nsc.kwise_level(mu, nu) - (ch.n - 1)
        worst_margin = margin if worst_margin is None else min(worst_margin, margin)
        count += 1
    elapsed = time.perf_counter() - start
    ok = worst_margin >= 0 and elapsed < 60
    record(6, ok, f"{count} channels, min(level - (n-1))={worst_margin} ({elapsed:.1f}s)")
    assert ok


# -- 7-8. tree decomposition ----------------------------------------------------------------

def test_criterion_07_08():
    start = time.perf_counter()
    bad_dev, bad_depth, bad_deg, kinds, count = 0, 0, 0, {}, 0
    for seed in range(240):
        tau, ch, kind = tree_channel_instance(seed)
        gamma = dd.decompose(tau, ch)
        v = dd.verify_decomposition(tau, ch, gamma)
        bad_dev += v.deviation != 0
        bad_depth += v.max_depth > bf.dt_depth(tau)
        for f in (bf.tree_function(tau, ch.N), bf.random_pm1(ch.N, seed, "deg")):
            e = dd.expected_function(f, ch)
            bad_deg += bf.wht(e).degree(0) > bf.wht(f).degree(0)
        kinds[kind] = kinds.get(kind, 0) + 1
        count += 1
    elapsed = time.perf_counter() - start
    ok7 = count >= 200 and bad_dev == 0 and bad_depth == 0 and elapsed < 300
    ok8 = bad_deg == 0
    mix = ", ".join(f"{k}={v}" for k, v in sorted(kinds.items()))
    record(7, ok7, f"{count} instances ({mix}), nonzero deviations={bad_dev}, "
                   f"depth violations={bad_depth} ({elapsed:.1f}s)")
    record(8, ok8, f"{2 * count} expected functions, degree increases={bad_deg}")
    assert ok7 and ok8


# -- 9-10. approximate degree ----------------------------------------------------------------

def test_criterion_09():
    start = time.perf_counter()
    third = Fraction(1, 3)
    exhaustive, failures = 0, 0
    for N in range(1, 4):
        for bits in range(1 << (1 << N)):
            f = BoolFn(N, [1 - 2 * ((bits >> x) & 1) for x in range(1 << N)], "pm1")
            for k in range(4):
                failures += not adeg.duality_check(f, k, third)
                exhaustive += 1
    seeded = 0
    for seed in range(102):
        N = 4 + seed % 3
        k = int(np.random.default_rng([seed, 9]).integers(0, N + 1))
        f = bf.random_pm1(N, seed, "duality")
        adv, _ = adeg.max_advantage_kwise(f, k)
        deg, approx = adeg.approx_degree(f, third / 2)
        # exact threshold agreement: the advantage equals twice the best level-k error
        err, _ = adeg.best_error(f, [S for S in range(1 << N) if bin(S).count("1") <= k])
        failures += ((adv <= third) != (deg <= k)) or adv != 2 * err
        seeded += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and seeded >= 100 and elapsed < 600
    record(9, ok, f"{exhaustive} exhaustive + {seeded} seeded checks, {failures} failures ({elapsed:.1f}s)")
    assert ok


def test_criterion_10():
    start = time.perf_counter()
    third = Fraction(1, 3)
    wrong = []
    for n in range(1, 7):
        for S in range(1 << n):
            d, approx = adeg.approx_degree(bf.character(n, S), third)
            if d != bin(S).count("1") or approx.sup_error > third:
                wrong.append(("chi", n, S, d))
    for n, k in [(4, 2), (6, 2), (6, 3)]:
        b, approx = adeg.block_approx_degree(bf.parity(n), k, third)
        if b != n // k or approx.sup_error > third:
            wrong.append(("bdeg", n, k, b))
    sandwiches = 0
    tested = [(bf.parity(n), k) for n, k in [(4, 2), (6, 2), (6, 3)]]
    tested += [(bf.random_pm1(4, s, "sandwich"), 2) for s in range(8)]
    tested += [(bf.random_pm1(6, s, "sandwich"), k) for s in range(2) for k in (2, 3)]
    for f, k in tested:
        rel = adeg.blockdeg_relations(f, k, third)
        sandwiches += 1
        if not rel.sandwich:
            wrong.append(("sandwich", f.n, k, rel))
    elapsed = time.perf_counter() - start
    ok = not wrong and elapsed < 300
    record(10, ok, f"{2 ** 7 - 2} characters, 3 parity block degrees, {sandwiches} sandwiches, "
                   f"{len(wrong)} failures ({elapsed:.1f}s)")
    assert ok, wrong


# -- 11. reduction pipeline --------------------------------------------------------------------

def test_criterion_11():
    start = time.perf_counter()
    failures, count = [], 0
    for seed in range(80):
        rng = np.random.default_rng([seed, 11])
        n = int(rng.integers(2, 7))
        d = int(rng.integers(1, 3))
        m = int(rng.integers(0, 2)) if n < 6 else 0
        c = qsim.random_clifford_circuit(n, d, seed, m=m, fill=0.8)
        f = bf.random_pm1(c.num_qubits, seed, "pipeline")
        S = lc.greedy_independent_set(lc.conflict_graph(c))
        r = lc.best_restriction_search(c, f, S, arith="rat")
        full, avg = lc.averaging_identity(c, f, S, "rat")
        ns = nsc.is_no_signaling(r.channel)
        brute = brute_no_signaling(r.channel) if r.channel.n + r.channel.N <= 8 else True
        if not (r.channel.exact and ns and brute):
            failures.append((seed, "signaling"))
        if full != avg:
            failures.append((seed, "averaging"))
        if not (r.exhaustive and r.advantage == r.correlation / 2 and r.advantage >= abs(full) / 2):
            failures.append((seed, "accounting"))
        count += 1
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 180
    record(11, ok, f"{count} circuits, {len(failures)} failures ({elapsed:.1f}s)")
    assert ok, failures


# -- 12. parity-game LP -------------------------------------------------------------------------

def test_criterion_12():
    start = time.perf_counter()
    g_prod = nsc.ParityGame(2, 1, 0, bf.parity(2))
    g_dict = nsc.ParityGame(2, 1, 0, bf.dictator(2, 0))
    v_prod = nsc.game_value_nosignaling(g_prod)[0]
    v_dict = nsc.game_value_nosignaling(g_dict)[0]
    games = [g_prod, g_dict]
    for n, k, m in [(2, 1, 0), (2, 1, 1), (3, 1, 0), (2, 2, 0), (1, 2, 1)]:
        for s in range(3):
            games.append(nsc.ParityGame(n, k, m, bf.random_pm1(n * k + m, s, "game")))
    dominated = 0
    for i, g in enumerate(games):
        value, _ = nsc.game_value_nosignaling(g)
        best = max(nsc.game_value(g, nsc.random_nosignaling_channel(g.n, g.k, 1000 * i + s,
                                                                    "shared-randomness", g.m))
                   for s in range(100))
        dominated += best <= value
    elapsed = time.perf_counter() - start
    ok = v_prod == 1 and v_dict == Fraction(1, 2) and dominated == len(games) and elapsed < 120
    record(12, ok, f"product={v_prod} dictator={v_dict}, LP dominates 100 classical strategies "
                   f"on {dominated}/{len(games)} games ({elapsed:.1f}s)")
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
