import numpy as np
import pytest
from hypothesis import given, strategies as st

from acqnc import boolfn as bf
from acqnc import qsim
from acqnc.qsim import Circuit, CircuitError, Gate


def dense_unitary(c: Circuit) -> np.ndarray:
    """Oracle: embed every gate as a full 2^N matrix by explicit index bookkeeping."""
    N = c.num_qubits
    dim = 1 << N
    U = np.eye(dim, dtype=complex)
    for layer in c.layers:
        for g in layer:
            qs = g.qubits
            k = len(qs)
            G = np.zeros((dim, dim), dtype=complex)
            for i in range(dim):
                local_i = 0
                for q in qs:
                    local_i = (local_i << 1) | ((i >> q) & 1)
                rest = i
                for q in qs:
                    rest &= ~(1 << q)
                for local_o in range(1 << k):
                    o = rest
                    for t, q in enumerate(qs):
                        if (local_o >> (k - 1 - t)) & 1:
                            o |= 1 << q
                    G[o, i] += g.matrix[local_o, local_i]
            U = G @ U
    return U


def zdiag(n: int, S: int) -> np.ndarray:
    return np.array([1 - 2 * (bin(y & S).count("1") & 1) for y in range(1 << n)], dtype=float)


def test_simulate_examples():
    c = qsim.identity_circuit(3, 2)
    p = qsim.simulate(c, 0b101).probabilities
    assert p[0b101] == 1 and p.sum() == 1
    flip = Circuit(3, 0, (tuple(Gate.named("X", q) for q in range(3)),))
    assert qsim.simulate(flip, 0b001).probabilities[0b110] == pytest.approx(1)
    had = Circuit(2, 0, ((Gate((0, 1), np.kron(qsim.ONE_QUBIT["H"], np.eye(2))),),))
    p = qsim.simulate(had, 0).probabilities
    # H on qubit 1: outcomes 00 and 10 (qubit 1 written first)
    assert p[0b00] == pytest.approx(0.5) and p[0b01] == pytest.approx(0.5)
    one_qubit = Circuit(2, 0, ((Gate.named("H", 0),),))
    assert np.allclose(qsim.simulate(one_qubit, 0).probabilities, p)


def test_expectation_examples():
    c = qsim.identity_circuit(2, 1)
    f = bf.random_pm1(3, 4)
    for x in range(4):
        assert qsim.expectation(c, f, x) == f(x)
    flip = Circuit(1, 0, ((Gate.named("X", 0),),))
    assert qsim.expectation(flip, bf.dictator(1, 0), 0) == pytest.approx(-1)
    hh = Circuit(2, 0, ((Gate((0, 1), np.kron(qsim.ONE_QUBIT["H"], qsim.ONE_QUBIT["H"])),),))
    conj = hh.layers[0][0].matrix @ np.diag(zdiag(2, 3)) @ hh.layers[0][0].matrix
    assert np.allclose(np.diag(conj), 0)
    for x in range(4):
        assert abs(qsim.expectation(hh, bf.parity(2), x)) < 1e-12


def test_parity_correlation_examples():
    for n in range(1, 6):
        assert qsim.parity_correlation(qsim.identity_circuit(n), bf.parity(n)) == pytest.approx(1)
        flip = Circuit(n, 0, (tuple(Gate.named("X", q) for q in range(n)),))
        oracle = sum((-1) ** bin(x).count("1") * (-1) ** bin(x ^ ((1 << n) - 1)).count("1")
                     for x in range(1 << n)) / (1 << n)
        assert oracle == (-1) ** n
        assert qsim.parity_correlation(flip, bf.parity(n)) == pytest.approx(oracle)
    for m in (1, 2, 3, 4):
        assert qsim.parity_correlation(qsim.trojan_circuit(m), bf.trojan_horse(m)) == 1.0


@given(st.integers(1, 6), st.integers(0, 3), st.integers(0, 10**6))
def test_simulation_matches_dense_oracle(n, d, seed):
    c = qsim.random_circuit(n, d, seed, m=1 if n < 6 else 0, fill=0.8)
    U = dense_unitary(c)
    table = qsim.outcome_table(c)
    for x in range(1 << n):
        assert np.allclose(table[x], np.abs(U[:, x]) ** 2, atol=1e-12)
        assert abs(table[x].sum() - 1) <= 1e-12


def test_heisenberg_examples():
    assert qsim.heisenberg_trace(qsim.identity_circuit(3), 0b111) == 8
    assert qsim.heisenberg_trace(qsim.identity_circuit(2), 0b01) == 0
    for seed in range(5):
        c = qsim.random_circuit(4, 1, seed)
        for S in (1, 2, 4, 8):
            assert abs(qsim.heisenberg_trace(c, S)) <= 1e-9


@given(st.integers(1, 6), st.integers(0, 3), st.integers(0, 10**6))
def test_heisenberg_traces_match_dense(n, d, seed):
    c = qsim.random_circuit(n, d, seed)
    U = dense_unitary(c)
    Zn = np.diag(zdiag(n, (1 << n) - 1))
    traces = qsim.heisenberg_traces(c)
    for S in range(1 << n):
        ref = np.trace(Zn @ U @ np.diag(zdiag(n, S)) @ U.conj().T)
        assert abs(traces[S] - ref) <= 1e-9
        if bin(S).count("1") * (1 << d) < n:
            assert abs(traces[S]) <= 1e-9


@given(st.integers(1, 6), st.integers(0, 3), st.integers(0, 10**6))
def test_correlation_symmetry(n, d, seed):
    c = qsim.random_circuit(n, d, seed)
    f, g = bf.random_pm1(n, seed, "f"), bf.random_pm1(n, seed, "g")
    lhs = float(qsim.expectations(c, f) @ g.as_float()) / (1 << n)
    rhs = float(f.as_float() @ qsim.expectations(c.inverse(), g)) / (1 << n)
    U = dense_unitary(c)
    trace = np.trace(np.diag(f.as_float()) @ U @ np.diag(g.as_float()) @ U.conj().T).real / (1 << n)
    assert abs(lhs - rhs) <= 1e-9 and abs(lhs - trace) <= 1e-9


@given(st.integers(1, 10), st.integers(1, 3), st.integers(0, 10**6))
def test_tail_bound(n, d, seed):
    c = qsim.random_circuit(n, d, seed)
    f = bf.random_pm1(n, seed)
    k = -(-n // (1 << d))
    bound = float(bf.fourier_tail(bf.wht(f), k)) ** 0.5
    assert qsim.parity_correlation(c, f) <= bound + 1e-9


def bfs_cone(c: Circuit, j: int) -> set:
    """Oracle: reachability through (layer, qubit) nodes."""
    frontier = {j}
    for layer in c.layers:
        nxt = set(frontier)
        for g in layer:
            for a in g.qubits:
                for b in g.qubits:
                    if a in frontier:
                        nxt.add(b)
        frontier = nxt
    return frontier


def test_lightcones():
    c = qsim.identity_circuit(4)
    assert all(qsim.forward_lightcone(c, j) == {j} for j in range(4))
    one = Circuit(3, 0, ((Gate.named("CNOT", 0, 1),),))
    assert qsim.forward_lightcone(one, 0) == {0, 1}
    for d in (1, 2, 3):
        bw = qsim.brickwork(8, d, 1, m=2)
        sizes = [len(qsim.forward_lightcone(bw, j)) for j in range(8)]
        assert sizes == [len(bfs_cone(bw, j)) for j in range(8)]
        assert max(sizes) <= min(1 << d, 10)
        if d <= 2:
            assert max(sizes) == min(1 << d, 10)


def test_inverse_and_validation():
    c = qsim.random_circuit(3, 2, 5, m=1)
    U = dense_unitary(c)
    assert np.allclose(dense_unitary(c.inverse()), U.conj().T)
    with pytest.raises(CircuitError):
        Gate((0, 0), np.eye(4))
    with pytest.raises(CircuitError):
        Gate((0,), np.array([[1, 1], [0, 1]]))
    with pytest.raises(CircuitError):
        qsim.heisenberg_trace(qsim.identity_circuit(2, 1), 1)


def test_advice_register():
    adv = np.array([0, 1], dtype=complex)
    c = Circuit(2, 1, (), adv)
    p = qsim.simulate(c, 0b01).probabilities
    assert p[0b101] == 1
