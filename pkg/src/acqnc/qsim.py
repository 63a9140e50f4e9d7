"""Exact statevector simulation of layered circuits of 2-qubit gates.

Qubit q is bit q of a basis-state index, so |x> for an input mask x puts
input bit i on qubit i.  Ancillas are qubits n..n+m-1; the last v of them
hold the advice state.  A measured bit 1 reads as the value -1, matching
the BoolFn mask convention, so M_f is diagonal with entry f(y) at index y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import config
from ._rng import stream
from .boolfn import BoolFn, _butterfly, parity_signs, popcount

_S2 = 1 / np.sqrt(2)

ONE_QUBIT = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
}

TWO_QUBIT = {
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
    "ID": np.eye(4, dtype=complex),
}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Gate:
    """Unitary on 1 or 2 qubits; basis order |q_a q_b> = 00, 01, 10, 11."""

    qubits: tuple[int, ...]
    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        k = len(self.qubits)
        if k not in (1, 2):
            raise CircuitError(f"gate acts on {k} qubits")
        if k == 2 and self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"gate qubits coincide: {self.qubits}")
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (1 << k, 1 << k):
            raise CircuitError(f"matrix shape {mat.shape} does not fit {k} qubits")
        err = np.max(np.abs(mat.conj().T @ mat - np.eye(1 << k)))
        if err > config.STRUCTURAL:
            raise CircuitError(f"gate {self.name or self.qubits} is not unitary (error {err:.2e})")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def named(cls, name: str, *qubits: int) -> "Gate":
        name = name.upper()
        table = ONE_QUBIT if len(qubits) == 1 else TWO_QUBIT
        if name not in table:
            raise CircuitError(f"unknown {len(qubits)}-qubit gate {name!r}")
        return cls(tuple(qubits), table[name], name)

    def dagger(self) -> "Gate":
        return Gate(self.qubits, self.matrix.conj().T, self.name + "^dg" if self.name else "")


@dataclass(frozen=True, eq=False)
class Circuit:
    n: int
    m: int = 0
    layers: tuple[tuple[Gate, ...], ...] = ()
    advice: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        layers = tuple(tuple(layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        N = self.n + self.m
        for depth, layer in enumerate(layers, 1):
            used: set[int] = set()
            for g in layer:
                for q in g.qubits:
                    if not 0 <= q < N:
                        raise CircuitError(f"layer {depth}: qubit {q} outside [0, {N})")
                    if q in used:
                        raise CircuitError(f"layer {depth}: qubit {q} used twice")
                    used.add(q)
        if self.advice is not None:
            adv = np.asarray(self.advice, dtype=complex)
            v = adv.size.bit_length() - 1
            if adv.ndim != 1 or adv.size != 1 << v:
                raise CircuitError("advice length must be a power of two")
            if v > self.m:
                raise CircuitError(f"advice uses {v} qubits but only {self.m} ancillas exist")
            if abs(np.linalg.norm(adv) - 1) > config.STRUCTURAL:
                raise CircuitError("advice state is not normalized")
            object.__setattr__(self, "advice", adv)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def num_qubits(self) -> int:
        return self.n + self.m

    @property
    def v(self) -> int:
        return 0 if self.advice is None else self.advice.size.bit_length() - 1

    def inverse(self) -> "Circuit":
        if self.advice is not None:
            raise CircuitError("inverse of a circuit with advice is not a circuit")
        return Circuit(self.n, self.m, tuple(tuple(g.dagger() for g in layer)
                                             for layer in reversed(self.layers)))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    N: int
    probabilities: np.ndarray

    def __getitem__(self, y: int) -> float:
        return float(self.probabilities[y])


# -- core kernel -------------------------------------------------------------

def _apply_gate(psi: np.ndarray, gate: Gate, N: int) -> np.ndarray:
    """psi has shape (batch,) + (2,)*N; qubit q lives on axis 1 + (N-1-q)."""
    axes = [1 + N - 1 - q for q in gate.qubits]
    k = len(axes)
    g = gate.matrix.reshape((2,) * (2 * k))
    out = np.tensordot(psi, g, axes=(axes, list(range(k, 2 * k))))
    return np.moveaxis(out, list(range(-k, 0)), axes)


def run(circuit: Circuit, states: np.ndarray) -> np.ndarray:
    """Apply the circuit to a (batch, 2^N) array of state vectors."""
    N = circuit.num_qubits
    batch = states.shape[0]
    psi = np.asarray(states, dtype=complex).reshape((batch,) + (2,) * N)
    for layer in circuit.layers:
        for gate in layer:
            psi = _apply_gate(psi, gate, N)
    return psi.reshape(batch, 1 << N)


def initial_states(circuit: Circuit, inputs: Sequence[int]) -> np.ndarray:
    """|x, 0^{m-v}, advice> for every input mask x over all N qubits."""
    N = circuit.num_qubits
    states = np.zeros((len(inputs), 1 << N), dtype=complex)
    adv = np.array([1.0 + 0j]) if circuit.advice is None else circuit.advice
    shift = N - circuit.v
    for row, x in enumerate(inputs):
        for a, amp in enumerate(adv):
            states[row, x | (a << shift)] = amp
    return states


def _check_budget(circuit: Circuit) -> None:
    config.check_guard("max_qubits", circuit.num_qubits, config.MAX_QUBITS)


def _chunks(total: int, N: int):
    size = max(1, (1 << 22) >> N)
    for start in range(0, total, size):
        yield range(start, min(total, start + size))


def outcome_table(circuit: Circuit, inputs: Optional[Sequence[int]] = None) -> np.ndarray:
    """P(y | x) for each input mask x (rows) over all 2^N outcomes (columns)."""
    _check_budget(circuit)
    if inputs is None:
        inputs = range(1 << circuit.n)
    inputs = list(inputs)
    N = circuit.num_qubits
    table = np.empty((len(inputs), 1 << N), dtype=np.float64)
    for rows in _chunks(len(inputs), N):
        psi = run(circuit, initial_states(circuit, [inputs[r] for r in rows]))
        table[rows.start:rows.stop] = np.abs(psi) ** 2
    return table


def simulate(circuit: Circuit, x: int) -> OutcomeDistribution:
    if not 0 <= x < 1 << circuit.n:
        raise CircuitError(f"input mask {x} outside {circuit.n} bits")
    probs = outcome_table(circuit, [x])[0]
    probs.setflags(write=False)
    return OutcomeDistribution(circuit.num_qubits, probs)


def _observable(circuit: Circuit, f: BoolFn) -> np.ndarray:
    if f.n != circuit.num_qubits:
        raise CircuitError(f"observable arity {f.n} != {circuit.num_qubits} qubits")
    return f.as_float()


def expectation(circuit: Circuit, f: BoolFn, x: int) -> float:
    """<x,0,advice| U^dag M_f U |x,0,advice> = sum_y P(y|x) f(y)."""
    diag = _observable(circuit, f)
    return float(simulate(circuit, x).probabilities @ diag)


def expectations(circuit: Circuit, f: BoolFn) -> np.ndarray:
    """expectation(c, f, x) for every input mask x."""
    return outcome_table(circuit) @ _observable(circuit, f)


def parity_correlation(circuit: Circuit, f: BoolFn) -> float:
    """E_x[<U^dag M_f U>_x PAR_n(x)]."""
    vals = expectations(circuit, f)
    return float(vals @ parity_signs(circuit.n)) / (1 << circuit.n)


def _heisenberg_weights(circuit: Circuit) -> np.ndarray:
    """w[y] = sum_x PAR(x) |<y|U^dag|x>|^2 so that tr[Z_[n] U Z_S U^dag] = sum_y w[y] chi_S(y)."""
    if circuit.m:
        raise CircuitError("heisenberg trace needs an ancilla-free circuit")
    config.check_guard("max_trace_qubits", circuit.n, config.MAX_TRACE_QUBITS)
    inv = circuit.inverse()
    n = circuit.n
    par = parity_signs(n)
    w = np.zeros(1 << n)
    for rows in _chunks(1 << n, n):
        psi = run(inv, initial_states(inv, list(rows)))
        w += par[rows.start:rows.stop] @ (np.abs(psi) ** 2)
    return w


def heisenberg_trace(circuit: Circuit, S: int) -> complex:
    """tr[Z_[n] U Z_S U^dag], one statevector pass per basis column."""
    w = _heisenberg_weights(circuit)
    y = np.arange(1 << circuit.n)
    chi = 1 - 2 * (np.array([popcount(int(v)) for v in (y & S)]) & 1)
    return complex(w @ chi)


def heisenberg_traces(circuit: Circuit) -> np.ndarray:
    """All 2^n traces tr[Z_[n] U Z_S U^dag], indexed by S."""
    return _butterfly(_heisenberg_weights(circuit))


def forward_lightcone(circuit: Circuit, j: int) -> frozenset[int]:
    cone = {j}
    for layer in circuit.layers:
        for g in layer:
            if cone.intersection(g.qubits):
                cone.update(g.qubits)
    return frozenset(cone)


# -- generators --------------------------------------------------------------

def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def identity_circuit(n: int, m: int = 0) -> Circuit:
    return Circuit(n, m, ())


def brickwork(n: int, depth: int, seed: int, m: int = 0) -> Circuit:
    """Alternating nearest-neighbour Haar gates on a chain of n+m qubits."""
    rng = stream(seed, "brickwork", n, m, depth)
    N = n + m
    layers = []
    for ell in range(depth):
        layers.append(tuple(Gate((i, i + 1), haar_unitary(4, rng))
                            for i in range(ell % 2, N - 1, 2)))
    return Circuit(n, m, tuple(layers))


def random_circuit(n: int, depth: int, seed: int, m: int = 0, fill: float = 1.0) -> Circuit:
    """Each layer pairs a random subset of the qubits with Haar-random gates."""
    rng = stream(seed, "random_circuit", n, m, depth, fill)
    N = n + m
    layers = []
    for _ in range(depth):
        order = rng.permutation(N)
        gates = []
        for a, b in zip(order[0::2], order[1::2]):
            if rng.random() < fill:
                gates.append(Gate((int(a), int(b)), haar_unitary(4, rng)))
        layers.append(tuple(gates))
    return Circuit(n, m, tuple(layers))


_CLIFFORD_1Q = [np.eye(2, dtype=complex), ONE_QUBIT["H"], ONE_QUBIT["S"],
                ONE_QUBIT["H"] @ ONE_QUBIT["S"], ONE_QUBIT["S"] @ ONE_QUBIT["H"], ONE_QUBIT["X"]]


def random_clifford_circuit(n: int, depth: int, seed: int, m: int = 0, fill: float = 1.0) -> Circuit:
    """Random layers of Clifford 2-qubit gates; outcome probabilities are dyadic."""
    rng = stream(seed, "clifford", n, m, depth, fill)
    N = n + m
    layers = []
    for _ in range(depth):
        order = rng.permutation(N)
        gates = []
        for a, b in zip(order[0::2], order[1::2]):
            if rng.random() >= fill:
                continue
            ent = TWO_QUBIT[("CNOT", "CZ", "SWAP")[int(rng.integers(3))]]
            loc = np.kron(_CLIFFORD_1Q[int(rng.integers(6))], _CLIFFORD_1Q[int(rng.integers(6))])
            gates.append(Gate((int(a), int(b)), loc @ ent, "clifford"))
        layers.append(tuple(gates))
    return Circuit(n, m, tuple(layers))


def trojan_circuit(m: int) -> Circuit:
    """m inputs followed by m ancillas flipped to |1> by X gates."""
    return Circuit(m, m, (tuple(Gate.named("X", m + i) for i in range(m)),))
