"""Shared test builders: random circuits over the import subset and
reference target unitaries."""
from __future__ import annotations

import numpy as np

from crsynth.circuit import Circuit, make_circuit
from crsynth.gates import GateKind

ONE_QUBIT_KINDS = [
    GateKind.U3, GateKind.RY, GateKind.RZ, GateKind.P, GateKind.H,
    GateKind.X, GateKind.Z, GateKind.S, GateKind.SDG,
]
TWO_QUBIT_KINDS = [GateKind.CNOT, GateKind.CZ, GateKind.CRY]


def random_circuit(
    rng: np.random.Generator,
    n_qubits: int,
    n_gates: int,
    two_qubit_prob: float = 0.35,
) -> tuple[Circuit, np.ndarray]:
    protos = []
    for _ in range(n_gates):
        if n_qubits >= 2 and rng.random() < two_qubit_prob:
            kind = TWO_QUBIT_KINDS[rng.integers(len(TWO_QUBIT_KINDS))]
            qubits = tuple(rng.choice(n_qubits, size=2, replace=False))
        else:
            kind = ONE_QUBIT_KINDS[rng.integers(len(ONE_QUBIT_KINDS))]
            qubits = (int(rng.integers(n_qubits)),)
        vals = tuple(rng.uniform(-np.pi, np.pi, kind.param_count))
        protos.append((kind, qubits, vals))
    return make_circuit(n_qubits, protos)


def qft_matrix(n: int) -> np.ndarray:
    d = 1 << n
    omega = np.exp(2j * np.pi / d)
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return omega ** (j * k) / np.sqrt(d)


def count_qasm_gate(text: str, name: str) -> int:
    return sum(
        1 for line in text.splitlines() if line.split(" ")[0].split("(")[0] == name
    )
