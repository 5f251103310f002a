import math

import numpy as np
import pytest

from helpers import random_circuit
from crsynth.circuit import Circuit, make_circuit
from crsynth.cost import evaluate
from crsynth.errors import UnsupportedError
from crsynth.gates import GateKind, gate_matrix
from crsynth.lift import lift_circuit, recompress
from crsynth.qasm import from_qasm
from crsynth.synthesis import CouplingGraph, SynthStatus, SynthesisConfig

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\n'


class TestLiftCircuit:
    def test_single_cnot(self):
        c, p = make_circuit(2, [(GateKind.CNOT, (1, 0), ())])
        lifted, lp = lift_circuit(c, p)
        crys = [g for g in lifted.gates if g.kind is GateKind.CRY]
        assert len(crys) == 1
        assert lp[crys[0].slots[0]] == math.pi
        np.testing.assert_allclose(
            lifted.unitary(lp), c.unitary(p), atol=1e-12
        )

    def test_single_cz(self):
        c, p = make_circuit(2, [(GateKind.CZ, (0, 1), ())])
        lifted, lp = lift_circuit(c, p)
        assert lifted.count(GateKind.CRY) == 1
        np.testing.assert_allclose(lifted.unitary(lp), c.unitary(p), atol=1e-12)

    def test_empty_circuit(self):
        lifted, lp = lift_circuit(Circuit.empty(2), [])
        assert len(lifted.gates) == 0

    def test_every_cry_owns_a_block(self):
        rng = np.random.default_rng(0)
        c, p = random_circuit(rng, 3, 30)
        lifted, lp = lift_circuit(c, p)
        n_two = lifted.two_qubit_count()
        assert lifted.count(GateKind.CRY) == n_two
        assert len(lifted.block_ids()) == n_two

    def test_random_circuits_exact(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(2, 4))
            c, p = random_circuit(rng, n, int(rng.integers(1, 31)))
            lifted, lp = lift_circuit(c, p)
            assert np.max(np.abs(lifted.unitary(lp) - c.unitary(p))) < 1e-12

    def test_only_u3_and_cry_remain(self):
        rng = np.random.default_rng(2)
        c, p = random_circuit(rng, 3, 25)
        lifted, _ = lift_circuit(c, p)
        assert {g.kind for g in lifted.gates} <= {GateKind.U3, GateKind.CRY}


class TestRecompress:
    def test_canceling_pair_drops_to_zero(self):
        c, p = from_qasm(HEADER + "cx q[0],q[1];\ncx q[0],q[1];\n")
        rep = recompress((c, p), CouplingGraph.complete(2), SynthesisConfig(seed=0))
        assert rep.cnot_count == 0
        assert rep.status is SynthStatus.OK

    def test_minimal_single_cnot_unchanged(self):
        c, p = from_qasm(HEADER + "cx q[0],q[1];\n")
        rep = recompress((c, p), CouplingGraph.complete(2), SynthesisConfig(seed=0))
        assert rep.cnot_count == 1
        assert rep.f_aligned <= 1e-8

    def test_padded_circuit_strictly_shrinks(self):
        text = (
            'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[3];\n'
            "u3(0.4,0.1,-0.3) q[0];\ncx q[0],q[1];\nu3(1.1,0.2,0.5) q[2];\n"
            "cx q[1],q[2];\nu3(0.7,-0.6,0.9) q[1];\ncx q[0],q[2];\n"
            "cx q[1],q[2];\ncx q[1],q[2];\n"  # canceling pair
            "u3(0.3,0.3,0.3) q[0];\ncx q[0],q[1];\ncx q[0],q[1];\n"  # canceling pair
        )
        c, p = from_qasm(text)
        assert c.two_qubit_count() == 7
        rep = recompress((c, p), CouplingGraph.complete(3), SynthesisConfig(seed=1))
        assert rep.cnot_count < 7
        assert rep.f_aligned <= 1e-8
        target = c.unitary(p)
        final = evaluate(target, rep.circuit, rep.params)
        assert final.f_aligned <= 1e-8

    def test_never_returns_more_cnots(self):
        rng = np.random.default_rng(3)
        for _ in range(8):
            c, p = random_circuit(rng, 2, int(rng.integers(2, 10)))
            inputs = c.two_qubit_count()
            rep = recompress((c, p), CouplingGraph.complete(2),
                             SynthesisConfig(seed=7))
            assert rep.status is SynthStatus.OK
            # comparison against the input's own elementary CNOT count
            from crsynth.synthesis import elementary_form
            fc, fp = elementary_form(c, p, 1e-4)
            assert rep.cnot_count <= fc.count(GateKind.CNOT)

    def test_unitary_input_dispatches_to_synthesis(self):
        u = gate_matrix(GateKind.CNOT, [])
        rep = recompress(u, CouplingGraph.complete(2), SynthesisConfig(seed=2))
        assert rep.cnot_count == 1
        assert rep.status is SynthStatus.OK
