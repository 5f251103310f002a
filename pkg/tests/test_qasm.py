import math

import numpy as np
import pytest

from helpers import count_qasm_gate, random_circuit
from crsynth.circuit import Circuit, make_circuit
from crsynth.errors import ParseError, UnsupportedError
from crsynth.gates import GateKind
from crsynth.qasm import from_qasm, to_qasm

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


class TestFromQasm:
    def test_single_cx(self):
        c, p = from_qasm(HEADER + "qreg q[2];\ncx q[0],q[1];\n")
        assert len(c.gates) == 1
        g = c.gates[0]
        assert g.kind is GateKind.CNOT
        assert g.qubits == (0, 1)

    def test_ry_half_pi(self):
        c, p = from_qasm(HEADER + "qreg q[1];\nry(pi/2) q[0];\n")
        assert c.gates[0].kind is GateKind.RY
        assert p[0] == math.pi / 2

    def test_angle_expressions(self):
        text = HEADER + "qreg q[1];\nrz(-3*pi/4) q[0];\np(0.25e1) q[0];\nu3(pi, -pi/2, 1+2) q[0];\n"
        c, p = from_qasm(text)
        assert p[0] == -3 * math.pi / 4
        assert p[1] == 2.5
        assert tuple(p[2:5]) == (math.pi, -math.pi / 2, 3.0)

    def test_mapped_gates_build_expected_matrices(self):
        cases = {
            "t q[0];": np.diag([1, np.exp(1j * math.pi / 4)]),
            "tdg q[0];": np.diag([1, np.exp(-1j * math.pi / 4)]),
            "y q[0];": np.array([[0, -1j], [1j, 0]]),
            "rx(0.7) q[0];": np.array(
                [[math.cos(0.35), -1j * math.sin(0.35)],
                 [-1j * math.sin(0.35), math.cos(0.35)]]
            ),
            "u2(0.3,0.4) q[0];": None,  # checked for unitarity below
        }
        for stmt, expected in cases.items():
            c, p = from_qasm(HEADER + "qreg q[1];\n" + stmt + "\n")
            v = c.unitary(p)
            if expected is not None:
                np.testing.assert_allclose(v, expected, atol=1e-12)
            np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-12)

    def test_broadcast_single_qubit(self):
        c, p = from_qasm(HEADER + "qreg q[3];\nh q;\n")
        assert [g.qubits for g in c.gates] == [(0,), (1,), (2,)]

    def test_measure_rejected_with_line(self):
        text = HEADER + "qreg q[1];\nh q[0];\nmeasure q[0] -> c[0];\n"
        with pytest.raises(UnsupportedError) as err:
            from_qasm(text)
        assert err.value.line == 5
        assert err.value.construct == "measure"

    @pytest.mark.parametrize(
        "stmt,construct",
        [
            ("creg c[2];", "creg"),
            ("barrier q[0];", "barrier"),
            ("gate foo a { h a; }", "gate"),
            ("if(c==1) x q[0];", "if"),
            ("reset q[0];", "reset"),
            ("ccx q[0],q[0],q[0];", "ccx"),
        ],
    )
    def test_unsupported_statements(self, stmt, construct):
        with pytest.raises(UnsupportedError) as err:
            from_qasm(HEADER + "qreg q[2];\n" + stmt + "\n")
        assert err.value.construct == construct

    def test_syntax_error_reports_line(self):
        with pytest.raises(ParseError) as err:
            from_qasm(HEADER + "qreg q[2];\ncx q[0] q[1];\n")
        assert err.value.line == 4

    def test_missing_header(self):
        with pytest.raises(ParseError):
            from_qasm("qreg q[1];\nh q[0];\n")

    def test_multiple_qreg_rejected(self):
        with pytest.raises(UnsupportedError):
            from_qasm(HEADER + "qreg q[1];\nqreg r[1];\n")

    def test_index_out_of_range(self):
        with pytest.raises(ParseError):
            from_qasm(HEADER + "qreg q[2];\nx q[2];\n")

    def test_unterminated_statement(self):
        with pytest.raises(ParseError):
            from_qasm(HEADER + "qreg q[1];\nh q[0]\n")


class TestToQasm:
    def test_empty_circuit_header_only(self):
        text = to_qasm(Circuit.empty(2), [])
        assert text == 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\n'

    def test_single_cnot_line(self):
        c = Circuit.empty(2).append_gate(GateKind.CNOT, (1, 0))
        text = to_qasm(c, [])
        assert "cx q[1],q[0];" in text
        assert count_qasm_gate(text, "cx") == 1

    def test_cry_emitted_as_expansion(self):
        c = Circuit.empty(2).append_gate(GateKind.CRY, (0, 1))
        text = to_qasm(c, [1.3])
        assert count_qasm_gate(text, "cx") == 2
        assert count_qasm_gate(text, "ry") == 2

    def test_phase_comment_round_trips(self):
        c = Circuit(n_qubits=1, gates=(), n_params=0, global_phase=0.7)
        text = to_qasm(c, [])
        assert text.startswith("// global phase: 0.69999999999999996\n")
        c2, p2 = from_qasm(text)
        assert c2.global_phase == 0.7


class TestRoundTrip:
    def test_random_circuits_exact(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            n = int(rng.integers(1, 5))
            c, p = random_circuit(rng, n, int(rng.integers(1, 41)))
            text = to_qasm(c, p)
            c2, p2 = from_qasm(text)
            np.testing.assert_allclose(c2.unitary(p2), c.unitary(p), atol=1e-12)

    def test_seventeen_digit_angles_bit_exact(self):
        c, p = make_circuit(1, [(GateKind.RY, (0,), (0.1234567890123456789,))])
        c2, p2 = from_qasm(to_qasm(c, p))
        assert p2[0] == p[0]
