import math

import numpy as np
import pytest

from crsynth.errors import ArgumentError, InternalError
from crsynth.gates import (
    CryClass,
    GateKind,
    classify_cry,
    cry_matrix,
    expand_cry,
    gate_derivative,
    gate_matrix,
    snap_cry_angle,
    u3_decompose,
    u3_matrix,
)
from crsynth.linalg import embed_gate, random_unitary

PARAMETRIC = [GateKind.U3, GateKind.RY, GateKind.RZ, GateKind.P, GateKind.CRY]
CONSTANT = [GateKind.H, GateKind.X, GateKind.Z, GateKind.S, GateKind.SDG,
            GateKind.CNOT, GateKind.CZ]


class TestGateMatrix:
    def test_cry_at_zero_is_identity(self):
        np.testing.assert_allclose(gate_matrix(GateKind.CRY, [0.0]), np.eye(4), atol=0)

    def test_cry_at_two_pi_is_control_z(self):
        np.testing.assert_allclose(
            gate_matrix(GateKind.CRY, [2 * math.pi]), np.diag([1, 1, -1, -1]), atol=1e-15
        )

    def test_u3_pi_0_pi_is_x(self):
        np.testing.assert_allclose(
            gate_matrix(GateKind.U3, [math.pi, 0.0, math.pi]),
            gate_matrix(GateKind.X, []),
            atol=1e-15,
        )

    def test_constant_gates_unitary(self):
        for kind in CONSTANT:
            m = gate_matrix(kind, [])
            d = m.shape[0]
            np.testing.assert_allclose(m.conj().T @ m, np.eye(d), atol=1e-15)

    def test_wrong_arity(self):
        with pytest.raises(ArgumentError):
            gate_matrix(GateKind.RY, [1.0, 2.0])
        with pytest.raises(ArgumentError):
            gate_matrix(GateKind.U3, [1.0])


class TestGateDerivative:
    def test_ry_derivative_at_zero(self):
        np.testing.assert_allclose(
            gate_derivative(GateKind.RY, [0.0], 0),
            0.5 * np.array([[0, -1], [1, 0]]),
            atol=1e-15,
        )

    def test_cry_control_zero_block_untouched(self):
        d = gate_derivative(GateKind.CRY, [0.0], 0)
        np.testing.assert_array_equal(d[:2, :], np.zeros((2, 4)))
        np.testing.assert_array_equal(d[:, :2], np.zeros((4, 2)))

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        h = 1e-6
        for _ in range(100):
            kind = PARAMETRIC[rng.integers(len(PARAMETRIC))]
            params = list(rng.uniform(-2 * math.pi, 2 * math.pi, kind.param_count))
            idx = int(rng.integers(kind.param_count))
            plus, minus = list(params), list(params)
            plus[idx] += h
            minus[idx] -= h
            fd = (gate_matrix(kind, plus) - gate_matrix(kind, minus)) / (2 * h)
            np.testing.assert_allclose(
                gate_derivative(kind, params, idx), fd, atol=1e-8
            )

    def test_non_parametric_rejected(self):
        with pytest.raises(ArgumentError):
            gate_derivative(GateKind.X, [], 0)


class TestClassifyCry:
    def test_trivial(self):
        assert classify_cry(0.0, 1e-4) is CryClass.TRIVIAL

    def test_control_z(self):
        assert classify_cry(2 * math.pi, 1e-4) is CryClass.CONTROL_Z

    def test_single_cnot_near_pi(self):
        assert classify_cry(math.pi + 5e-5, 1e-4) is CryClass.SINGLE_CNOT

    def test_generic_whenever_both_margins_hold(self):
        rng = np.random.default_rng(8)
        tol = 1e-3
        for theta in rng.uniform(0, 4 * math.pi, 500):
            klass = classify_cry(theta, tol)
            s, c = abs(math.sin(theta / 2)), abs(math.cos(theta / 2))
            if s >= tol and c >= tol:
                assert klass is CryClass.GENERIC

    def test_tolerance_bounds(self):
        with pytest.raises(ArgumentError):
            classify_cry(1.0, 0.0)
        with pytest.raises(ArgumentError):
            classify_cry(1.0, 0.2)


def _expansion_product(theta, control, target, klass, n=2):
    prod = np.eye(1 << n, dtype=complex)
    for kind, qubits, vals in expand_cry(theta, control, target, klass):
        prod = embed_gate(gate_matrix(kind, list(vals)), qubits, n) @ prod
    return prod


class TestExpandCry:
    def test_trivial_is_empty(self):
        assert expand_cry(0.0, 0, 1, CryClass.TRIVIAL) == []

    def test_generic_product_matches(self):
        ref = embed_gate(cry_matrix(1.3), (0, 1), 2)
        np.testing.assert_allclose(
            _expansion_product(1.3, 0, 1, CryClass.GENERIC), ref, atol=1e-12
        )

    def test_single_cnot_product_matches(self):
        for theta in (math.pi, -math.pi, 3 * math.pi):
            ref = embed_gate(cry_matrix(theta), (1, 0), 2)
            np.testing.assert_allclose(
                _expansion_product(theta, 1, 0, CryClass.SINGLE_CNOT), ref, atol=1e-12
            )

    def test_control_z_product_matches(self):
        ref = embed_gate(cry_matrix(2 * math.pi), (0, 1), 2)
        np.testing.assert_allclose(
            _expansion_product(2 * math.pi, 0, 1, CryClass.CONTROL_Z), ref, atol=1e-12
        )

    def test_random_angles_phase_exact(self):
        rng = np.random.default_rng(9)
        for theta in rng.uniform(0, 4 * math.pi, 1000):
            klass = classify_cry(theta, 1e-6)
            snapped = snap_cry_angle(theta, klass)
            prod = _expansion_product(snapped, 1, 0, klass)
            ref = embed_gate(cry_matrix(snapped), (1, 0), 2)
            assert np.max(np.abs(prod - ref)) < 1e-12

    def test_unsnapped_angle_rejected(self):
        with pytest.raises(InternalError):
            expand_cry(1.3, 0, 1, CryClass.SINGLE_CNOT)
        with pytest.raises(InternalError):
            expand_cry(2 * math.pi, 0, 1, CryClass.TRIVIAL)


class TestSnapCryAngle:
    def test_single_cnot_snaps_to_nearest_odd_pi(self):
        assert snap_cry_angle(math.pi + 0.3, CryClass.SINGLE_CNOT) == math.pi
        assert snap_cry_angle(2.5 * math.pi, CryClass.SINGLE_CNOT) == 3 * math.pi
        assert snap_cry_angle(-0.8 * math.pi, CryClass.SINGLE_CNOT) == -math.pi

    def test_trivial_snaps_to_two_pi_multiple(self):
        assert snap_cry_angle(0.01, CryClass.TRIVIAL) == 0.0
        assert snap_cry_angle(2 * math.pi - 0.01, CryClass.CONTROL_Z) == 2 * math.pi

    def test_generic_passes_through(self):
        assert snap_cry_angle(1.234, CryClass.GENERIC) == 1.234


class TestU3Decompose:
    def test_reconstruction_exact(self):
        rng = np.random.default_rng(10)
        for seed in range(200):
            m = random_unitary(2, seed)
            theta, phi, lam, alpha = u3_decompose(m)
            rebuilt = np.exp(1j * alpha) * u3_matrix(theta, phi, lam)
            np.testing.assert_allclose(rebuilt, m, atol=1e-12)

    def test_diagonal_and_antidiagonal(self):
        for m in (np.diag([1j, -1]), np.array([[0, 1j], [1, 0]], dtype=complex)):
            theta, phi, lam, alpha = u3_decompose(m)
            rebuilt = np.exp(1j * alpha) * u3_matrix(theta, phi, lam)
            np.testing.assert_allclose(rebuilt, m, atol=1e-14)
