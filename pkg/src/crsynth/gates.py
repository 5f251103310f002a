"""Gate alphabet: matrices, closed-form parameter derivatives, and the
classification/expansion rules for controlled-Ry gates.

Matrix conventions (two-qubit gates have control on the local MSB):
  Ry(t)  = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]
  Rz(t)  = diag(exp(-it/2), exp(it/2))
  P(f)   = diag(1, exp(if))
  U3(t,p,l) = [[cos(t/2), -e^{il} sin(t/2)], [e^{ip} sin(t/2), e^{i(p+l)} cos(t/2)]]
  CRY(t) = |0><0| (x) I + |1><1| (x) Ry(t)
A CRY angle is periodic mod 4*pi (Ry(2*pi) = -I is a control-side Z, not
the identity), so angle bookkeeping here never reduces mod 2*pi.
"""
from __future__ import annotations

import cmath
import math
from enum import Enum

import numpy as np

from .errors import ArgumentError, InternalError

TWO_PI = 2.0 * math.pi


class GateKind(Enum):
    U3 = "u3"
    RY = "ry"
    RZ = "rz"
    P = "p"
    H = "h"
    X = "x"
    Z = "z"
    S = "s"
    SDG = "sdg"
    CRY = "cry"
    CNOT = "cx"
    CZ = "cz"

    @property
    def param_count(self) -> int:
        return _PARAM_COUNT[self]

    @property
    def n_qubits(self) -> int:
        return 2 if self in (GateKind.CRY, GateKind.CNOT, GateKind.CZ) else 1


_PARAM_COUNT = {
    GateKind.U3: 3,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.P: 1,
    GateKind.CRY: 1,
    GateKind.H: 0,
    GateKind.X: 0,
    GateKind.Z: 0,
    GateKind.S: 0,
    GateKind.SDG: 0,
    GateKind.CNOT: 0,
    GateKind.CZ: 0,
}


class CryClass(Enum):
    TRIVIAL = "trivial"        # CRY ~ I          (theta ~ 0 mod 4pi)
    CONTROL_Z = "control_z"    # CRY ~ Z(control) (theta ~ 2pi mod 4pi)
    SINGLE_CNOT = "single_cnot"  # theta ~ pi mod 2pi
    GENERIC = "generic"


_S2 = 1.0 / math.sqrt(2.0)
_H = np.array([[_S2, _S2], [_S2, -_S2]], dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_S = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
_SDG = np.array([[1, 0], [0, -1j]], dtype=np.complex128)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
_CZ = np.diag([1, 1, 1, -1]).astype(np.complex128)


def ry_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz_matrix(theta: float) -> np.ndarray:
    e = cmath.exp(0.5j * theta)
    return np.array([[e.conjugate(), 0], [0, e]], dtype=np.complex128)


def phase_matrix(phi: float) -> np.ndarray:
    return np.array([[1, 0], [0, cmath.exp(1j * phi)]], dtype=np.complex128)


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -cmath.exp(1j * lam) * s],
            [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
        ],
        dtype=np.complex128,
    )


def cry_matrix(theta: float) -> np.ndarray:
    m = np.eye(4, dtype=np.complex128)
    m[2:, 2:] = ry_matrix(theta)
    return m


def gate_matrix(kind: GateKind, params) -> np.ndarray:
    if len(params) != kind.param_count:
        raise ArgumentError(
            f"{kind.name} takes {kind.param_count} parameters, got {len(params)}"
        )
    if kind is GateKind.U3:
        return u3_matrix(*params)
    if kind is GateKind.RY:
        return ry_matrix(params[0])
    if kind is GateKind.RZ:
        return rz_matrix(params[0])
    if kind is GateKind.P:
        return phase_matrix(params[0])
    if kind is GateKind.CRY:
        return cry_matrix(params[0])
    return {
        GateKind.H: _H,
        GateKind.X: _X,
        GateKind.Z: _Z,
        GateKind.S: _S,
        GateKind.SDG: _SDG,
        GateKind.CNOT: _CNOT,
        GateKind.CZ: _CZ,
    }[kind]


def gate_derivative(kind: GateKind, params, idx: int) -> np.ndarray:
    """Closed-form partial derivative of the gate matrix w.r.t. params[idx]."""
    if kind.param_count == 0:
        raise ArgumentError(f"{kind.name} has no parameters")
    if idx >= kind.param_count or idx < 0:
        raise ArgumentError(f"parameter index {idx} out of range for {kind.name}")
    if kind is GateKind.RY:
        return 0.5 * ry_matrix(params[0] + math.pi)
    if kind is GateKind.RZ:
        return 0.5 * rz_matrix(params[0] + math.pi)
    if kind is GateKind.P:
        d = np.zeros((2, 2), dtype=np.complex128)
        d[1, 1] = 1j * cmath.exp(1j * params[0])
        return d
    if kind is GateKind.CRY:
        d = np.zeros((4, 4), dtype=np.complex128)
        d[2:, 2:] = 0.5 * ry_matrix(params[0] + math.pi)
        return d
    # U3: entrywise differentiation of the definition.
    theta, phi, lam = params
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    ep, el, epl = cmath.exp(1j * phi), cmath.exp(1j * lam), cmath.exp(1j * (phi + lam))
    if idx == 0:
        return 0.5 * np.array(
            [[-s, -el * c], [ep * c, -epl * s]], dtype=np.complex128
        )
    if idx == 1:
        return np.array([[0, 0], [1j * ep * s, 1j * epl * c]], dtype=np.complex128)
    return np.array([[0, -1j * el * s], [0, 1j * epl * c]], dtype=np.complex128)


def classify_cry(theta: float, tol: float) -> CryClass:
    if not 0.0 < tol <= 0.1:
        raise ArgumentError(f"classification tolerance {tol} outside (0, 0.1]")
    s, c = math.sin(theta / 2), math.cos(theta / 2)
    if abs(s) < tol:
        return CryClass.TRIVIAL if c > 0 else CryClass.CONTROL_Z
    if abs(c) < tol:
        return CryClass.SINGLE_CNOT
    return CryClass.GENERIC


def snap_cry_angle(theta: float, klass: CryClass) -> float:
    """Snap theta to the exact special angle for its class.

    SINGLE_CNOT snaps to the nearest odd multiple of pi, TRIVIAL and
    CONTROL_Z to the nearest multiple of 2*pi; GENERIC angles pass through.
    """
    if klass is CryClass.SINGLE_CNOT:
        return (2.0 * math.floor(theta / TWO_PI) + 1.0) * math.pi
    if klass in (CryClass.TRIVIAL, CryClass.CONTROL_Z):
        return TWO_PI * math.floor(theta / TWO_PI + 0.5)
    return theta


def expand_cry(theta: float, control: int, target: int, klass: CryClass):
    """Expand CRY(theta) into an exactly-equal gate sequence.

    Returns a temporally ordered list of (kind, qubits, params) triples whose
    embedded product equals cry_matrix(theta) with no global-phase slack.
    SINGLE_CNOT expects theta snapped to an odd multiple of pi, TRIVIAL and
    CONTROL_Z to a multiple of 2*pi (see snap_cry_angle).
    """
    cq, tq = (control,), (target,)
    if klass is CryClass.GENERIC:
        return [
            (GateKind.RY, tq, (theta / 2.0,)),
            (GateKind.CNOT, (control, target), ()),
            (GateKind.RY, tq, (-theta / 2.0,)),
            (GateKind.CNOT, (control, target), ()),
        ]
    if klass is CryClass.TRIVIAL:
        _require_snapped(theta, klass, theta / TWO_PI, even=True)
        return []
    if klass is CryClass.CONTROL_Z:
        _require_snapped(theta, klass, theta / TWO_PI, even=False)
        return [(GateKind.Z, cq, ())]
    # SINGLE_CNOT: CRY(m*pi) = [P(-/+pi/2) (x) S] CNOT [I (x) Sdg], with the
    # control phase sign set by m mod 4 (Ry(pi) = -iY vs Ry(3pi) = +iY).
    m = round(theta / math.pi)
    if m % 2 != 1 or abs(theta - m * math.pi) > 1e-9:
        raise InternalError(
            f"SINGLE_CNOT expansion requires theta snapped to odd pi, got {theta}"
        )
    sign = -1.0 if m % 4 == 1 else 1.0
    return [
        (GateKind.SDG, tq, ()),
        (GateKind.CNOT, (control, target), ()),
        (GateKind.S, tq, ()),
        (GateKind.P, cq, (sign * math.pi / 2.0,)),
    ]


def _require_snapped(theta: float, klass: CryClass, halves: float, even: bool) -> None:
    k = round(halves)
    if abs(halves - k) > 1e-9 or (k % 2 == 0) != even:
        raise InternalError(f"{klass.name} expansion requires snapped theta, got {theta}")


def u3_decompose(m: np.ndarray):
    """Write a 2x2 unitary as e^{i*alpha} * U3(theta, phi, lam).

    Returns (theta, phi, lam, alpha); the reconstruction is exact to
    rounding for unitary input.
    """
    a00, a01, a10, a11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    theta = 2.0 * math.atan2(abs(a10), abs(a00))
    tiny = 1e-14
    if abs(a10) < tiny:  # diagonal
        alpha = cmath.phase(a00)
        phi = cmath.phase(a11) - alpha
        lam = 0.0
    elif abs(a00) < tiny:  # anti-diagonal
        alpha = cmath.phase(-a01)
        phi = cmath.phase(a10) - alpha
        lam = 0.0
    else:
        alpha = cmath.phase(a00)
        phi = cmath.phase(a10) - alpha
        lam = cmath.phase(-a01) - alpha
    return theta, phi, lam, alpha
