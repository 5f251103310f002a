"""Distance and fidelity metrics between a target U and a circuit V(p),
plus the analytic gradient of the phase-aligned cost.

With t(p) = Tr(U^dag V(p)):
  c_hst        = 1 - |t|^2 / d^2
  f_raw        = d - Re(t)            (half the squared Frobenius distance)
  f_aligned    = d - |t|              (raw cost after the optimal global phase)
  fidelity_avg = 1 - d/(d+1) * c_hst
  fidelity_frob = 1 - d/(d+1) + (d - f_aligned)^2 / (d (d+1))

The trace is accumulated by applying circuit gates to U^dag directly
(O(#gates * d^2)); the gradient reuses stored forward partial products so a
full gradient costs O(#gates) gate applications, not O(#gates^2).
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .errors import ArgumentError
from .gates import gate_derivative, gate_matrix
from .linalg import _apply_left, _apply_right


@dataclass(frozen=True)
class CostReport:
    f_raw: float
    f_aligned: float
    c_hst: float
    fidelity_avg: float
    fidelity_frob: float
    trace_inner: complex


def _trace_inner(u: np.ndarray, circ: Circuit, p: np.ndarray) -> complex:
    m = u.conj().T.copy()
    n = circ.n_qubits
    for g in circ.gates:
        mat = gate_matrix(g.kind, [p[s] for s in g.slots])
        m = _apply_left(m, mat, g.qubits, n)
    t = complex(np.trace(m))
    if circ.global_phase != 0.0:
        t *= cmath.exp(1j * circ.global_phase)
    return t


def _check_dims(u: np.ndarray, circ: Circuit) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (1 << circ.n_qubits, 1 << circ.n_qubits):
        raise ArgumentError(
            f"target shape {u.shape} does not match {circ.n_qubits}-qubit circuit"
        )
    return u


def report_from_trace(t: complex, d: int) -> CostReport:
    abs_t = abs(t)
    c_hst = min(max(1.0 - (abs_t * abs_t) / (d * d), 0.0), 1.0)
    f_aligned = d - abs_t
    ratio = d / (d + 1.0)
    return CostReport(
        f_raw=d - t.real,
        f_aligned=f_aligned,
        c_hst=c_hst,
        fidelity_avg=1.0 - ratio * c_hst,
        fidelity_frob=1.0 - ratio + (d - f_aligned) ** 2 / (d * (d + 1.0)),
        trace_inner=t,
    )


def evaluate(u: np.ndarray, circ: Circuit, params) -> CostReport:
    u = _check_dims(u, circ)
    p = circ.check_params(params)
    return report_from_trace(_trace_inner(u, circ, p), 1 << circ.n_qubits)


def metrics_between(u: np.ndarray, v: np.ndarray) -> CostReport:
    """Metrics between two explicit matrices (no circuit involved)."""
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ArgumentError(f"shape mismatch: {u.shape} vs {v.shape}")
    t = complex(np.einsum("ij,ij->", u.conj(), v))
    return report_from_trace(t, u.shape[0])


def gradient(u: np.ndarray, circ: Circuit, params) -> np.ndarray:
    """d f_aligned / d p, computed from closed-form gate derivatives.

    For the gate g owning slot k, dt/dp_k = Tr(U^dag V_after dG V_before);
    the sweep keeps C = U^dag V_after and the stored forward products
    V_before, so each slot costs one gate application plus one O(d^2) trace.
    """
    u = _check_dims(u, circ)
    p = circ.check_params(params)
    n = circ.n_qubits
    d = 1 << n
    grad = np.zeros(circ.n_params, dtype=np.float64)
    if circ.n_params == 0:
        return grad

    gates = circ.gates
    mats = [gate_matrix(g.kind, [p[s] for s in g.slots]) for g in gates]
    forward = [np.eye(d, dtype=np.complex128)]
    for g, mat in zip(gates, mats):
        forward.append(_apply_left(forward[-1], mat, g.qubits, n))

    t = complex(np.trace(u.conj().T @ forward[-1]))
    phase = cmath.exp(1j * circ.global_phase)
    t *= phase
    # Optimal-phase factor; defined as 1 at t = 0.
    w = t.conjugate() / abs(t) if abs(t) > 0.0 else 1.0
    factor = w * phase

    c = u.conj().T.copy()
    for j in range(len(gates) - 1, -1, -1):
        g = gates[j]
        if g.slots:
            vals = [p[s] for s in g.slots]
            for idx, slot in enumerate(g.slots):
                dmat = gate_derivative(g.kind, vals, idx)
                x = _apply_left(forward[j], dmat, g.qubits, n)
                dt = np.einsum("ij,ji->", c, x)
                grad[slot] = -(factor * dt).real
        c = _apply_right(c, mats[j], g.qubits, n)
    return grad


def make_objective(u: np.ndarray, circ: Circuit):
    """Fast (cost, grad) closures minimizing f_aligned for a fixed circuit."""
    u = _check_dims(u, circ)
    d = 1 << circ.n_qubits

    def cost(p: np.ndarray) -> float:
        p = np.asarray(p, dtype=np.float64)
        return d - abs(_trace_inner(u, circ, p))

    def grad(p: np.ndarray) -> np.ndarray:
        return gradient(u, circ, p)

    return cost, grad
