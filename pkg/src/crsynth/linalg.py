"""Dense complex matrix kernels for few-qubit operators.

Conventions used throughout the package:
  * Operators are (d, d) complex128 ndarrays with d = 2**n, 2 <= d <= 64.
  * Qubit 0 is the least-significant bit of the computational-basis index.
  * For a multi-qubit gate, the FIRST listed qubit is the most-significant
    factor of the gate's local ordering, so a CRY passed as (control, target)
    keeps control on the local MSB.
"""
from __future__ import annotations

import numpy as np

from .errors import ArgumentError, ParseError, RangeError

MAX_DIM = 64

UNITARITY_TOL = 1e-10


def n_qubits_of(dim: int) -> int:
    """Return n with 2**n == dim, or raise RangeError."""
    n = int(dim).bit_length() - 1
    if dim < 2 or dim > MAX_DIM or (1 << n) != dim:
        raise RangeError(f"dimension {dim} is not a power of two in [2, {MAX_DIM}]")
    return n


def is_unitary(m: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    d = m.shape[0]
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(d))) < tol)


def check_target_unitary(u: np.ndarray) -> np.ndarray:
    """Validate an ingested target unitary; returns it as complex128."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ArgumentError(f"target must be square, got shape {u.shape}")
    n_qubits_of(u.shape[0])
    if not is_unitary(u):
        raise ArgumentError("target matrix is not unitary within 1e-10")
    return u


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the package's dimension cap."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise RangeError(
            f"kron result dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}"
        )
    return np.kron(a, b)


def _check_qubits(qubits, k: int, n: int) -> None:
    if len(set(qubits)) != len(qubits):
        raise ArgumentError(f"duplicate qubit indices {qubits}")
    if any(q < 0 or q >= n for q in qubits):
        raise ArgumentError(f"qubit indices {qubits} out of range for {n} qubits")
    if 1 << len(qubits) != k:
        raise ArgumentError(f"gate dimension {k} does not match {len(qubits)} qubits")


def _apply_general(m: np.ndarray, g: np.ndarray, qubits, n: int, side: str) -> np.ndarray:
    """Axis-permutation path for gates on three or more qubits."""
    k = len(qubits)
    if side == "left":
        t = m.reshape((2,) * n + (-1,))
        src = [n - 1 - q for q in qubits]
        t = np.moveaxis(t, src, range(k))
        shp = t.shape
        t = (g @ t.reshape(1 << k, -1)).reshape(shp)
        return np.moveaxis(t, range(k), src).reshape(m.shape)
    t = m.reshape((-1,) + (2,) * n)
    src = [1 + n - 1 - q for q in qubits]
    dst = range(1 + n - k, 1 + n)
    t = np.moveaxis(t, src, dst)
    shp = t.shape
    t = (t.reshape(-1, 1 << k) @ g).reshape(shp)
    return np.moveaxis(t, dst, src).reshape(m.shape)


def _apply_left(m: np.ndarray, g: np.ndarray, qubits, n: int) -> np.ndarray:
    """embed(g) @ m for m of shape (2**n, cols); no validation."""
    cols = m.shape[1]
    if len(qubits) > 2:
        return _apply_general(m, g, qubits, n, "left")
    if len(qubits) == 1:
        q = qubits[0]
        # row bits split as (high, bit q, low); columns ride along with low
        t = m.reshape(-1, 2, (1 << q) * cols)
        return np.matmul(g, t).reshape(m.shape)
    a, b = qubits
    hi, lo = (a, b) if a > b else (b, a)
    g4 = g.reshape(2, 2, 2, 2)
    if a < b:  # first listed qubit is the local MSB
        g4 = g4.transpose(1, 0, 3, 2)
    t = m.reshape(-1, 2, 1 << (hi - 1 - lo), 2, (1 << lo) * cols)
    out = np.einsum("pqrs,xrysz->xpyqz", g4, t)
    return out.reshape(m.shape)


def _apply_right(m: np.ndarray, g: np.ndarray, qubits, n: int) -> np.ndarray:
    """m @ embed(g) for m of shape (rows, 2**n); no validation."""
    if len(qubits) > 2:
        return _apply_general(m, g, qubits, n, "right")
    if len(qubits) == 1:
        q = qubits[0]
        t = m.reshape(-1, 2, 1 << q)
        return np.einsum("xbl,bc->xcl", t, g).reshape(m.shape)
    a, b = qubits
    hi, lo = (a, b) if a > b else (b, a)
    g4 = g.reshape(2, 2, 2, 2)
    if a < b:
        g4 = g4.transpose(1, 0, 3, 2)
    t = m.reshape(-1, 2, 1 << (hi - 1 - lo), 2, 1 << lo)
    out = np.einsum("xrysz,rspq->xpyqz", t, g4)
    return out.reshape(m.shape)


def apply_gate(m: np.ndarray, g: np.ndarray, qubits, n: int, side: str = "left") -> np.ndarray:
    """Multiply m by the n-qubit embedding of g without forming the embedding.

    side="left" returns embed(g) @ m, side="right" returns m @ embed(g).
    m may be (2**n, c) for side="left" or (r, 2**n) for side="right".
    """
    g = np.asarray(g, dtype=np.complex128)
    _check_qubits(qubits, g.shape[0], n)
    m = np.asarray(m, dtype=np.complex128)
    if side == "left":
        return _apply_left(m, g, tuple(qubits), n)
    if side == "right":
        return _apply_right(m, g, tuple(qubits), n)
    raise ArgumentError(f"side must be 'left' or 'right', got {side!r}")


def embed_gate(g: np.ndarray, qubits, n: int) -> np.ndarray:
    """Return the 2**n-dimensional operator acting as g on `qubits`."""
    d = 1 << n
    if d > MAX_DIM:
        raise RangeError(f"dimension {d} exceeds {MAX_DIM}")
    return apply_gate(np.eye(d, dtype=np.complex128), g, qubits, n, side="left")


def random_unitary(dim: int, seed: int) -> np.ndarray:
    """Haar-distributed unitary from QR of a complex Gaussian matrix.

    The R-diagonal phases are absorbed (Q @ diag(r_ii/|r_ii|)) so the
    distribution is exactly Haar; deterministic for a given seed.
    """
    n_qubits_of(dim)
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def read_unitary_text(text: str) -> np.ndarray:
    """Parse the repo-wide unitary text format.

    Line 1 is the qubit count n; the next 2**n lines each hold 2*2**n
    whitespace-separated floats (re0 im0 re1 im1 ...), row-major.
    """
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty unitary file", line=1)
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise ParseError(f"expected qubit count, got {lines[0]!r}", line=1) from None
    if n < 1 or (1 << n) > MAX_DIM:
        raise RangeError(f"qubit count {n} outside [1, 6]")
    d = 1 << n
    if len([ln for ln in lines[1:] if ln.strip()]) < d:
        raise ParseError(f"expected {d} matrix rows", line=len(lines))
    rows = []
    idx = 1
    for i in range(d):
        while idx < len(lines) and not lines[idx].strip():
            idx += 1
        try:
            vals = [float(tok) for tok in lines[idx].split()]
        except ValueError:
            raise ParseError("malformed float", line=idx + 1) from None
        if len(vals) != 2 * d:
            raise ParseError(f"expected {2 * d} values, got {len(vals)}", line=idx + 1)
        rows.append([complex(vals[2 * j], vals[2 * j + 1]) for j in range(d)])
        idx += 1
    return np.array(rows, dtype=np.complex128)


def write_unitary_text(u: np.ndarray) -> str:
    u = np.asarray(u, dtype=np.complex128)
    n = n_qubits_of(u.shape[0])
    out = [str(n)]
    for row in u:
        out.append(" ".join(f"{v.real:.17g} {v.imag:.17g}" for v in row))
    return "\n".join(out) + "\n"
