"""Fixed-structure synthesis of single-parameter unitary families.

A sweep table stores, for a grid of family parameters alpha, the circuit
parameters solving a FIXED gate structure at each alpha. Rows are produced
in ascending alpha order, each warm-started from its predecessor; queries
at arbitrary alpha interpolate the two bracketing rows (angle-aware, so
coordinates near the wrap seam interpolate along the short arc) and
re-optimize from there. Tables bind to the structure through a content
digest that ignores parameter values.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

from .circuit import Circuit
from .cost import CostReport, evaluate, make_objective
from .errors import (
    ArgumentError,
    RangeError,
    SweepBuildError,
    SweepQueryError,
    TableFormatError,
    TableMismatchError,
)
from .gates import GateKind
from .linalg import MAX_DIM
from .optimizer import minimize
from .synthesis import SynthesisConfig, _SeedFactory

TWO_PI = 2.0 * math.pi

_PAULIS = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def pauli_matrix(ops: str) -> np.ndarray:
    """Kronecker product of the listed Paulis; ops[q] acts on qubit q
    (qubit 0 is the rightmost factor)."""
    ops = ops.upper()
    if not ops or any(c not in _PAULIS for c in ops):
        raise ArgumentError(f"bad Pauli string {ops!r}")
    if 1 << len(ops) > MAX_DIM:
        raise RangeError(f"Pauli string on {len(ops)} qubits exceeds 6 qubits")
    m = _PAULIS[ops[-1]]
    for c in reversed(ops[:-1]):
        m = np.kron(m, _PAULIS[c])
    return m


def pauli_exponential(ops: str, alpha: float) -> np.ndarray:
    """exp(-i*(alpha/2)*P) in closed form cos(a/2) I - i sin(a/2) P
    (P squares to the identity)."""
    ops = ops.upper()
    if set(ops) == {"I"}:
        raise ArgumentError("all-identity Pauli string has no generator")
    p = pauli_matrix(ops)
    d = p.shape[0]
    return math.cos(alpha / 2) * np.eye(d, dtype=np.complex128) - 1j * math.sin(
        alpha / 2
    ) * p


def structure_digest(circ: Circuit) -> str:
    """Hash of the gate structure (kinds, qubits, slot order); parameter
    values do not contribute."""
    h = hashlib.sha256()
    h.update(f"n={circ.n_qubits};".encode())
    for g in circ.gates:
        h.update(
            f"{g.kind.name}:{','.join(map(str, g.qubits))}:"
            f"{','.join(map(str, g.slots))};".encode()
        )
    return h.hexdigest()


def _slot_periods(circ: Circuit) -> np.ndarray:
    """Interpolation period per slot: CRY angles live mod 4*pi, every other
    angle mod 2*pi."""
    periods = np.full(circ.n_params, TWO_PI)
    for g in circ.gates:
        if g.kind is GateKind.CRY:
            periods[g.slots[0]] = 2 * TWO_PI
    return periods


@dataclass
class SweepTable:
    structure_digest: str
    alphas: np.ndarray
    rows: np.ndarray  # shape (len(alphas), n_params)
    eps: float
    pauli: str = ""
    structure_qasm: str = ""

    def __post_init__(self):
        self.alphas = np.asarray(self.alphas, dtype=np.float64)
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if self.alphas.ndim != 1 or np.any(np.diff(self.alphas) <= 0):
            raise ArgumentError("alphas must be strictly increasing")
        if self.rows.shape[0] != self.alphas.size:
            raise ArgumentError("one parameter row required per alpha")

    def validate(self, family, structure: Circuit) -> None:
        """Re-verify that every row solves its alpha within eps."""
        if structure_digest(structure) != self.structure_digest:
            raise TableMismatchError("table was built for a different structure")
        for alpha, row in zip(self.alphas, self.rows):
            f = evaluate(family(alpha), structure, row).f_aligned
            if f > self.eps:
                raise TableFormatError(
                    f"stored row at alpha={alpha:.12g} fails: f={f:.3g} > {self.eps:g}"
                )


def build_sweep_table(
    family, structure: Circuit, grid, cfg: SynthesisConfig
) -> SweepTable:
    """Solve the fixed structure for each grid alpha in ascending order.

    The first row is a seeded multi-start solve; each later row warm-starts
    from its predecessor. A row that stays above eps_success after the
    optimizer's restarts aborts the build.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ArgumentError("grid must be sorted with at least two points")
    eps = cfg.eps_success
    sf = _SeedFactory(cfg.seed)
    rng = sf.rng(21)
    rows = np.zeros((grid.size, structure.n_params))
    prev: np.ndarray | None = None
    for i, alpha in enumerate(grid):
        cost_fn, grad_fn = make_objective(family(alpha), structure)
        if prev is None:
            best = math.inf
            solved = None
            for r in range(max(1, cfg.growth_restarts)):
                x0 = rng.uniform(-math.pi, math.pi, structure.n_params)
                res = minimize(cost_fn, grad_fn, x0,
                               replace(cfg.growth_opt, target_cost=eps,
                                       seed=sf.seed(22, r)))
                best = min(best, res.f_best)
                if res.f_best <= eps:
                    solved = res.x_best
                    break
            if solved is None:
                raise SweepBuildError(
                    f"first row alpha={alpha:.12g} unsolved (best {best:.3g})",
                    alpha=float(alpha),
                )
            rows[i] = solved
        else:
            res = minimize(cost_fn, grad_fn, prev,
                           replace(cfg.compression_opt, target_cost=eps,
                                   seed=sf.seed(23, i)))
            if res.f_best > eps:
                raise SweepBuildError(
                    f"row alpha={alpha:.12g} unsolved (best {res.f_best:.3g})",
                    alpha=float(alpha),
                )
            rows[i] = res.x_best
        prev = rows[i]
    return SweepTable(
        structure_digest=structure_digest(structure),
        alphas=grid,
        rows=rows,
        eps=eps,
    )


def interpolate_row(table: SweepTable, structure: Circuit, alpha: float) -> np.ndarray:
    """Angle-aware linear interpolation between the bracketing rows."""
    alphas = table.alphas
    if alphas.size == 1:
        return table.rows[0].copy()
    j = int(np.searchsorted(alphas, alpha))
    if j < alphas.size and alphas[j] == alpha:  # exact grid hit
        return table.rows[j].copy()
    i = int(np.searchsorted(alphas, alpha, side="right")) - 1
    i = min(max(i, 0), alphas.size - 2)
    lo, hi = alphas[i], alphas[i + 1]
    w = (alpha - lo) / (hi - lo)
    left = table.rows[i]
    right = table.rows[i + 1]
    periods = _slot_periods(structure)
    delta = right - left
    delta -= periods * np.round(delta / periods)
    return left + w * delta


def warm_synthesize(
    family, alpha: float, table: SweepTable, structure: Circuit, cfg: SynthesisConfig
) -> tuple[np.ndarray, CostReport]:
    """Solve the fixed structure at alpha starting from the interpolated
    table rows; alpha may extrapolate at most one grid spacing."""
    if structure_digest(structure) != table.structure_digest:
        raise TableMismatchError("table was built for a different structure")
    alphas = table.alphas
    lo_margin = alphas[1] - alphas[0] if alphas.size > 1 else 0.0
    hi_margin = alphas[-1] - alphas[-2] if alphas.size > 1 else 0.0
    if alpha < alphas[0] - lo_margin or alpha > alphas[-1] + hi_margin:
        raise RangeError(
            f"alpha={alpha:.12g} outside table range "
            f"[{alphas[0] - lo_margin:.12g}, {alphas[-1] + hi_margin:.12g}]"
        )
    x0 = interpolate_row(table, structure, alpha)
    cost_fn, grad_fn = make_objective(family(alpha), structure)
    sf = _SeedFactory(cfg.seed)
    res = minimize(cost_fn, grad_fn, x0,
                   replace(cfg.compression_opt, target_cost=cfg.eps_success,
                           seed=sf.seed(24)))
    if res.f_best > cfg.eps_success:
        raise SweepQueryError(
            f"query at alpha={alpha:.12g} stalled at f={res.f_best:.3g}"
        )
    report = evaluate(family(alpha), structure, res.x_best)
    return res.x_best, report


_MAGIC = "crsynth-sweep-table v1"


def save_table(table: SweepTable, path) -> None:
    lines = [
        _MAGIC,
        f"n_params {table.rows.shape[1]}",
        f"structure_digest {table.structure_digest}",
        f"eps {table.eps:.17g}",
        f"grid {table.alphas.size}",
        f"pauli {table.pauli or '-'}",
    ]
    qasm_lines = table.structure_qasm.splitlines()
    lines.append(f"structure_lines {len(qasm_lines)}")
    lines.extend(qasm_lines)
    lines.append("rows:")
    for alpha, row in zip(table.alphas, table.rows):
        lines.append(" ".join([f"{alpha:.17g}"] + [f"{v:.17g}" for v in row]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_table(path) -> SweepTable:
    with open(path) as fh:
        lines = fh.read().splitlines()
    try:
        if lines[0] != _MAGIC:
            raise TableFormatError(f"bad magic line {lines[0]!r}")
        header: dict[str, str] = {}
        idx = 1
        for key in ("n_params", "structure_digest", "eps", "grid", "pauli"):
            name, _, value = lines[idx].partition(" ")
            if name != key or not value:
                raise TableFormatError(f"expected {key} header, got {lines[idx]!r}")
            header[key] = value
            idx += 1
        name, _, value = lines[idx].partition(" ")
        if name != "structure_lines":
            raise TableFormatError(f"expected structure_lines, got {lines[idx]!r}")
        n_struct = int(value)
        idx += 1
        qasm = "\n".join(lines[idx:idx + n_struct])
        idx += n_struct
        if lines[idx] != "rows:":
            raise TableFormatError(f"expected rows: marker, got {lines[idx]!r}")
        idx += 1
        n_params = int(header["n_params"])
        n_rows = int(header["grid"])
        alphas = np.zeros(n_rows)
        rows = np.zeros((n_rows, n_params))
        for r in range(n_rows):
            vals = [float(tok) for tok in lines[idx + r].split()]
            if len(vals) != n_params + 1:
                raise TableFormatError(f"row {r} has {len(vals) - 1} values")
            alphas[r] = vals[0]
            rows[r] = vals[1:]
    except (IndexError, ValueError) as err:
        raise TableFormatError(f"truncated or malformed table file: {err}") from None
    return SweepTable(
        structure_digest=header["structure_digest"],
        alphas=alphas,
        rows=rows,
        eps=float(header["eps"]),
        pauli="" if header["pauli"] == "-" else header["pauli"],
        structure_qasm=qasm,
    )
