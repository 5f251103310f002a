"""Circuit intermediate representation.

A Circuit is an ordered gate list in temporal order (gates[0] acts first);
the built matrix therefore accumulates each new gate on the left. Parameter
values live outside the structure in a flat real vector; each parametric
gate owns an exclusive set of slot indices into that vector. A circuit-level
global phase register tracks the phase shed by single-qubit merging so that
rebuilt unitaries stay exactly comparable.

Block ids group one CRY with the two U3 gates that precede it on its wires;
they are the removable unit of compression.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ArgumentError
from .gates import GateKind, gate_matrix, u3_decompose
from .linalg import _apply_left

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    slots: tuple[int, ...] = ()
    block_id: int | None = None


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    n_params: int = 0
    global_phase: float = 0.0

    def __post_init__(self):
        seen = np.zeros(self.n_params, dtype=bool)
        blocks: dict[int, list[GateKind]] = {}
        for g in self.gates:
            if len(g.qubits) != g.kind.n_qubits or len(set(g.qubits)) != len(g.qubits):
                raise ArgumentError(f"bad qubit list {g.qubits} for {g.kind.name}")
            if any(q < 0 or q >= self.n_qubits for q in g.qubits):
                raise ArgumentError(f"qubit out of range in {g}")
            if len(g.slots) != g.kind.param_count:
                raise ArgumentError(f"{g.kind.name} needs {g.kind.param_count} slots")
            for s in g.slots:
                if s < 0 or s >= self.n_params or seen[s]:
                    raise ArgumentError(f"slot {s} out of range or shared")
                seen[s] = True
            if g.block_id is not None:
                blocks.setdefault(g.block_id, []).append(g.kind)
        if self.n_params and not seen.all():
            raise ArgumentError("orphan parameter slots")
        for bid, kinds in blocks.items():
            if sorted(k.name for k in kinds) != ["CRY", "U3", "U3"]:
                raise ArgumentError(f"block {bid} must tag one CRY and two U3 gates")

    @classmethod
    def empty(cls, n_qubits: int) -> "Circuit":
        if n_qubits < 1:
            raise ArgumentError(f"need at least one qubit, got {n_qubits}")
        return cls(n_qubits=n_qubits)

    # -- structure edits (all return new circuits) --

    def append_gate(self, kind: GateKind, qubits, block_id: int | None = None) -> "Circuit":
        qubits = tuple(qubits)
        slots = tuple(range(self.n_params, self.n_params + kind.param_count))
        return replace(
            self,
            gates=self.gates + (Gate(kind, qubits, slots, block_id),),
            n_params=self.n_params + kind.param_count,
        )

    def append_block(self, control: int, target: int) -> "Circuit":
        """Append a two-qubit building block: U3 on each wire plus one CRY."""
        if control == target:
            raise ArgumentError("control and target must differ")
        if not (0 <= control < self.n_qubits and 0 <= target < self.n_qubits):
            raise ArgumentError(f"qubits ({control},{target}) out of range")
        bid = self.next_block_id()
        s = self.n_params
        new = (
            Gate(GateKind.U3, (control,), (s, s + 1, s + 2), bid),
            Gate(GateKind.U3, (target,), (s + 3, s + 4, s + 5), bid),
            Gate(GateKind.CRY, (control, target), (s + 6,), bid),
        )
        return replace(self, gates=self.gates + new, n_params=s + 7)

    def remove_block(self, block_id: int) -> tuple["Circuit", dict[int, int]]:
        """Drop a block's three gates; returns the circuit and an old->new slot remap."""
        if block_id not in self.block_ids():
            raise ArgumentError(f"unknown block id {block_id}")
        survivors = [g for g in self.gates if g.block_id != block_id]
        remap: dict[int, int] = {}
        new_gates = []
        for g in survivors:
            new_slots = []
            for s in g.slots:
                remap[s] = len(remap)
                new_slots.append(remap[s])
            new_gates.append(replace(g, slots=tuple(new_slots)))
        return (
            replace(self, gates=tuple(new_gates), n_params=len(remap)),
            remap,
        )

    def next_block_id(self) -> int:
        ids = self.block_ids()
        return max(ids) + 1 if ids else 0

    def block_ids(self) -> list[int]:
        seen: list[int] = []
        for g in self.gates:
            if g.block_id is not None and g.block_id not in seen:
                seen.append(g.block_id)
        return seen

    def cry_slot_of_block(self, block_id: int) -> int:
        for g in self.gates:
            if g.block_id == block_id and g.kind is GateKind.CRY:
                return g.slots[0]
        raise ArgumentError(f"unknown block id {block_id}")

    # -- evaluation --

    def check_params(self, params) -> np.ndarray:
        p = np.asarray(params, dtype=np.float64)
        if p.shape != (self.n_params,):
            raise ArgumentError(
                f"expected {self.n_params} parameters, got shape {p.shape}"
            )
        return p

    def unitary(self, params) -> np.ndarray:
        """Product of embedded gate matrices (last gate leftmost) times e^{i*phase}."""
        p = self.check_params(params)
        d = 1 << self.n_qubits
        m = np.eye(d, dtype=np.complex128)
        for g in self.gates:
            mat = gate_matrix(g.kind, [p[s] for s in g.slots])
            m = _apply_left(m, mat, g.qubits, self.n_qubits)
        if self.global_phase != 0.0:
            m = m * np.exp(1j * self.global_phase)
        return m

    def count(self, kind: GateKind) -> int:
        return sum(1 for g in self.gates if g.kind is kind)

    def single_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.kind.n_qubits == 1)

    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.kind.n_qubits == 2)


def make_circuit(n_qubits: int, protos, global_phase: float = 0.0) -> tuple[Circuit, np.ndarray]:
    """Build (Circuit, params) from (kind, qubits, values, block_id?) tuples."""
    gates = []
    values: list[float] = []
    for proto in protos:
        kind, qubits, vals = proto[0], tuple(proto[1]), tuple(proto[2])
        bid = proto[3] if len(proto) > 3 else None
        if len(vals) != kind.param_count:
            raise ArgumentError(f"{kind.name} needs {kind.param_count} values")
        slots = tuple(range(len(values), len(values) + len(vals)))
        values.extend(float(v) for v in vals)
        gates.append(Gate(kind, qubits, slots, bid))
    circ = Circuit(
        n_qubits=n_qubits,
        gates=tuple(gates),
        n_params=len(values),
        global_phase=global_phase,
    )
    return circ, np.array(values, dtype=np.float64)


def remap_params(params, remap: dict[int, int], n_new: int) -> np.ndarray:
    out = np.zeros(n_new, dtype=np.float64)
    for old, new in remap.items():
        out[new] = params[old]
    return out


@dataclass
class _Run:
    """Pending single-qubit product on one wire during merging."""
    matrix: np.ndarray
    tag: int | None = None


def merge_single_qubit_runs(circ: Circuit, params) -> tuple[Circuit, np.ndarray]:
    """Collapse every maximal single-qubit run into one U3 gate.

    The net SU(2) content of each run becomes a single U3; the residual
    global phase accumulates into the circuit's phase register, so the
    rebuilt unitary is unchanged to rounding. Untagged runs that reduce to
    the identity are dropped outright; a run carrying a block tag is always
    re-emitted so the block keeps its two U3 gates.
    """
    p = circ.check_params(params)
    runs: dict[int, _Run] = {}
    protos: list[tuple] = []
    phase = circ.global_phase

    def flush(wire: int) -> None:
        nonlocal phase
        run = runs.pop(wire, None)
        if run is None:
            return
        theta, phi, lam, alpha = u3_decompose(run.matrix)
        if run.tag is None and abs(theta) < 1e-12 and _near_zero_mod(phi + lam):
            phase += alpha  # identity up to phase: drop the gate
            return
        phase += alpha
        protos.append((GateKind.U3, (wire,), (theta, phi, lam), run.tag))

    for g in circ.gates:
        vals = [p[s] for s in g.slots]
        if g.kind.n_qubits == 1:
            mat = gate_matrix(g.kind, vals)
            run = runs.get(g.qubits[0])
            if run is None:
                runs[g.qubits[0]] = _Run(mat, g.block_id)
            else:
                run.matrix = mat @ run.matrix
                run.tag = g.block_id
        else:
            for q in g.qubits:
                flush(q)
            protos.append((g.kind, g.qubits, tuple(vals), g.block_id))
    for wire in sorted(runs):
        flush(wire)
    out, out_p = make_circuit(circ.n_qubits, protos, global_phase=_wrap_phase(phase))
    return out, out_p


def _near_zero_mod(angle: float, tol: float = 1e-12) -> bool:
    return abs(angle - TWO_PI * round(angle / TWO_PI)) < tol


def _wrap_phase(phase: float) -> float:
    wrapped = math.remainder(phase, TWO_PI)
    return 0.0 if wrapped == 0.0 else wrapped
