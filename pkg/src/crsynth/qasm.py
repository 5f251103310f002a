"""OpenQASM 2.0 subset reader and writer.

Import subset: one quantum register; gate statements from
{u3,u2,u1,u,p,rx,ry,rz,h,x,y,z,s,sdg,t,tdg,cx,cz,cry} with constant-folded
numeric angle expressions over pi, +, -, *, / and unary minus. Measurements,
classical registers, custom gate definitions and conditionals are rejected
with UnsupportedError, never skipped. Gates without a native kind are
materialized exactly as U3 or P with fresh parameter slots.

The writer emits {u3, ry, rz, h, x, z, s, sdg, cx, cz}; CRY gates leave as
their exact four-gate expansion and P(f) as u3(0,0,f). A leading comment
records the accumulated global phase, which the reader restores.
"""
from __future__ import annotations

import ast
import math
import re

import numpy as np

from .circuit import Circuit, make_circuit
from .errors import ExportError, ParseError, UnsupportedError
from .gates import CryClass, GateKind, expand_cry

_PHASE_COMMENT = "// global phase:"

_QREG_RE = re.compile(r"^qreg\s+([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]$")
_ARG_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\s*\[\s*(\d+)\s*\])?$")
_APPLY_RE = re.compile(
    r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^)]*)\))?\s+(.+)$"
)

_UNSUPPORTED_LEADS = ("creg", "measure", "barrier", "gate", "opaque", "if", "reset")


def _eval_angle(expr: str, line: int) -> float:
    """Evaluate a constant angle expression (pi, + - * /, unary minus)."""
    try:
        node = ast.parse(expr.strip(), mode="eval").body
    except SyntaxError:
        raise ParseError(f"bad angle expression {expr!r}", line) from None
    return _eval_node(node, expr, line)


def _eval_node(node: ast.AST, expr: str, line: int) -> float:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand, expr, line)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(
        node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)
    ):
        a = _eval_node(node.left, expr, line)
        b = _eval_node(node.right, expr, line)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if b == 0.0:
            raise ParseError(f"division by zero in {expr!r}", line)
        return a / b
    raise ParseError(f"unsupported construct in angle expression {expr!r}", line)


# name -> (kind, n_angles, mapper to (kind, values))
def _map_gate(name: str, angles: list[float], line: int):
    p2 = math.pi / 2
    table = {
        "u3": (3, lambda a: (GateKind.U3, tuple(a))),
        "u": (3, lambda a: (GateKind.U3, tuple(a))),
        "U": (3, lambda a: (GateKind.U3, tuple(a))),
        "u2": (2, lambda a: (GateKind.U3, (p2, a[0], a[1]))),
        "u1": (1, lambda a: (GateKind.P, tuple(a))),
        "p": (1, lambda a: (GateKind.P, tuple(a))),
        "rx": (1, lambda a: (GateKind.U3, (a[0], -p2, p2))),
        "ry": (1, lambda a: (GateKind.RY, tuple(a))),
        "rz": (1, lambda a: (GateKind.RZ, tuple(a))),
        "h": (0, lambda a: (GateKind.H, ())),
        "x": (0, lambda a: (GateKind.X, ())),
        "y": (0, lambda a: (GateKind.U3, (math.pi, p2, p2))),
        "z": (0, lambda a: (GateKind.Z, ())),
        "s": (0, lambda a: (GateKind.S, ())),
        "sdg": (0, lambda a: (GateKind.SDG, ())),
        "t": (0, lambda a: (GateKind.P, (math.pi / 4,))),
        "tdg": (0, lambda a: (GateKind.P, (-math.pi / 4,))),
        "cx": (0, lambda a: (GateKind.CNOT, ())),
        "CX": (0, lambda a: (GateKind.CNOT, ())),
        "cz": (0, lambda a: (GateKind.CZ, ())),
        "cry": (1, lambda a: (GateKind.CRY, tuple(a))),
    }
    if name not in table:
        raise UnsupportedError(f"unsupported gate {name!r}", line, construct=name)
    n_angles, mapper = table[name]
    if len(angles) != n_angles:
        raise ParseError(f"{name} takes {n_angles} angle(s), got {len(angles)}", line)
    return mapper(angles)


def from_qasm(text: str) -> tuple[Circuit, np.ndarray]:
    """Parse the QASM subset into (Circuit, params)."""
    global_phase = 0.0
    statements: list[tuple[int, str]] = []  # (line number, statement)
    pending = ""
    pending_line = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith(_PHASE_COMMENT):
            try:
                global_phase = float(stripped[len(_PHASE_COMMENT):].split()[0])
            except (ValueError, IndexError):
                raise ParseError("malformed global phase comment", lineno) from None
            continue
        code = raw.split("//", 1)[0]
        for ch in code:
            if not pending.strip():
                pending_line = lineno
            if ch == ";":
                statements.append((pending_line, pending.strip()))
                pending = ""
            else:
                pending += ch
    if not statements:
        if pending.strip():
            raise ParseError(
                f"unterminated statement {pending.strip()!r}", pending_line
            )
        raise ParseError("empty QASM input", 1)
    first_line, first = statements[0]
    if not re.match(r"^OPENQASM\s+2(\.\d+)?$", first):
        raise ParseError(f"expected OPENQASM 2.0 header, got {first!r}", first_line)

    reg_name: str | None = None
    n_qubits = 0
    protos: list[tuple] = []
    for lineno, stmt in statements[1:]:
        if not stmt:
            continue
        if stmt.startswith("include"):
            if '"qelib1.inc"' not in stmt:
                raise UnsupportedError(f"unsupported include {stmt!r}", lineno, "include")
            continue
        m = _QREG_RE.match(stmt)
        if m:
            if reg_name is not None:
                raise UnsupportedError("multiple qreg declarations", lineno, "qreg")
            reg_name, n_qubits = m.group(1), int(m.group(2))
            if n_qubits < 1:
                raise ParseError("empty quantum register", lineno)
            continue
        lead = stmt.split("(")[0].split()[0]
        if lead in _UNSUPPORTED_LEADS:
            raise UnsupportedError(f"unsupported statement {stmt!r}", lineno, lead)
        m = _APPLY_RE.match(stmt)
        if m is None:
            raise ParseError(f"cannot parse statement {stmt!r}", lineno)
        name, paren, args = m.group(1), m.group(2), m.group(3)
        if reg_name is None:
            raise ParseError("gate application before qreg declaration", lineno)
        angles = (
            [_eval_angle(tok, lineno) for tok in paren.split(",")] if paren else []
        )
        kind, values = _map_gate(name, angles, lineno)
        qubits = _parse_args(args, reg_name, n_qubits, lineno)
        if kind.n_qubits == 2:
            if len(qubits) != 2 or qubits[0] is None or qubits[1] is None:
                raise ParseError(f"{name} needs two indexed qubit arguments", lineno)
            if qubits[0] == qubits[1]:
                raise ParseError(f"{name} qubit arguments must differ", lineno)
            protos.append((kind, (qubits[0], qubits[1]), values))
        else:
            if len(qubits) != 1:
                raise ParseError(f"{name} takes one qubit argument", lineno)
            if qubits[0] is None:  # whole-register broadcast
                for q in range(n_qubits):
                    protos.append((kind, (q,), values))
            else:
                protos.append((kind, (qubits[0],), values))
    if pending.strip():
        raise ParseError(f"unterminated statement {pending.strip()!r}", pending_line)
    if reg_name is None:
        raise ParseError("missing qreg declaration", statements[-1][0])
    circ, params = make_circuit(n_qubits, protos, global_phase=global_phase)
    return circ, params


def _parse_args(args: str, reg: str, n: int, line: int) -> list[int | None]:
    out: list[int | None] = []
    for tok in args.split(","):
        m = _ARG_RE.match(tok.strip())
        if m is None or m.group(1) != reg:
            raise ParseError(f"bad qubit argument {tok.strip()!r}", line)
        if m.group(2) is None:
            out.append(None)
        else:
            idx = int(m.group(2))
            if idx >= n:
                raise ParseError(f"qubit index {idx} out of range", line)
            out.append(idx)
    return out


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def to_qasm(circ: Circuit, params) -> str:
    """Emit the circuit in the strict QASM 2.0 subset."""
    p = circ.check_params(params)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circ.n_qubits}];"]
    if circ.global_phase != 0.0:
        lines.insert(0, f"{_PHASE_COMMENT} {_fmt(circ.global_phase)}")
    for g in circ.gates:
        vals = [p[s] for s in g.slots]
        lines.extend(_emit_gate(g.kind, g.qubits, vals))
    return "\n".join(lines) + "\n"


def _emit_gate(kind: GateKind, qubits, vals) -> list[str]:
    q = [f"q[{i}]" for i in qubits]
    if kind is GateKind.U3:
        return [f"u3({_fmt(vals[0])},{_fmt(vals[1])},{_fmt(vals[2])}) {q[0]};"]
    if kind is GateKind.RY:
        return [f"ry({_fmt(vals[0])}) {q[0]};"]
    if kind is GateKind.RZ:
        return [f"rz({_fmt(vals[0])}) {q[0]};"]
    if kind is GateKind.P:
        return [f"u3(0,0,{_fmt(vals[0])}) {q[0]};"]
    if kind in (GateKind.H, GateKind.X, GateKind.Z, GateKind.S, GateKind.SDG):
        return [f"{kind.value} {q[0]};"]
    if kind is GateKind.CNOT:
        return [f"cx {q[0]},{q[1]};"]
    if kind is GateKind.CZ:
        return [f"cz {q[0]},{q[1]};"]
    if kind is GateKind.CRY:
        out = []
        for k, qs, vs in expand_cry(vals[0], qubits[0], qubits[1], CryClass.GENERIC):
            out.extend(_emit_gate(k, qs, list(vs)))
        return out
    raise ExportError(f"gate {kind.name} is not expressible in the QASM subset")
