"""Command-line front end.

Subcommands: decompose a unitary file into an optimized QASM circuit,
recompress an existing QASM circuit, build/query sweep tables for
single-parameter families, and evaluate circuit-vs-unitary metrics.
Every command is deterministic given --seed; report files echo the full
configuration next to the per-run results.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .cost import evaluate
from .errors import CrsynthError, InitFailedError, ParseError, RangeError
from .lift import recompress
from .linalg import check_target_unitary, read_unitary_text
from .qasm import _eval_angle, from_qasm, to_qasm
from .sweep import (
    build_sweep_table,
    load_table,
    pauli_exponential,
    save_table,
    warm_synthesize,
)
from .synthesis import (
    CouplingGraph,
    SynthStatus,
    SynthesisConfig,
    SynthesisReport,
    synthesize,
)


def _parse_coupling(spec: str, n: int) -> CouplingGraph:
    if spec == "all":
        return CouplingGraph.complete(n)
    edges = []
    for part in spec.split(","):
        a, sep, b = part.strip().partition("-")
        if not sep:
            raise ParseError(f"bad coupling edge {part!r} (expected like 0-1)")
        edges.append((int(a), int(b)))
    return CouplingGraph(n, tuple(edges))


def _config_from_args(args) -> SynthesisConfig:
    cfg = SynthesisConfig(
        eps_success=args.tol,
        seed=args.seed,
        initial_cells=getattr(args, "cells", 1),
        max_cells=getattr(args, "max_cells", None),
    )
    restarts = getattr(args, "restarts", None)
    if restarts is not None:
        cfg = replace(cfg, growth_restarts=restarts)
    return cfg


def _run_entry(rep: SynthesisReport) -> dict:
    return {
        "seed": rep.seed,
        "status": rep.status.value,
        "cnot_count": rep.cnot_count,
        "single_qubit_count": rep.single_qubit_count,
        "f_aligned": rep.f_aligned,
        "fidelity_avg": rep.fidelity_avg,
        "fidelity_frob": rep.fidelity_frob,
        "wall_time": rep.wall_time,
        "removed_blocks": rep.removed_blocks,
    }


def _write_report(path: str | None, payload: dict) -> None:
    if path:
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def _best_index(reports: list[SynthesisReport]) -> int | None:
    ok = [
        (rep.cnot_count, rep.f_aligned, rep.seed, i)
        for i, rep in enumerate(reports)
        if rep.status is SynthStatus.OK
    ]
    return min(ok)[3] if ok else None


def cmd_decompose(args) -> int:
    with open(args.unitary) as fh:
        u = check_target_unitary(read_unitary_text(fh.read()))
    n = u.shape[0].bit_length() - 1
    graph = _parse_coupling(args.coupling, n)
    base = _config_from_args(args)
    reports = [
        synthesize(u, graph, replace(base, seed=args.seed + k))
        for k in range(args.runs)
    ]
    best = _best_index(reports)
    payload = {
        "command": "decompose",
        "config": {
            "unitary": args.unitary,
            "coupling": args.coupling,
            "tol": args.tol,
            "seed": args.seed,
            "cells": args.cells,
            "max_cells": args.max_cells,
            "restarts": args.restarts,
            "runs": args.runs,
        },
        "runs": [_run_entry(r) for r in reports],
        "best": best,
    }
    _write_report(args.report, payload)
    if best is None:
        print(f"decompose: all {args.runs} run(s) failed to build a structure")
        return 2
    rep = reports[best]
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(to_qasm(rep.circuit, rep.params))
    print(
        f"decompose: CNOT={rep.cnot_count} single-qubit={rep.single_qubit_count} "
        f"f_aligned={rep.f_aligned:.3e} seed={rep.seed} "
        f"({sum(r.status is SynthStatus.OK for r in reports)}/{args.runs} runs ok)"
    )
    return 0


def cmd_recompress(args) -> int:
    with open(args.qasm) as fh:
        circ, params = from_qasm(fh.read())
    graph = _parse_coupling(args.coupling, circ.n_qubits)
    allowed = set(graph.edges)
    for g in circ.gates:
        if len(g.qubits) == 2:
            edge = (min(g.qubits), max(g.qubits))
            if edge not in allowed:
                print(f"error: input uses edge {edge} outside coupling graph",
                      file=sys.stderr)
                return 1
    input_cnots = circ.two_qubit_count()
    cfg = _config_from_args(args)
    rep = recompress((circ, params), graph, cfg)
    payload = {
        "command": "recompress",
        "config": {
            "qasm": args.qasm,
            "coupling": args.coupling,
            "tol": args.tol,
            "seed": args.seed,
        },
        "input_two_qubit_count": input_cnots,
        "runs": [_run_entry(rep)],
        "best": 0,
    }
    _write_report(args.report, payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(to_qasm(rep.circuit, rep.params))
    print(
        f"recompress: CNOT {input_cnots} -> {rep.cnot_count} "
        f"f_aligned={rep.f_aligned:.3e}"
    )
    return 0


def cmd_eval(args) -> int:
    with open(args.qasm) as fh:
        circ, params = from_qasm(fh.read())
    with open(args.unitary) as fh:
        u = check_target_unitary(read_unitary_text(fh.read()))
    rep = evaluate(u, circ, params)
    print(f"f_raw         = {rep.f_raw:.12g}")
    print(f"f_aligned     = {rep.f_aligned:.12g}")
    print(f"c_hst         = {rep.c_hst:.12g}")
    print(f"fidelity_avg  = {rep.fidelity_avg:.12g}")
    print(f"fidelity_frob = {rep.fidelity_frob:.12g}")
    return 0


def _parse_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ParseError(f"bad grid {spec!r} (expected start:stop:count)")
    start = _eval_angle(parts[0], 0)
    stop = _eval_angle(parts[1], 0)
    count = int(parts[2])
    if count < 2 or stop <= start:
        raise ParseError(f"bad grid {spec!r}: need stop > start and count >= 2")
    # Endpoint-exclusive: covers [start, stop) like a periodic sweep.
    return start + (stop - start) * np.arange(count) / count


def cmd_sweep_build(args) -> int:
    with open(args.structure) as fh:
        structure_text = fh.read()
    structure, _ = from_qasm(structure_text)
    grid = _parse_grid(args.grid)
    cfg = SynthesisConfig(eps_success=args.tol, seed=args.seed)
    table = build_sweep_table(
        lambda a: pauli_exponential(args.pauli, a), structure, grid, cfg
    )
    table.pauli = args.pauli
    table.structure_qasm = structure_text
    save_table(table, args.table)
    print(
        f"sweep build: {grid.size} rows over [{grid[0]:.6g}, {grid[-1]:.6g}] "
        f"written to {args.table}"
    )
    return 0


def cmd_sweep_query(args) -> int:
    table = load_table(args.table)
    if args.structure:
        with open(args.structure) as fh:
            structure, _ = from_qasm(fh.read())
    elif table.structure_qasm:
        structure, _ = from_qasm(table.structure_qasm)
    else:
        print("error: table has no embedded structure; pass --structure",
              file=sys.stderr)
        return 1
    pauli = args.pauli or table.pauli
    if not pauli:
        print("error: table has no embedded Pauli string; pass --pauli",
              file=sys.stderr)
        return 1
    alpha = _eval_angle(args.alpha, 0)
    cfg = SynthesisConfig(eps_success=args.tol, seed=args.seed)
    params, rep = warm_synthesize(
        lambda a: pauli_exponential(pauli, a), alpha, table, structure, cfg
    )
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(to_qasm(structure, params))
    print(f"sweep query: alpha={alpha:.12g} f_aligned={rep.f_aligned:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crsynth",
        description="Synthesize and compress small-qubit circuits from unitaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="synthesize a unitary file into QASM")
    d.add_argument("unitary")
    d.add_argument("--coupling", default="all")
    d.add_argument("--tol", type=float, default=1e-8)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--cells", type=int, default=1)
    d.add_argument("--max-cells", dest="max_cells", type=int, default=None)
    d.add_argument("--restarts", type=int, default=None)
    d.add_argument("--out")
    d.add_argument("--report")
    d.add_argument("--runs", type=int, default=1)
    d.set_defaults(func=cmd_decompose)

    r = sub.add_parser("recompress", help="re-optimize an existing QASM circuit")
    r.add_argument("qasm")
    r.add_argument("--coupling", default="all")
    r.add_argument("--tol", type=float, default=1e-8)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out")
    r.add_argument("--report")
    r.set_defaults(func=cmd_recompress)

    e = sub.add_parser("eval", help="print circuit-vs-unitary metrics")
    e.add_argument("qasm")
    e.add_argument("unitary")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="parameter-family sweep tables")
    ssub = s.add_subparsers(dest="sweep_command", required=True)
    sb = ssub.add_parser("build", help="build a sweep table over a grid")
    sb.add_argument("pauli")
    sb.add_argument("--grid", required=True)
    sb.add_argument("--structure", required=True)
    sb.add_argument("--table", default="sweep-table.txt")
    sb.add_argument("--tol", type=float, default=1e-8)
    sb.add_argument("--seed", type=int, default=0)
    sb.set_defaults(func=cmd_sweep_build)
    sq = ssub.add_parser("query", help="solve one alpha from a sweep table")
    sq.add_argument("--table", required=True)
    sq.add_argument("--alpha", required=True)
    sq.add_argument("--out")
    sq.add_argument("--structure")
    sq.add_argument("--pauli")
    sq.add_argument("--tol", type=float, default=1e-8)
    sq.add_argument("--seed", type=int, default=0)
    sq.set_defaults(func=cmd_sweep_query)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InitFailedError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (CrsynthError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
