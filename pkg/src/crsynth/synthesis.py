"""Adaptive circuit-compression synthesis.

Pipeline: build a periodic structure of two-qubit building blocks, grow it
until the optimization solves the target, compress it by tentatively
removing blocks while re-optimizing the survivors, then expand the
controlled-Ry gates into elementary CNOT/U3 form and polish once more.

All randomness (initial points, compression order, restart perturbations)
derives from the config seed, so a synthesis run is reproducible modulo
wall time.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .circuit import Circuit, make_circuit, merge_single_qubit_runs, remap_params
from .cost import evaluate, make_objective
from .errors import ArgumentError, FinalizeError, InitFailedError
from .gates import CryClass, GateKind, classify_cry, expand_cry, snap_cry_angle
from .linalg import check_target_unitary
from .optimizer import OptimizerConfig, minimize

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CouplingGraph:
    """Qubit pairs on which two-qubit gates are permitted."""

    n_qubits: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        norm = sorted({(min(a, b), max(a, b)) for a, b in self.edges})
        for a, b in norm:
            if a == b or a < 0 or b >= self.n_qubits:
                raise ArgumentError(f"bad edge ({a},{b}) for {self.n_qubits} qubits")
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def complete(cls, n: int) -> "CouplingGraph":
        return cls(n, tuple((a, b) for a in range(n) for b in range(a + 1, n)))

    @classmethod
    def line(cls, n: int) -> "CouplingGraph":
        return cls(n, tuple((q, q + 1) for q in range(n - 1)))

    def is_connected(self) -> bool:
        if self.n_qubits <= 1:
            return True
        adj: dict[int, list[int]] = {q: [] for q in range(self.n_qubits)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = {0}
        stack = [0]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == self.n_qubits


def _default_growth_opt() -> OptimizerConfig:
    return OptimizerConfig(max_iters=3000, grad_tol=1e-8, restart_count=1,
                           perturbation_scale=0.3, stall_iters=80)


def _default_compression_opt() -> OptimizerConfig:
    return OptimizerConfig(max_iters=1200, grad_tol=1e-8, restart_count=1,
                           perturbation_scale=0.15, stall_iters=60)


@dataclass(frozen=True)
class SynthesisConfig:
    eps_success: float = 1e-8
    initial_cells: int = 1
    max_cells: int | None = None  # None: expressibility bound + slack
    growth_restarts: int = 3
    growth_opt: OptimizerConfig = field(default_factory=_default_growth_opt)
    compression_opt: OptimizerConfig = field(default_factory=_default_compression_opt)
    tol_class: float = 1e-4
    max_rounds: int = 20
    seed: int = 0
    # Try pinning each surviving generic CRY angle to an odd multiple of pi
    # before expansion (accepted only when re-optimization keeps the cost
    # under eps_success); each success saves one CNOT in the expansion.
    snap_generic: bool = True

    def __post_init__(self):
        if self.eps_success <= 0:
            raise ArgumentError("eps_success must be positive")
        if self.initial_cells < 1:
            raise ArgumentError("initial_cells must be >= 1")
        if not 0.0 < self.tol_class <= 0.1:
            raise ArgumentError("tol_class must lie in (0, 0.1]")


class SynthStatus(Enum):
    OK = "ok"
    INIT_FAILED = "init_failed"


@dataclass
class SynthesisReport:
    circuit: Circuit
    params: np.ndarray
    cnot_count: int
    single_qubit_count: int
    f_aligned: float
    fidelity_avg: float
    fidelity_frob: float
    wall_time: float
    seed: int
    removed_blocks: int
    status: SynthStatus


class _SeedFactory:
    """Deterministic child seeds/generators derived from one master seed."""

    def __init__(self, seed: int):
        self._seed = int(seed) & (2**63 - 1)

    def rng(self, *keys: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence((self._seed,) + keys))

    def seed(self, *keys: int) -> int:
        ss = np.random.SeedSequence((self._seed,) + keys)
        return int(ss.generate_state(1, dtype=np.uint64)[0])


def default_max_cells(n_qubits: int, blocks_per_cell: int) -> int:
    """Cell count giving two-qubit-gate headroom over the generic-unitary
    sufficiency bound ceil((4^n - 3n - 1)/4), plus two cells of slack."""
    if blocks_per_cell == 0:
        return 1
    min_blocks = max(1, math.ceil((4**n_qubits - 3 * n_qubits - 1) / 4))
    return math.ceil(min_blocks / blocks_per_cell) + 2


def build_initial_structure(n: int, graph: CouplingGraph, cells: int) -> Circuit:
    """`cells` repetitions of one building block per coupling edge (edges in
    lexicographic order, control on the lower qubit), then one trailing U3
    per qubit so every wire ends in a free rotation."""
    if graph.n_qubits != n:
        raise ArgumentError(f"graph has {graph.n_qubits} qubits, expected {n}")
    if not graph.is_connected():
        raise ArgumentError("coupling graph must be connected")
    if cells < 1:
        raise ArgumentError("cells must be >= 1")
    c = Circuit.empty(n)
    for _ in range(cells):
        for a, b in graph.edges:
            c = c.append_block(a, b)
    for q in range(n):
        c = c.append_gate(GateKind.U3, (q,))
    return c


def _carry_params(prev: Circuit, prev_p: np.ndarray, new: Circuit) -> np.ndarray:
    """Warm start for a one-cell-larger structure: copy the shared block
    prefix and the trailing rotations, zero the new cell (zero blocks are
    the identity, so the starting cost equals the previous best)."""
    n3 = 3 * prev.n_qubits
    out = np.zeros(new.n_params)
    shared = prev.n_params - n3
    out[:shared] = prev_p[:shared]
    out[new.n_params - n3:] = prev_p[shared:]
    return out


def grow_and_solve(
    u: np.ndarray, graph: CouplingGraph, cfg: SynthesisConfig
) -> tuple[Circuit, np.ndarray]:
    """Increase the cell count until multi-start optimization reaches
    eps_success; raises InitFailedError with the best attempt otherwise."""
    u = check_target_unitary(u)
    if u.shape[0] != 1 << graph.n_qubits:
        raise ArgumentError("target dimension does not match coupling graph")
    sf = _SeedFactory(cfg.seed)
    rng = sf.rng(1)
    eps = cfg.eps_success
    max_cells = cfg.max_cells
    if max_cells is None:
        max_cells = max(cfg.initial_cells,
                        default_max_cells(graph.n_qubits, len(graph.edges)))
    best = (math.inf, None, None)  # (f, circuit, params)
    prev: tuple[Circuit, np.ndarray] | None = None
    trial = 0
    for cells in range(cfg.initial_cells, max_cells + 1):
        circ = build_initial_structure(graph.n_qubits, graph, cells)
        cost_fn, grad_fn = make_objective(u, circ)
        cell_best: tuple[float, np.ndarray | None] = (math.inf, None)
        for r in range(max(1, cfg.growth_restarts)):
            if r == 0 and prev is not None:
                x0 = _carry_params(prev[0], prev[1], circ)
            else:
                x0 = rng.uniform(-math.pi, math.pi, circ.n_params)
            trial += 1
            opt = replace(cfg.growth_opt, target_cost=eps, seed=sf.seed(2, trial))
            res = minimize(cost_fn, grad_fn, x0, opt)
            if res.f_best < cell_best[0]:
                cell_best = (res.f_best, res.x_best)
            if res.f_best <= eps:
                return circ, res.x_best
        prev = (circ, cell_best[1])
        if cell_best[0] < best[0]:
            best = (cell_best[0], circ, cell_best[1])
    raise InitFailedError(
        f"no structure up to {max_cells} cells reached {eps:g} (best {best[0]:.3g})",
        circuit=best[1],
        params=best[2],
        f_best=best[0],
    )


def _minimize_frozen(u, circ, p0, frozen, opt_cfg):
    """Minimize over all slots except `frozen`; returns (params, f_best)."""
    free = np.array([i for i in range(circ.n_params) if i not in frozen], dtype=int)
    cost_fn, grad_fn = make_objective(u, circ)
    base = np.array(p0, dtype=np.float64)
    if free.size == 0:
        return base, cost_fn(base)

    def fill(xf):
        v = base.copy()
        v[free] = xf
        return v

    res = minimize(
        lambda xf: cost_fn(fill(xf)),
        lambda xf: grad_fn(fill(xf))[free],
        base[free],
        opt_cfg,
    )
    return fill(res.x_best), res.f_best


def _delete_special_crys(circ: Circuit, p: np.ndarray, tol: float):
    """Drop CRYs classified trivial/control-Z at the current parameters,
    dissolving their blocks (a control-Z leaves a plain Z behind). Returns
    (circuit, params, count) before any re-optimization, or None."""
    doomed: dict[int, CryClass] = {}
    for i, g in enumerate(circ.gates):
        if g.kind is GateKind.CRY:
            klass = classify_cry(p[g.slots[0]], tol)
            if klass in (CryClass.TRIVIAL, CryClass.CONTROL_Z):
                doomed[i] = klass
    if not doomed:
        return None
    dead_blocks = {circ.gates[i].block_id for i in doomed}
    protos = []
    for i, g in enumerate(circ.gates):
        if i in doomed:
            if doomed[i] is CryClass.CONTROL_Z:
                protos.append((GateKind.Z, (g.qubits[0],), ()))
            continue
        bid = None if g.block_id in dead_blocks else g.block_id
        protos.append((g.kind, g.qubits, tuple(p[s] for s in g.slots), bid))
    c2, p2 = make_circuit(circ.n_qubits, protos, global_phase=circ.global_phase)
    c2, p2 = merge_single_qubit_runs(c2, p2)
    return c2, p2, len(doomed)


def compress(
    u: np.ndarray, circ: Circuit, p: np.ndarray, cfg: SynthesisConfig
) -> tuple[Circuit, np.ndarray, int]:
    """Rounds of block removal with warm-started re-optimization.

    Each round first deletes every CRY that drifted to a trivial or
    control-Z angle (kept only if one re-optimization restores the cost),
    then visits the remaining blocks in seeded random order, removing a
    block whenever the survivors can be re-optimized back under
    eps_success. Stops when a full round removes nothing.
    """
    u = check_target_unitary(u)
    p = circ.check_params(p)
    eps = cfg.eps_success
    if evaluate(u, circ, p).f_aligned > eps:
        raise ArgumentError("compress requires a solved circuit (f_aligned <= eps)")
    sf = _SeedFactory(cfg.seed)
    order_rng = sf.rng(3)
    removed = 0
    trial = 0
    for _ in range(max(1, cfg.max_rounds)):
        changed = 0
        special = _delete_special_crys(circ, p, cfg.tol_class)
        if special is not None:
            c2, p2, count = special
            cost_fn, grad_fn = make_objective(u, c2)
            trial += 1
            res = minimize(cost_fn, grad_fn, p2,
                           replace(cfg.compression_opt, target_cost=eps,
                                   seed=sf.seed(4, trial)))
            if res.f_best <= eps:
                circ, p = c2, res.x_best
                changed += count
                removed += count
        ids = list(circ.block_ids())
        for idx in order_rng.permutation(len(ids)):
            bid = ids[idx]
            if bid not in circ.block_ids():
                continue
            c_try, remap = circ.remove_block(bid)
            p_try = remap_params(p, remap, c_try.n_params)
            cost_fn, grad_fn = make_objective(u, c_try)
            # warm start from the survivors, then one fresh random start
            starts = (p_try, order_rng.uniform(-math.pi, math.pi, c_try.n_params))
            for x0 in starts:
                trial += 1
                res = minimize(cost_fn, grad_fn, x0,
                               replace(cfg.compression_opt, target_cost=eps,
                                       seed=sf.seed(4, trial)))
                if res.f_best <= eps:
                    circ, p = c_try, res.x_best
                    changed += 1
                    removed += 1
                    break
        if changed == 0:
            break
    return circ, p, removed


def _pin_attempt(u, circ, p_pinned, frozen, cfg, sf, trial, random_starts):
    """Re-optimize the free slots with pinned angles frozen; the warm start
    is tried first, then seeded random restarts. Returns params or None."""
    eps = cfg.eps_success
    rng = sf.rng(5, trial)
    starts = [np.array(p_pinned)]
    for _ in range(random_starts):
        x = rng.uniform(-math.pi, math.pi, circ.n_params)
        x[list(frozen)] = p_pinned[list(frozen)]
        starts.append(x)
    for k, x0 in enumerate(starts):
        opt = replace(cfg.compression_opt, target_cost=eps, seed=sf.seed(5, trial, k),
                      restart_count=0, stall_iters=50)
        p_new, f_new = _minimize_frozen(u, circ, x0, frozen, opt)
        if f_new <= eps:
            return p_new
    return None


def _snap_generic_crys(u, circ, p, cfg, sf: _SeedFactory):
    """Drive generic CRY angles toward special values before expansion.

    A CRY pinned at a multiple of 2*pi expands to zero CNOTs, one pinned at
    an odd multiple of pi to a single CNOT, while a generic angle costs two.
    The pass first tries pinning every generic CRY at odd pi at once (cheap
    and usually enough for small targets), then sweeps the remainder one at
    a time, attempting the trivial angle before the single-CNOT angle; a
    pin is kept only when re-optimizing the free parameters brings the cost
    back under eps_success, and accepted pins stay frozen afterwards.
    """
    cry_slots = [g.slots[0] for g in circ.gates if g.kind is GateKind.CRY]
    frozen = {
        s for s in cry_slots
        if classify_cry(p[s], cfg.tol_class) is not CryClass.GENERIC
    }
    generic = [s for s in cry_slots if s not in frozen]
    if not generic:
        return p
    pin_all = p.copy()
    for s in generic:
        pin_all[s] = snap_cry_angle(p[s], CryClass.SINGLE_CNOT)
    result = _pin_attempt(u, circ, pin_all, frozen | set(generic), cfg, sf, 0,
                          random_starts=3)
    if result is not None:
        return result
    trial = 0
    for _ in range(2):  # one full sweep plus one retry over the leftovers
        progress = False
        for slot in [s for s in cry_slots if s not in frozen]:
            candidates = (
                TWO_PI * round(p[slot] / TWO_PI),
                snap_cry_angle(p[slot], CryClass.SINGLE_CNOT),
            )
            for angle in candidates:
                trial += 1
                p_try = p.copy()
                p_try[slot] = angle
                result = _pin_attempt(u, circ, p_try, frozen | {slot}, cfg, sf,
                                      trial, random_starts=1)
                if result is not None:
                    p = result
                    frozen.add(slot)
                    progress = True
                    break
        if not progress:
            break
    return p


def elementary_form(circ: Circuit, p: np.ndarray, tol_class: float):
    """Expand every CRY exactly (snapping near-special angles) and every CZ
    as its H-conjugated CNOT, then merge all single-qubit runs into U3
    gates: the emitted form is U3/CNOT."""
    protos = []
    for g in circ.gates:
        vals = tuple(p[s] for s in g.slots)
        if g.kind is GateKind.CRY:
            klass = classify_cry(vals[0], tol_class)
            theta = snap_cry_angle(vals[0], klass)
            protos.extend(expand_cry(theta, g.qubits[0], g.qubits[1], klass))
        elif g.kind is GateKind.CZ:
            protos.append((GateKind.H, (g.qubits[1],), ()))
            protos.append((GateKind.CNOT, g.qubits, ()))
            protos.append((GateKind.H, (g.qubits[1],), ()))
        else:
            protos.append((g.kind, g.qubits, vals))
    c2, p2 = make_circuit(circ.n_qubits, protos, global_phase=circ.global_phase)
    return merge_single_qubit_runs(c2, p2)


def _build_report(u, circ, p, cfg, *, status, removed, seed, started) -> SynthesisReport:
    rep = evaluate(u, circ, p)
    return SynthesisReport(
        circuit=circ,
        params=p,
        cnot_count=circ.count(GateKind.CNOT),
        single_qubit_count=circ.single_qubit_count(),
        f_aligned=rep.f_aligned,
        fidelity_avg=rep.fidelity_avg,
        fidelity_frob=rep.fidelity_frob,
        wall_time=time.perf_counter() - started,
        seed=seed,
        removed_blocks=removed,
        status=status,
    )


def finalize(
    u: np.ndarray,
    circ: Circuit,
    p: np.ndarray,
    cfg: SynthesisConfig,
    *,
    removed_blocks: int = 0,
    started: float | None = None,
) -> SynthesisReport:
    """Expand CRY gates into elementary form and run the last optimization
    over the single-qubit angles (CNOT placements are fixed constants)."""
    started = time.perf_counter() if started is None else started
    u = check_target_unitary(u)
    p = circ.check_params(p)
    eps = cfg.eps_success
    if evaluate(u, circ, p).f_aligned > eps:
        raise ArgumentError("finalize requires a solved circuit (f_aligned <= eps)")
    sf = _SeedFactory(cfg.seed)
    if cfg.snap_generic:
        p = _snap_generic_crys(u, circ, p, cfg, sf)
    c2, p2 = elementary_form(circ, p, cfg.tol_class)
    if c2.n_params:
        cost_fn, grad_fn = make_objective(u, c2)
        res = minimize(cost_fn, grad_fn, p2,
                       replace(cfg.compression_opt, target_cost=eps, seed=sf.seed(6)))
        p2, f_final = res.x_best, res.f_best
    else:
        f_final = evaluate(u, c2, p2).f_aligned
    if f_final > eps:
        raise FinalizeError(
            f"final optimization stalled at {f_final:.3g} > {eps:g}", best_f=f_final
        )
    return _build_report(u, c2, p2, cfg, status=SynthStatus.OK,
                         removed=removed_blocks, seed=cfg.seed, started=started)


def synthesize(u: np.ndarray, graph: CouplingGraph, cfg: SynthesisConfig) -> SynthesisReport:
    """grow_and_solve -> compress -> finalize; deterministic for a fixed seed."""
    started = time.perf_counter()
    u = check_target_unitary(u)
    try:
        circ, p = grow_and_solve(u, graph, cfg)
        circ, p, removed = compress(u, circ, p, cfg)
        return finalize(u, circ, p, cfg, removed_blocks=removed, started=started)
    except InitFailedError as err:
        circ, p = elementary_form(err.circuit, err.params, cfg.tol_class)
        return _build_report(u, circ, p, cfg, status=SynthStatus.INIT_FAILED,
                             removed=0, seed=cfg.seed, started=started)
