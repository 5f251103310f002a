"""Adaptive-compression synthesis of small unitaries into CNOT/U3 circuits.

The synthesis pipeline grows a periodic structure of parametric two-qubit
building blocks until it solves the target, removes blocks while the
remaining parameters keep re-solving it, and expands the surviving
controlled-Ry gates into elementary gates. Existing QASM circuits can be
lifted into the same parametric form and recompressed, and fixed-structure
parameter sweeps support fast warm-started synthesis of one-parameter
circuit families.
"""

from .circuit import Circuit, Gate, make_circuit, merge_single_qubit_runs
from .cost import CostReport, evaluate, gradient, make_objective, metrics_between
from .errors import (
    ArgumentError,
    CrsynthError,
    ExportError,
    FinalizeError,
    InitFailedError,
    InternalError,
    NumericalError,
    ParseError,
    RangeError,
    SweepBuildError,
    SweepQueryError,
    TableFormatError,
    TableMismatchError,
    UnsupportedError,
)
from .gates import (
    CryClass,
    GateKind,
    classify_cry,
    expand_cry,
    gate_derivative,
    gate_matrix,
    snap_cry_angle,
)
from .lift import lift_circuit, recompress
from .linalg import (
    apply_gate,
    embed_gate,
    kron,
    random_unitary,
    read_unitary_text,
    write_unitary_text,
)
from .optimizer import OptStatus, OptimizeResult, OptimizerConfig, minimize
from .qasm import from_qasm, to_qasm
from .sweep import (
    SweepTable,
    build_sweep_table,
    load_table,
    pauli_exponential,
    pauli_matrix,
    save_table,
    structure_digest,
    warm_synthesize,
)
from .synthesis import (
    CouplingGraph,
    SynthStatus,
    SynthesisConfig,
    SynthesisReport,
    build_initial_structure,
    compress,
    finalize,
    grow_and_solve,
    synthesize,
)

__version__ = "0.1.0"
