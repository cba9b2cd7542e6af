"""Lattice lower-bound graph families for reachability shortcuts, the Steiner
shortcuts that collapse their diameter, and exact verifiers for both."""

from .analysis import (
    UNBOUNDED,
    CriticalAssignment,
    NormalizedComponent,
    assign_critical_shortest_paths,
    critical_diameter,
    efficiency,
    normalize,
    prune_inefficient,
    tc_equivalent,
    thickness,
    vertex_efficiency,
    volume_check,
)
from .attack import HesseShortcut, build_attack, verify_attack
from .circuits import (
    OrCircuit,
    circuit_shortcut_to_graph,
    circuits_equivalent,
    eval_circuit,
    graph_to_circuit,
    layer_circuit,
    reachability_function,
    scc_contract,
)
from .errors import ContractViolation, ParameterError, ResourceError, ShortcutError
from .graph import (
    UNREACHABLE,
    ExplicitGraph,
    LayeredGraph,
    count_paths,
    hop_distance,
    materialize,
    transitive_closure,
)
from .hesse import (
    CriticalPair,
    CriticalSet,
    HesseGraph,
    HesseParams,
    build_g1,
    build_gk,
    critical_path,
    validate_family,
)
from .lattice import SubdirectionSet, ball_points, extreme_points, is_extreme
from .noise import NoiseSpec, apply_noise, support_statistics, survival_census
from .shortcut import AugmentedGraph, ShortcutSet, augment
from .wxx import (
    WxxParams,
    bit_reversal_perm,
    build_wxx,
    build_wxx_attack,
    verify_wxx_attack,
    wxx_critical_path,
)

__all__ = [name for name in dir() if not name.startswith("_")]
