"""Qubit mapping compiler for heterogeneous distributed quantum clusters."""

__version__ = "0.1.0"

from .anneal import AnnealParams, Plan, PlanStep, anneal_segment, brute_force_optimum, compile
from .circuit import (
    Circuit,
    GateOp,
    InteractionCount,
    LayeredCircuit,
    count_interactions,
    layerize,
    parse_qasm,
    serialize_qasm,
)
from .cost import CostBreakdown, CostParams, IntraLayout, Move, SegmentCostEvaluator
from .errors import InfeasibleError, InputError, QasmError, ValidationError
from .hardware import ClusterTopology, QPU, QuantumSwitch, gen_topology, load_cluster
from .placement import (
    Assignment,
    InteractionGraph,
    PlacementParams,
    build_graph,
    cluster_graph,
    edge_cut,
    random_placement,
    repair_capacity,
)
from .segmentation import Segment, SegmentationParams, jaccard, random_segment, segment

__all__ = [
    "AnnealParams", "Assignment", "Circuit", "ClusterTopology", "CostBreakdown",
    "CostParams", "GateOp", "InfeasibleError", "InputError", "InteractionCount",
    "InteractionGraph", "IntraLayout", "LayeredCircuit", "Move", "Plan",
    "PlanStep", "PlacementParams", "QPU", "QasmError", "QuantumSwitch",
    "Segment", "SegmentCostEvaluator", "SegmentationParams", "ValidationError",
    "anneal_segment", "brute_force_optimum", "build_graph", "cluster_graph",
    "compile", "count_interactions", "edge_cut", "gen_topology", "jaccard",
    "layerize", "load_cluster", "parse_qasm", "random_placement",
    "random_segment", "repair_capacity", "segment", "serialize_qasm",
    "__version__",
]
