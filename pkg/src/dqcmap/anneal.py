"""Per-segment simulated annealing and the end-to-end compile pipeline.

Each segment's assignment is refined by simulated annealing over two move
kinds, single-qubit relocation and cross-QPU swap, under the hyperbolic
cooling schedule T_k = T0 / (1 + rate * k). Downhill moves are always
accepted, uphill moves with probability exp(-dE / T_k). Segments are chained:
segment s starts from segment s-1's final assignment and pays movement cost
against it. The best assignment seen is returned, so the result is never
worse than the initial one.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from .circuit import Circuit, layerize
from .cost import CostBreakdown, CostParams, IntraLayout, Move, SegmentCostEvaluator, total
from .errors import InfeasibleError
from .hardware import ClusterTopology, QuantumSwitch, record_remote_op, record_teleport
from .placement import (
    Assignment,
    build_graph,
    cluster_graph,
    default_decay,
    random_placement,
)
from .seeding import split_seed
from .segmentation import Segment, SegmentationParams, random_segment, segment


@dataclass(frozen=True)
class AnnealParams:
    """Knobs for one annealing chain. None means derive the default:
    t0 by sampling the initial move neighborhood, iters as 500 per qubit,
    cooling_rate as 10 / iters."""

    t0: float | None = None
    cooling_rate: float | None = None
    iters_per_segment: int | None = None
    relocate_weight: float = 1.0
    swap_weight: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.t0 is not None and self.t0 <= 0:
            raise ValueError("t0 must be positive")
        if self.cooling_rate is not None and self.cooling_rate <= 0:
            raise ValueError("cooling_rate must be positive")
        if self.iters_per_segment is not None and self.iters_per_segment < 1:
            raise ValueError("iters_per_segment must be >= 1")
        if self.relocate_weight < 0 or self.swap_weight < 0:
            raise ValueError("move weights must be >= 0")
        if self.relocate_weight + self.swap_weight == 0:
            raise ValueError("at least one move weight must be positive")


def cooling(t0: float, rate: float, k: int) -> float:
    """Temperature at iteration k: t0 / (1 + rate * k)."""
    if t0 <= 0:
        raise ValueError("t0 must be positive")
    if rate <= 0:
        raise ValueError("rate must be positive")
    if k < 0:
        raise ValueError("iteration must be >= 0")
    return t0 / (1.0 + rate * k)


def accept_probability(delta_e: float, temperature: float) -> float:
    """1 for downhill or flat moves, exp(-dE/T) uphill."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if delta_e <= 0:
        return 1.0
    return math.exp(-delta_e / temperature)


class SearchState:
    """Mutable assignment the annealer walks on."""

    def __init__(self, a: Assignment, cluster: ClusterTopology):
        self.cluster = cluster
        self.qpu_of: list[int] = list(a.qpu_of)
        self.on_qpu: dict[int, set[int]] = {p: set() for p in range(1, cluster.n_qpus + 1)}
        for q, p in enumerate(self.qpu_of):
            self.on_qpu[p].add(q)
        self.caps = cluster.capacities()

    def slack_qpus(self, exclude: int) -> list[int]:
        return [
            p for p in range(1, self.cluster.n_qpus + 1)
            if p != exclude and len(self.on_qpu[p]) < self.caps[p - 1]
        ]

    def apply(self, move: Move) -> None:
        if move.kind == "relocate":
            src = self.qpu_of[move.a]
            self.on_qpu[src].discard(move.a)
            self.on_qpu[move.dest].add(move.a)
            self.qpu_of[move.a] = move.dest
        elif move.kind == "swap":
            pa, pb = self.qpu_of[move.a], self.qpu_of[move.b]
            self.on_qpu[pa].discard(move.a)
            self.on_qpu[pa].add(move.b)
            self.on_qpu[pb].discard(move.b)
            self.on_qpu[pb].add(move.a)
            self.qpu_of[move.a], self.qpu_of[move.b] = pb, pa
        else:
            raise ValueError(f"unknown move kind '{move.kind}'")

    def to_assignment(self, segment_index: int) -> Assignment:
        return Assignment(tuple(self.qpu_of), segment=segment_index)


def propose(
    state: SearchState,
    rng: random.Random,
    relocate_weight: float = 1.0,
    swap_weight: float = 1.0,
) -> Move | None:
    """Draw one capacity-feasible move, or None when no move exists.

    The move kind is drawn by the configured weights. A relocation picks a
    uniform qubit and a uniform destination among QPUs with slack; when none
    has slack it falls back to a swap. A swap picks a uniform qubit and a
    uniform partner among qubits on other QPUs.
    """
    n = len(state.qpu_of)
    if state.cluster.n_qpus < 2 or n < 1:
        return None
    wsum = relocate_weight + swap_weight
    want_relocate = wsum > 0 and rng.random() < relocate_weight / wsum

    def draw_swap() -> Move | None:
        qa = rng.randrange(n)
        others = [q for q in range(n) if state.qpu_of[q] != state.qpu_of[qa]]
        if not others:
            return None
        return Move(kind="swap", a=qa, b=others[rng.randrange(len(others))])

    if want_relocate:
        q = rng.randrange(n)
        dests = state.slack_qpus(exclude=state.qpu_of[q])
        if dests:
            return Move(kind="relocate", a=q, dest=dests[rng.randrange(len(dests))])
        return draw_swap()
    return draw_swap()


def calibrate_t0(
    ev: SegmentCostEvaluator,
    state: SearchState,
    rng: random.Random,
    samples: int = 100,
) -> float:
    """Mean |dE| over random proposals from the initial state; 1.0 if the
    neighborhood is empty or flat."""
    magnitudes = []
    for _ in range(samples):
        move = propose(state, rng)
        if move is None:
            break
        magnitudes.append(abs(ev.delta(state.qpu_of, state.on_qpu, move)))
    mean = sum(magnitudes) / len(magnitudes) if magnitudes else 0.0
    return mean if mean > 0 else 1.0


@dataclass
class TraceEntry:
    """One annealing step, recorded when tracing is requested."""

    k: int
    temperature: float
    delta_e: float
    draw: float | None
    accepted: bool


def anneal_segment(
    init: Assignment,
    seg: Segment,
    prev: Assignment | None,
    cluster: ClusterTopology,
    cp: CostParams,
    ap: AnnealParams,
    trace: list[TraceEntry] | None = None,
) -> tuple[Assignment, CostBreakdown]:
    """Refine one segment's assignment; returns the best assignment seen and
    its exact cost breakdown. A single-QPU cluster is a no-op."""
    ev = SegmentCostEvaluator(cluster, seg, cp, prev=prev)
    state = SearchState(init, cluster)
    cur_cost = ev.breakdown(init).e_total
    best = list(state.qpu_of)
    best_cost = cur_cost

    iters = ap.iters_per_segment
    if iters is None:
        iters = 500 * len(init.qpu_of)
    rate = ap.cooling_rate if ap.cooling_rate is not None else 10.0 / iters
    rng = random.Random(split_seed(ap.seed, "chain"))
    t0 = ap.t0
    if t0 is None:
        t0 = calibrate_t0(ev, state, random.Random(split_seed(ap.seed, "t0")))

    for k in range(iters):
        move = propose(state, rng, ap.relocate_weight, ap.swap_weight)
        if move is None:
            break
        temperature = cooling(t0, rate, k)
        de = ev.delta(state.qpu_of, state.on_qpu, move)
        if de <= 0:
            accepted, draw = True, None
        else:
            draw = rng.random()
            accepted = draw < math.exp(-de / temperature)
        if trace is not None:
            trace.append(TraceEntry(k=k, temperature=temperature, delta_e=de,
                                    draw=draw, accepted=accepted))
        if accepted:
            state.apply(move)
            cur_cost += de
            if cur_cost < best_cost:
                best_cost = cur_cost
                best = list(state.qpu_of)

    final = Assignment(tuple(best), segment=seg.index)
    return final, ev.breakdown(final)


# -- exhaustive reference ------------------------------------------------------

def _feasible_assignments(n_qubits: int, caps: list[int]) -> list[tuple[int, ...]]:
    """All capacity-feasible qubit->QPU tuples, lexicographic order."""
    out = []
    state = [0] * n_qubits

    def rec(q: int, loads: list[int]):
        if q == n_qubits:
            out.append(tuple(state))
            return
        for p in range(len(caps)):
            if loads[p] < caps[p]:
                loads[p] += 1
                state[q] = p + 1
                rec(q + 1, loads)
                loads[p] -= 1

    rec(0, [0] * len(caps))
    return out


def brute_force_optimum(
    circuit: Circuit,
    cluster: ClusterTopology,
    cp: CostParams,
    seg_params: SegmentationParams | None = None,
    segments: list[Segment] | None = None,
) -> tuple[list[Assignment], float]:
    """Exact minimum of the chained per-segment objective by enumeration.

    Dynamic program over all capacity-feasible assignments per segment with
    the movement charge linking stages. Refuses instances beyond 10 qubits or
    3 QPUs.
    """
    if circuit.n_qubits > 10 or cluster.n_qpus > 3:
        raise ValueError("instance too large for exhaustive search")
    if cluster.total_capacity < circuit.n_qubits:
        raise InfeasibleError("circuit does not fit the cluster")
    if segments is None:
        lc = layerize(circuit)
        segments = segment(lc, seg_params)
    if not segments:
        return [], 0.0

    states = _feasible_assignments(circuit.n_qubits, cluster.capacities())
    inter_cost = cluster.distances.inter_cost
    tele = cp.teleport_cost
    g3 = cp.gamma3

    def stage_cost(seg_: Segment) -> list[float]:
        ev = SegmentCostEvaluator(cluster, seg_, cp, prev=None)
        return [ev.breakdown(Assignment(s, segment=seg_.index)).e_total for s in states]

    costs = stage_cost(segments[0])
    back: list[list[int]] = []
    for seg_ in segments[1:]:
        stage = stage_cost(seg_)
        nxt = [0.0] * len(states)
        arg = [0] * len(states)
        for bi, b in enumerate(states):
            best_val, best_ai = math.inf, 0
            for ai, a in enumerate(states):
                mv = costs[ai]
                if mv >= best_val:
                    continue
                hop = 0.0
                for q in range(len(a)):
                    if a[q] != b[q]:
                        hop += inter_cost[(a[q], b[q])]
                val = mv + g3 * tele * hop
                if val < best_val:
                    best_val, best_ai = val, ai
            nxt[bi] = stage[bi] + best_val
            arg[bi] = best_ai
        costs = nxt
        back.append(arg)

    best_idx = min(range(len(states)), key=lambda i: (costs[i], i))
    best_total = costs[best_idx]
    chain = [best_idx]
    for arg in reversed(back):
        chain.append(arg[chain[-1]])
    chain.reverse()
    plan = [
        Assignment(states[idx], segment=s + 1) for s, idx in enumerate(chain)
    ]
    return plan, best_total


# -- pipeline -------------------------------------------------------------------

@dataclass(frozen=True)
class PlanStep:
    segment: Segment
    assignment: Assignment
    layouts: dict[int, IntraLayout]
    costs: CostBreakdown


@dataclass(frozen=True)
class Plan:
    """Finished compilation: one step per segment plus run totals."""

    circuit_name: str
    n_qubits: int
    seed: int
    steps: tuple[PlanStep, ...]
    totals: CostBreakdown
    epr_total: int
    per_link_epr: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def total_cost(self) -> float:
        return self.totals.e_total


def replay_epr(plan: Plan, cluster: ClusterTopology,
               switch: QuantumSwitch | None = None) -> QuantumSwitch:
    """Walk a plan through a switch, consuming EPR pairs per remote gate and
    per teleport, one per link hop. Returns the switch used."""
    sw = switch if switch is not None else cluster.fresh_switch()
    prev: Assignment | None = None
    for step in plan.steps:
        qo = step.assignment.qpu_of
        if prev is not None:
            for q in range(len(qo)):
                if prev.qpu_of[q] != qo[q]:
                    record_teleport(sw, cluster.inter_path(prev.qpu_of[q], qo[q]))
        for (i, j), count in sorted(step.segment.interactions.pairs.items()):
            if qo[i] != qo[j]:
                path = cluster.inter_path(qo[i], qo[j])
                for _ in range(count):
                    record_remote_op(sw, path)
        prev = step.assignment
    return sw


def compile(
    circuit: Circuit,
    cluster: ClusterTopology,
    seed: int = 0,
    seg_params: SegmentationParams | None = None,
    cost_params: CostParams | None = None,
    anneal_params: AnnealParams | None = None,
    decay: float | None = None,
    partitions: int | None = None,
    segmentation_mode: str = "pattern",
    n_segments: int | None = None,
    initial: str = "cluster",
    do_anneal: bool = True,
) -> Plan:
    """Map a circuit onto a cluster.

    Pipeline: ASAP layering, segmentation (interaction-pattern based, or
    uniform random boundaries when segmentation_mode is "random"), decayed
    interaction graph, clustering placement for the first segment (or a
    random feasible one when initial is "random"), then per-segment annealing
    chained through the movement cost. All randomness derives from `seed`.
    """
    if segmentation_mode not in ("pattern", "random"):
        raise ValueError(f"unknown segmentation mode '{segmentation_mode}'")
    if initial not in ("cluster", "random"):
        raise ValueError(f"unknown initial placement '{initial}'")
    if cluster.total_capacity < circuit.n_qubits:
        raise InfeasibleError(
            f"circuit needs {circuit.n_qubits} qubits, cluster offers "
            f"{cluster.total_capacity}"
        )
    cp = cost_params if cost_params is not None else CostParams()
    ap = anneal_params if anneal_params is not None else AnnealParams()

    lc = layerize(circuit)
    pattern = segment(lc, seg_params)
    if segmentation_mode == "random":
        count = n_segments if n_segments is not None else max(1, len(pattern))
        segments = random_segment(lc, count if lc.depth else 0,
                                  split_seed(seed, "segmentation"))
    else:
        segments = pattern

    if not segments:
        empty = CostBreakdown(0.0, 0.0, 0.0, 0.0, 0)
        return Plan(circuit_name=circuit.name, n_qubits=circuit.n_qubits,
                    seed=seed, steps=(), totals=empty, epr_total=0)

    if initial == "random":
        first = random_placement(circuit.n_qubits, cluster, split_seed(seed, "init"))
    else:
        graph = build_graph(segments, decay if decay is not None
                            else default_decay(len(segments)))
        parts = partitions if partitions is not None else min(
            cluster.n_qpus, max(1, circuit.n_qubits)
        )
        first = cluster_graph(graph, cluster, parts, n_qubits=circuit.n_qubits)

    steps: list[PlanStep] = []
    prev: Assignment | None = None
    current = first
    for seg_ in segments:
        init = replace(current, segment=seg_.index)
        if do_anneal:
            # Per-segment chains draw from the run seed, not ap.seed, so one
            # top-level seed governs the whole compilation.
            seg_ap = replace(ap, seed=split_seed(seed, f"anneal:{seg_.index}"))
            final, costs = anneal_segment(init, seg_, prev, cluster, cp, seg_ap)
        else:
            final = init
            costs = total(init, seg_, prev, cluster, cp)
        ev = SegmentCostEvaluator(cluster, seg_, cp, prev=prev)
        steps.append(PlanStep(segment=seg_, assignment=final,
                              layouts=ev.layouts(final), costs=costs))
        prev = final
        current = final

    totals = CostBreakdown(
        e_inter=sum(s.costs.e_inter for s in steps),
        e_local=sum(s.costs.e_local for s in steps),
        e_move=sum(s.costs.e_move for s in steps),
        e_total=sum(s.costs.e_total for s in steps),
        epr_pairs=sum(s.costs.epr_pairs for s in steps),
    )
    plan = Plan(circuit_name=circuit.name, n_qubits=circuit.n_qubits, seed=seed,
                steps=tuple(steps), totals=totals, epr_total=0)
    switch = replay_epr(plan, cluster)
    return Plan(circuit_name=plan.circuit_name, n_qubits=plan.n_qubits,
                seed=plan.seed, steps=plan.steps, totals=plan.totals,
                epr_total=switch.epr_consumed,
                per_link_epr=dict(switch.per_link_epr))
