"""Segment cost model.

For one segment and one assignment the objective is

    e_total = g1 * e_inter + g2 * e_local + g3 * e_move

where e_inter charges every cut pair its gate count times remote_op_cost
times the link distance between its QPUs, e_local charges co-located pairs
cx_cost plus swap_cost per coupling hop beyond adjacency under a greedy
deterministic intra-QPU layout, and e_move charges teleport_cost times link
distance for every qubit whose QPU changed since the previous segment.
EPR usage is the integer companion: one pair per link hop for every remote
gate and every teleport.

SegmentCostEvaluator recomputes only the terms a move touches, caching
intra-QPU layouts by (QPU, qubit set); deltas agree with full recomputation
to float roundoff.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InfeasibleError
from .hardware import ClusterTopology, QPU
from .placement import Assignment
from .segmentation import Segment


@dataclass(frozen=True)
class CostParams:
    cx_cost: float = 1.0
    swap_cost: float = 3.0
    remote_op_cost: float = 5.0
    teleport_cost: float = 5.0
    gamma1: float = 1.0
    gamma2: float = 1.0
    gamma3: float = 1.0

    def __post_init__(self):
        for fieldname in ("cx_cost", "swap_cost", "remote_op_cost", "teleport_cost"):
            if getattr(self, fieldname) < 0:
                raise ValueError(f"{fieldname} must be >= 0")
        for fieldname in ("gamma1", "gamma2", "gamma3"):
            if getattr(self, fieldname) < 0:
                raise ValueError(f"{fieldname} must be >= 0")

    @classmethod
    def from_ratio(cls, ratio: float, **overrides) -> "CostParams":
        """Inter:intra cost ratio r sets remote_op_cost = teleport_cost = r * cx_cost."""
        if ratio <= 0:
            raise ValueError("ratio must be positive")
        base = dict(cx_cost=1.0, swap_cost=3.0)
        base.update(overrides)
        cx = base["cx_cost"]
        base.setdefault("remote_op_cost", ratio * cx)
        base.setdefault("teleport_cost", ratio * cx)
        return cls(**base)


@dataclass(frozen=True)
class CostBreakdown:
    e_inter: float
    e_local: float
    e_move: float
    e_total: float
    epr_pairs: int

    def as_dict(self) -> dict:
        return {
            "e_inter": self.e_inter,
            "e_local": self.e_local,
            "e_move": self.e_move,
            "e_total": self.e_total,
            "epr_pairs": self.epr_pairs,
        }


@dataclass(frozen=True)
class IntraLayout:
    """Logical qubit -> physical qubit index on one QPU."""

    qpu_id: int
    phys_of: dict[int, int]


@dataclass(frozen=True)
class Move:
    """A candidate reassignment: relocate one qubit or swap two across QPUs."""

    kind: str  # "relocate" | "swap"
    a: int
    dest: int = 0  # relocate target QPU id
    b: int = -1  # swap partner qubit


def _coupling_hops(qpu: QPU) -> list[list[int]]:
    """All-pairs BFS hop counts over the QPU coupling map."""
    n = qpu.comp_capacity
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in qpu.coupling:
        adj[i].append(j)
        adj[j].append(i)
    table = []
    for start in range(n):
        dist = [-1] * n
        dist[start] = 0
        queue = [start]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in sorted(adj[u]):
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        if any(d < 0 for d in dist):
            raise ValueError(f"QPU '{qpu.name}': coupling graph is not connected")
        table.append(dist)
    return table


def _greedy_layout(qpu: QPU, qubits: list[int], interactions, table) -> IntraLayout:
    """Greedy deterministic embedding of logical qubits into a coupling map.

    Qubits are placed in order of decreasing interaction weight among the
    co-located set (ties toward lower qubit index). The first goes to the
    physical qubit of highest coupling degree; each later one to the free
    physical qubit minimizing the weighted coupling distance to its already
    placed partners (ties toward the lower physical index).
    """
    qset = set(qubits)
    if len(qset) != len(qubits):
        raise ValueError("duplicate qubits in layout request")
    if len(qubits) > qpu.comp_capacity:
        raise InfeasibleError(
            f"{len(qubits)} qubits exceed capacity {qpu.comp_capacity} of '{qpu.name}'"
        )
    weight_in = {q: 0.0 for q in qubits}
    partners: dict[int, list[tuple[int, float]]] = {q: [] for q in qubits}
    for (i, j), c in interactions.pairs.items():
        if i in qset and j in qset:
            weight_in[i] += c
            weight_in[j] += c
            partners[i].append((j, float(c)))
            partners[j].append((i, float(c)))
    order = sorted(qubits, key=lambda q: (-weight_in[q], q))

    degree = [0] * qpu.comp_capacity
    for i, j in qpu.coupling:
        degree[i] += 1
        degree[j] += 1

    phys_of: dict[int, int] = {}
    free: list[int] = list(range(qpu.comp_capacity))
    for q in order:
        if not phys_of:
            pick = max(free, key=lambda ph: (degree[ph], -ph))
        else:
            placed = [(phys_of[o], w) for o, w in partners[q] if o in phys_of]
            pick = min(free, key=lambda ph: (sum(w * table[ph][po] for po, w in placed), ph))
        phys_of[q] = pick
        free.remove(pick)
    return IntraLayout(qpu_id=qpu.id, phys_of=phys_of)


def intra_layout(qpu: QPU, qubits: list[int], interactions) -> IntraLayout:
    """Standalone layout call; distances computed from the coupling map."""
    return _greedy_layout(qpu, sorted(qubits), interactions, _coupling_hops(qpu))


class SegmentCostEvaluator:
    """Objective evaluation for one segment against one cluster.

    Holds the per-pair gate counts, the distance tables, and a cache of
    intra-QPU layouts keyed by (QPU id, frozen qubit set), which is sound
    because the segment's interactions are fixed for the evaluator's
    lifetime. prev is the previous segment's assignment, or None for the
    first segment (no movement charge).
    """

    def __init__(
        self,
        cluster: ClusterTopology,
        seg: Segment,
        cp: CostParams,
        prev: Assignment | None = None,
    ):
        self.cluster = cluster
        self.seg = seg
        self.cp = cp
        self.prev = prev
        self.pairs: list[tuple[int, int, int]] = [
            (i, j, c) for (i, j), c in sorted(seg.interactions.pairs.items())
        ]
        self.adj: dict[int, list[tuple[int, int]]] = {}
        for i, j, c in self.pairs:
            self.adj.setdefault(i, []).append((j, c))
            self.adj.setdefault(j, []).append((i, c))
        self._layout_cache: dict[tuple[int, frozenset[int]], tuple[IntraLayout, float]] = {}

    # -- per-QPU local term ------------------------------------------------

    def layout_and_local(self, pid: int, qubits: frozenset[int]) -> tuple[IntraLayout, float]:
        key = (pid, qubits)
        hit = self._layout_cache.get(key)
        if hit is not None:
            return hit
        qpu = self.cluster.qpu(pid)
        lay = _greedy_layout(
            qpu, sorted(qubits), self.seg.interactions,
            self.cluster.distances.intra[pid - 1],
        )
        cost = 0.0
        cp = self.cp
        table = self.cluster.distances.intra[pid - 1]
        for i, j, c in self.pairs:
            if i in qubits and j in qubits:
                d = table[lay.phys_of[i]][lay.phys_of[j]]
                cost += c * (cp.cx_cost + cp.swap_cost * max(0, d - 1))
        out = (lay, cost)
        self._layout_cache[key] = out
        return out

    def local_cost(self, pid: int, qubits: frozenset[int]) -> float:
        return self.layout_and_local(pid, qubits)[1]

    # -- full evaluation -----------------------------------------------------

    def breakdown(self, a: Assignment) -> CostBreakdown:
        cp = self.cp
        inter_cost = self.cluster.distances.inter_cost
        inter_hops = self.cluster.distances.inter_hops
        qo = a.qpu_of
        e_inter = 0.0
        epr = 0
        for i, j, c in self.pairs:
            pi, pj = qo[i], qo[j]
            if pi != pj:
                e_inter += c * cp.remote_op_cost * inter_cost[(pi, pj)]
                epr += c * inter_hops[(pi, pj)]
        e_local = 0.0
        for pid in range(1, self.cluster.n_qpus + 1):
            members = frozenset(q for q in range(len(qo)) if qo[q] == pid)
            if members:
                e_local += self.local_cost(pid, members)
        e_move = 0.0
        if self.prev is not None:
            po = self.prev.qpu_of
            for q in range(len(qo)):
                if po[q] != qo[q]:
                    e_move += cp.teleport_cost * inter_cost[(po[q], qo[q])]
                    epr += inter_hops[(po[q], qo[q])]
        total = cp.gamma1 * e_inter + cp.gamma2 * e_local + cp.gamma3 * e_move
        return CostBreakdown(e_inter=e_inter, e_local=e_local, e_move=e_move,
                             e_total=total, epr_pairs=epr)

    # -- incremental evaluation ----------------------------------------------

    def delta(self, qpu_of: list[int], on_qpu: dict[int, set[int]], move: Move) -> float:
        """Objective change if `move` were applied to the current state.

        qpu_of and on_qpu describe the current assignment and are not
        modified. Relocations into a full QPU raise InfeasibleError; null
        moves cost 0.
        """
        cp = self.cp
        inter_cost = self.cluster.distances.inter_cost
        if move.kind == "relocate":
            q, src, dst = move.a, qpu_of[move.a], move.dest
            if dst == src:
                return 0.0
            cap = self.cluster.qpu(dst).comp_capacity
            if len(on_qpu.get(dst, ())) >= cap:
                raise InfeasibleError(f"QPU {dst} is full")
            d_inter = 0.0
            for o, c in self.adj.get(q, ()):
                po = qpu_of[o]
                d_inter += c * (inter_cost[(dst, po)] - inter_cost[(src, po)])
            d_inter *= cp.remote_op_cost
            s_src = frozenset(on_qpu[src])
            s_dst = frozenset(on_qpu.get(dst, set()))
            d_local = (
                self.local_cost(src, s_src - {q}) - self.local_cost(src, s_src)
                if len(s_src) > 1 else -self.local_cost(src, s_src)
            )
            d_local += self.local_cost(dst, s_dst | {q}) - (
                self.local_cost(dst, s_dst) if s_dst else 0.0
            )
            d_move = 0.0
            if self.prev is not None:
                pq = self.prev.qpu_of[q]
                d_move = cp.teleport_cost * (inter_cost[(pq, dst)] - inter_cost[(pq, src)])
            return cp.gamma1 * d_inter + cp.gamma2 * d_local + cp.gamma3 * d_move

        if move.kind == "swap":
            qa, qb = move.a, move.b
            pa, pb = qpu_of[qa], qpu_of[qb]
            if qa == qb or pa == pb:
                return 0.0
            d_inter = 0.0
            for o, c in self.adj.get(qa, ()):
                if o == qb:
                    continue  # their own pair stays at the same distance
                po = qpu_of[o]
                d_inter += c * (inter_cost[(pb, po)] - inter_cost[(pa, po)])
            for o, c in self.adj.get(qb, ()):
                if o == qa:
                    continue
                po = qpu_of[o]
                d_inter += c * (inter_cost[(pa, po)] - inter_cost[(pb, po)])
            d_inter *= cp.remote_op_cost
            s_a = frozenset(on_qpu[pa])
            s_b = frozenset(on_qpu[pb])
            d_local = (
                self.local_cost(pa, (s_a - {qa}) | {qb}) - self.local_cost(pa, s_a)
                + self.local_cost(pb, (s_b - {qb}) | {qa}) - self.local_cost(pb, s_b)
            )
            d_move = 0.0
            if self.prev is not None:
                po = self.prev.qpu_of
                d_move = cp.teleport_cost * (
                    inter_cost[(po[qa], pb)] - inter_cost[(po[qa], pa)]
                    + inter_cost[(po[qb], pa)] - inter_cost[(po[qb], pb)]
                )
            return cp.gamma1 * d_inter + cp.gamma2 * d_local + cp.gamma3 * d_move

        raise ValueError(f"unknown move kind '{move.kind}'")

    def layouts(self, a: Assignment) -> dict[int, IntraLayout]:
        out = {}
        for pid in range(1, self.cluster.n_qpus + 1):
            members = frozenset(a.qubits_on(pid))
            if members:
                out[pid] = self.layout_and_local(pid, members)[0]
        return out


# -- module-level operation forms ---------------------------------------------

def e_local(a: Assignment, seg: Segment, cluster: ClusterTopology, cp: CostParams) -> float:
    """Intra-QPU overhead of co-located interacting pairs."""
    ev = SegmentCostEvaluator(cluster, seg, cp)
    return ev.breakdown(a).e_local


def e_inter(a: Assignment, seg: Segment, cluster: ClusterTopology, cp: CostParams) -> float:
    """Remote-operation overhead of cut pairs."""
    ev = SegmentCostEvaluator(cluster, seg, cp)
    return ev.breakdown(a).e_inter


def e_move(prev: Assignment | None, cur: Assignment, cluster: ClusterTopology,
           cp: CostParams) -> float:
    """Teleportation charge for qubits whose QPU changed between segments."""
    if prev is None:
        return 0.0
    inter_cost = cluster.distances.inter_cost
    out = 0.0
    for q in range(len(cur.qpu_of)):
        if prev.qpu_of[q] != cur.qpu_of[q]:
            out += cp.teleport_cost * inter_cost[(prev.qpu_of[q], cur.qpu_of[q])]
    return out


def total(a: Assignment, seg: Segment, prev: Assignment | None,
          cluster: ClusterTopology, cp: CostParams) -> CostBreakdown:
    """Full objective with components and EPR count for one segment."""
    ev = SegmentCostEvaluator(cluster, seg, cp, prev=prev)
    return ev.breakdown(a)


def delta_total(ev: SegmentCostEvaluator, a: Assignment, move: Move) -> float:
    """Incremental objective change of `move` applied to assignment `a`."""
    qpu_of = list(a.qpu_of)
    on_qpu: dict[int, set[int]] = {}
    for q, p in enumerate(qpu_of):
        on_qpu.setdefault(p, set()).add(q)
    return ev.delta(qpu_of, on_qpu, move)
