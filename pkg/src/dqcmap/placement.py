"""Initial qubit-to-QPU placement.

Per-segment interaction counts are folded into one weighted graph whose edge
weights decay exponentially with segment index, so early segments dominate
the starting placement. Qubits are then clustered bottom-up (heaviest
inter-group weight first, capacity-bounded) into one group per QPU, matched
to QPUs by size against capacity, and repaired if any QPU ended up over
capacity. A capacity-aware uniform random placement serves as the baseline.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .errors import InfeasibleError
from .hardware import ClusterTopology
from .segmentation import Segment


@dataclass(frozen=True)
class InteractionGraph:
    """Undirected weighted graph on logical qubits.

    weights maps (i, j) with i < j to a positive weight. Treat as read-only.
    """

    n_qubits: int
    weights: dict[tuple[int, int], float]

    def weight(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        return self.weights.get(key, 0.0)

    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n_qubits)]
        for (i, j), w in sorted(self.weights.items()):
            adj[i].append((j, w))
            adj[j].append((i, w))
        return adj


@dataclass(frozen=True)
class PlacementParams:
    decay: float
    partitions: int

    def __post_init__(self):
        if self.decay < 0:
            raise ValueError("decay must be >= 0")
        if self.partitions < 1:
            raise ValueError("partitions must be >= 1")


@dataclass(frozen=True)
class Assignment:
    """Logical qubit -> QPU id (1-based), valid for one segment."""

    qpu_of: tuple[int, ...]
    segment: int = 1

    @property
    def n_qubits(self) -> int:
        return len(self.qpu_of)

    def qubits_on(self, pid: int) -> list[int]:
        return [q for q, p in enumerate(self.qpu_of) if p == pid]

    def loads(self, n_qpus: int) -> list[int]:
        out = [0] * n_qpus
        for p in self.qpu_of:
            out[p - 1] += 1
        return out

    def moved_from(self, prev: "Assignment") -> list[int]:
        if len(prev.qpu_of) != len(self.qpu_of):
            raise ValueError("assignments cover different qubit counts")
        return [q for q in range(len(self.qpu_of)) if self.qpu_of[q] != prev.qpu_of[q]]


def default_decay(n_segments: int) -> float:
    """Decay rate scaled so late segments still contribute: 3 / S."""
    if n_segments < 1:
        raise ValueError("need at least one segment")
    return 3.0 / n_segments


def build_graph(segments: list[Segment], decay: float) -> InteractionGraph:
    """Fold per-segment counts into one graph, weighting segment s by
    exp(-decay * s). Qubit count is taken from the widest pair seen plus the
    caller's circuit; pass n_qubits explicitly via segments' source circuit
    when isolating this step."""
    if decay < 0:
        raise ValueError("decay must be >= 0")
    weights: dict[tuple[int, int], float] = {}
    top = -1
    for seg in segments:
        alpha = math.exp(-decay * seg.index)
        for pair, count in seg.interactions.pairs.items():
            weights[pair] = weights.get(pair, 0.0) + alpha * count
            top = max(top, pair[1])
    return InteractionGraph(n_qubits=top + 1, weights=weights)


def edge_cut(g: InteractionGraph, a: Assignment) -> float:
    """Total weight of edges whose endpoints sit on different QPUs."""
    if a.n_qubits < g.n_qubits:
        raise ValueError("assignment does not cover the graph")
    return sum(
        w for (i, j), w in g.weights.items() if a.qpu_of[i] != a.qpu_of[j]
    )


def _check_fits(n_qubits: int, cluster: ClusterTopology) -> None:
    if cluster.total_capacity < n_qubits:
        raise InfeasibleError(
            f"{n_qubits} qubits exceed total capacity {cluster.total_capacity}"
        )


def _chosen_qpus(cluster: ClusterTopology, partitions: int) -> list[int]:
    """The `partitions` largest-capacity QPU ids, capacity desc then id asc."""
    order = sorted(
        (p.id for p in cluster.qpus),
        key=lambda pid: (-cluster.qpu(pid).comp_capacity, pid),
    )
    return order[:partitions]


def cluster_graph(
    g: InteractionGraph, cluster: ClusterTopology, partitions: int, n_qubits: int | None = None
) -> Assignment:
    """Agglomerate qubits into one group per QPU, heaviest edges first.

    Groups start as singletons. Each round merges the group pair with the
    largest total inter-group weight whose merged size still fits the largest
    chosen QPU; if no pair fits while too many groups remain, the heaviest
    pair is merged regardless and repair_capacity cleans up. Groups are then
    matched to QPUs by descending size against descending capacity, a local
    improvement sweep trims the cut, and the result is capacity-repaired.
    """
    n = n_qubits if n_qubits is not None else g.n_qubits
    if n < 1:
        raise ValueError("nothing to place")
    if not 1 <= partitions <= cluster.n_qpus:
        raise ValueError("partitions out of range")
    _check_fits(n, cluster)
    chosen = _chosen_qpus(cluster, partitions)
    cap_max = max(cluster.qpu(p).comp_capacity for p in chosen)
    target = min(partitions, n)

    groups: dict[int, set[int]] = {q: {q} for q in range(n)}
    # Inter-group weights keyed by (gid_a, gid_b), gid = smallest member.
    gw: dict[tuple[int, int], float] = dict(g.weights)

    def merge(a: int, b: int) -> None:
        a, b = (a, b) if a < b else (b, a)
        groups[a] |= groups.pop(b)
        for other in list(groups):
            if other in (a, b):
                continue
            moved = gw.pop((min(b, other), max(b, other)), 0.0)
            if moved:
                key = (min(a, other), max(a, other))
                gw[key] = gw.get(key, 0.0) + moved
        gw.pop((a, b), None)

    while len(groups) > target:
        best: tuple[int, int] | None = None
        best_w = -1.0
        best_size = 0
        forced: tuple[int, int] | None = None
        forced_key: tuple[float, int, int, int] | None = None
        ids = sorted(groups)
        for ai in range(len(ids)):
            for bi in range(ai + 1, len(ids)):
                a, b = ids[ai], ids[bi]
                w = gw.get((a, b), 0.0)
                size = len(groups[a]) + len(groups[b])
                if size <= cap_max:
                    if w > best_w or (w == best_w and best is not None and size < best_size):
                        best, best_w, best_size = (a, b), w, size
                else:
                    fk = (-w, size, a, b)
                    if forced_key is None or fk < forced_key:
                        forced, forced_key = (a, b), fk
        if best is not None:
            merge(*best)
        elif forced is not None:
            merge(*forced)
        else:  # pragma: no cover - target >= 1 guarantees a pair exists
            break

    ordered = sorted(groups.values(), key=lambda s: (-len(s), min(s)))
    by_cap = sorted(chosen, key=lambda pid: (-cluster.qpu(pid).comp_capacity, pid))
    qpu_of = [0] * n
    for grp, pid in zip(ordered, by_cap):
        for q in grp:
            qpu_of[q] = pid

    a = Assignment(tuple(qpu_of), segment=1)
    a = _refine_cut(g, a, cluster, chosen)
    return repair_capacity(a, g, cluster)


def _refine_cut(
    g: InteractionGraph, a: Assignment, cluster: ClusterTopology, chosen: list[int]
) -> Assignment:
    """Pairwise Kernighan-Lin polish on the cut, capacities respected.

    For each QPU pair, repeatedly build a locked sequence of best swaps
    (gains may go negative mid-sequence) and keep the best prefix if it has
    positive total gain. A relocate sweep then spends any capacity slack.
    Deterministic scan order throughout.
    """
    qpu_of = list(a.qpu_of)
    caps = {p: cluster.qpu(p).comp_capacity for p in chosen}
    adj = g.adjacency()
    # The assignment may cover qubits beyond the graph's vertex set (qubits
    # with no two-qubit gates); give those empty adjacency.
    adj.extend([] for _ in range(len(qpu_of) - len(adj)))

    def gain_relocate(cur: list[int], q: int, dst: int) -> float:
        src = cur[q]
        delta = 0.0
        for o, w in adj[q]:
            if cur[o] == src:
                delta -= w  # becomes cut
            elif cur[o] == dst:
                delta += w  # leaves the cut
        return delta  # positive means the cut shrinks

    def kl_pass(pa: int, pb: int) -> bool:
        """One KL round between QPUs pa and pb; True if the cut shrank."""
        cur = list(qpu_of)
        locked: set[int] = set()
        seq: list[tuple[float, int, int]] = []
        cum = 0.0
        while True:
            best = None
            for qa in range(len(cur)):
                if qa in locked or cur[qa] != pa:
                    continue
                for qb in range(len(cur)):
                    if qb in locked or cur[qb] != pb:
                        continue
                    # The (qa, qb) edge stays cut either way but both
                    # relocate gains count it as resolved: subtract twice.
                    gain = (
                        gain_relocate(cur, qa, pb)
                        + gain_relocate(cur, qb, pa)
                        - 2.0 * g.weight(qa, qb)
                    )
                    if best is None or gain > best[0] + 1e-15:
                        best = (gain, qa, qb)
            if best is None:
                break
            gain, qa, qb = best
            cur[qa], cur[qb] = pb, pa
            locked.add(qa)
            locked.add(qb)
            cum += gain
            seq.append((cum, qa, qb))
        if not seq:
            return False
        k = max(range(len(seq)), key=lambda i: seq[i][0])
        if seq[k][0] <= 1e-12:
            return False
        for i in range(k + 1):
            _, qa, qb = seq[i]
            qpu_of[qa], qpu_of[qb] = pb, pa
        return True

    for _ in range(4):
        changed = False
        for pa, pb in combinations(sorted(chosen), 2):
            while kl_pass(pa, pb):
                changed = True
        # Relocates need spare room so they run after the size-preserving
        # swaps, best gain first.
        while True:
            loads = {p: 0 for p in chosen}
            for p in qpu_of:
                loads[p] += 1
            best = None
            for q in range(len(qpu_of)):
                for dst in chosen:
                    if dst == qpu_of[q] or loads[dst] >= caps[dst]:
                        continue
                    gain = gain_relocate(qpu_of, q, dst)
                    if gain > 1e-12 and (best is None or gain > best[0]):
                        best = (gain, q, dst)
            if best is None:
                break
            qpu_of[best[1]] = best[2]
            changed = True
        if not changed:
            break
    return Assignment(tuple(qpu_of), segment=a.segment)


def repair_capacity(
    a: Assignment, g: InteractionGraph, cluster: ClusterTopology
) -> Assignment:
    """Resolve per-QPU overloads by evicting weakly attached qubits.

    From each over-capacity QPU (lowest id first) the qubit with the least
    total weight to its co-located peers moves to a neighboring QPU with
    slack, choosing the destination that increases the cut least; if no link
    neighbor has slack the search widens by BFS over the interconnect.
    """
    _check_fits(a.n_qubits, cluster)
    qpu_of = list(a.qpu_of)
    caps = [p.comp_capacity for p in cluster.qpus]
    loads = [0] * cluster.n_qpus
    for p in qpu_of:
        loads[p - 1] += 1

    def internal_weight(q: int) -> float:
        pid = qpu_of[q]
        return sum(
            w for (i, j), w in g.weights.items()
            if (i == q and qpu_of[j] == pid) or (j == q and qpu_of[i] == pid)
        )

    def attraction(q: int, pid: int) -> float:
        return sum(
            w for (i, j), w in g.weights.items()
            if (i == q and qpu_of[j] == pid) or (j == q and qpu_of[i] == pid)
        )

    def slack_ring(src: int) -> list[int]:
        """QPUs with slack at the smallest link-hop distance from src."""
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in cluster.link_neighbors(u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        cands = [p for p in dist if p != src and loads[p - 1] < caps[p - 1]]
        if not cands:
            return []
        dmin = min(dist[p] for p in cands)
        return sorted(p for p in cands if dist[p] == dmin)

    for pid in range(1, cluster.n_qpus + 1):
        while loads[pid - 1] > caps[pid - 1]:
            members = [q for q in range(len(qpu_of)) if qpu_of[q] == pid]
            q = min(members, key=lambda x: (internal_weight(x), x))
            pool = slack_ring(pid)
            if not pool:
                raise InfeasibleError("no QPU with spare capacity reachable")
            dest = max(pool, key=lambda p: (attraction(q, p), -p))
            qpu_of[q] = dest
            loads[pid - 1] -= 1
            loads[dest - 1] += 1
    return Assignment(tuple(qpu_of), segment=a.segment)


def random_placement(n_qubits: int, cluster: ClusterTopology, seed: int) -> Assignment:
    """Sample uniformly among all capacity-feasible assignments.

    Qubits are placed one at a time; each QPU is picked with probability
    proportional to the number of feasible completions given its remaining
    capacity, which makes every feasible assignment equally likely.
    """
    if n_qubits < 1:
        raise ValueError("nothing to place")
    _check_fits(n_qubits, cluster)
    caps = tuple(p.comp_capacity for p in cluster.qpus)
    rng = random.Random(seed)
    memo: dict[tuple[int, ...], int] = {}

    def completions(rem: tuple[int, ...], m: int) -> int:
        if m == 0:
            return 1
        if sum(rem) < m:
            return 0
        cached = memo.get(rem)
        if cached is not None:
            return cached
        total = 0
        for idx in range(len(rem)):
            if rem[idx] > 0:
                total += completions(rem[:idx] + (rem[idx] - 1,) + rem[idx + 1:], m - 1)
        memo[rem] = total
        return total

    rem = caps
    out = []
    for placed in range(n_qubits):
        m = n_qubits - placed
        weights = []
        for idx in range(len(rem)):
            if rem[idx] > 0:
                weights.append(completions(rem[:idx] + (rem[idx] - 1,) + rem[idx + 1:], m - 1))
            else:
                weights.append(0)
        total = sum(weights)
        draw = rng.randrange(total)
        acc = 0
        for idx, wgt in enumerate(weights):
            acc += wgt
            if draw < acc:
                out.append(idx + 1)
                rem = rem[:idx] + (rem[idx] - 1,) + rem[idx + 1:]
                break
    return Assignment(tuple(out), segment=1)
