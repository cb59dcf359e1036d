"""Cluster hardware model.

A cluster is a set of QPUs, each with a qubit coupling map and a compute
capacity, joined by weighted interconnect links through one global switch.
Distance tables are precomputed at load time: intra-QPU hop counts per
coupling map, and for every QPU pair the cheapest link path by total
cost_factor (ties broken toward fewer hops, then lower ids, so the path and
its hop count are deterministic). EPR consumption is tracked on the switch,
one pair per link traversed.
"""
from __future__ import annotations

import heapq
import json
import random
from collections import deque
from dataclasses import dataclass, field

from .errors import InfeasibleError, ValidationError
from .seeding import component_rng

Link = tuple[int, int]  # (a, b) with a < b, 1-based QPU ids


@dataclass(frozen=True)
class QPU:
    """One processor: id is its 1-based position in the cluster."""

    id: int
    name: str
    comp_capacity: int
    coupling: tuple[tuple[int, int], ...]
    comm_qubits: int = 1
    switch_id: int = 0


class QuantumSwitch:
    """EPR bookkeeping for the cluster interconnect.

    Counters only; no routing logic lives here. epr_consumed grows by one per
    link traversed, per_link_epr splits the same total by link.
    """

    def __init__(self, links: list[Link]):
        self.per_link_epr: dict[Link, int] = {lk: 0 for lk in sorted(links)}
        self.epr_consumed = 0
        self.remote_ops = 0
        self.teleports = 0

    def reset(self) -> None:
        for lk in self.per_link_epr:
            self.per_link_epr[lk] = 0
        self.epr_consumed = 0
        self.remote_ops = 0
        self.teleports = 0

    def _consume(self, link_path: tuple[Link, ...]) -> None:
        if not link_path:
            raise ValueError("empty link path")
        for a, b in link_path:
            key = (a, b) if a < b else (b, a)
            if key not in self.per_link_epr:
                raise ValueError(f"unknown link {key}")
            self.per_link_epr[key] += 1
            self.epr_consumed += 1


def record_remote_op(switch: QuantumSwitch, link_path: tuple[Link, ...]) -> None:
    """Account one remote two-qubit gate routed along link_path."""
    switch._consume(link_path)
    switch.remote_ops += 1


def record_teleport(switch: QuantumSwitch, link_path: tuple[Link, ...]) -> None:
    """Account one qubit teleport routed along link_path."""
    switch._consume(link_path)
    switch.teleports += 1


@dataclass(frozen=True)
class DistanceTables:
    """Precomputed distances.

    intra[p-1][i][j]: coupling-graph hops between physical qubits i, j of QPU p.
    inter_cost[(p, q)]: cheapest total cost_factor between QPUs p and q.
    inter_hops[(p, q)]: links on that cheapest path.
    inter_path[(p, q)]: the path itself as a tuple of links, in travel order.
    """

    intra: tuple[tuple[tuple[int, ...], ...], ...]
    inter_cost: dict[tuple[int, int], float]
    inter_hops: dict[tuple[int, int], int]
    inter_path: dict[tuple[int, int], tuple[Link, ...]]


@dataclass(frozen=True)
class ClusterTopology:
    """Validated cluster: QPUs, links, switch and distance tables."""

    qpus: tuple[QPU, ...]
    links: tuple[tuple[int, int, float], ...]  # (a, b, cost_factor), a < b
    switch: QuantumSwitch
    distances: DistanceTables

    @property
    def n_qpus(self) -> int:
        return len(self.qpus)

    @property
    def total_capacity(self) -> int:
        return sum(p.comp_capacity for p in self.qpus)

    def qpu(self, pid: int) -> QPU:
        if not 1 <= pid <= len(self.qpus):
            raise ValueError(f"no QPU with id {pid}")
        return self.qpus[pid - 1]

    def capacities(self) -> list[int]:
        return [p.comp_capacity for p in self.qpus]

    def inter_cost(self, a: int, b: int) -> float:
        return self.distances.inter_cost[(a, b)]

    def inter_hops(self, a: int, b: int) -> int:
        return self.distances.inter_hops[(a, b)]

    def inter_path(self, a: int, b: int) -> tuple[Link, ...]:
        return self.distances.inter_path[(a, b)]

    def intra_dist(self, pid: int, i: int, j: int) -> int:
        return self.distances.intra[pid - 1][i][j]

    def link_neighbors(self, pid: int) -> list[int]:
        out = set()
        for a, b, _ in self.links:
            if a == pid:
                out.add(b)
            elif b == pid:
                out.add(a)
        return sorted(out)

    def fresh_switch(self) -> QuantumSwitch:
        return QuantumSwitch([(a, b) for a, b, _ in self.links])


def _bfs_hops(n: int, adj: dict[int, list[int]], start: int) -> list[int]:
    dist = [-1] * n
    dist[start] = 0
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _intra_table(qpu: QPU) -> tuple[tuple[int, ...], ...]:
    n = qpu.comp_capacity
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for i, j in qpu.coupling:
        adj[i].append(j)
        adj[j].append(i)
    for i in adj:
        adj[i].sort()
    rows = []
    for start in range(n):
        dist = _bfs_hops(n, adj, start)
        if any(d < 0 for d in dist):
            raise ValidationError(f"QPU '{qpu.name}': coupling graph is not connected")
        rows.append(tuple(dist))
    return tuple(rows)


def _inter_tables(
    n_qpus: int, links: tuple[tuple[int, int, float], ...]
) -> tuple[dict, dict, dict]:
    adj: dict[int, list[tuple[int, float]]] = {p: [] for p in range(1, n_qpus + 1)}
    for a, b, c in links:
        adj[a].append((b, c))
        adj[b].append((a, c))
    for p in adj:
        adj[p].sort()
    cost: dict[tuple[int, int], float] = {}
    hops: dict[tuple[int, int], int] = {}
    path: dict[tuple[int, int], tuple[Link, ...]] = {}
    for src in range(1, n_qpus + 1):
        best: dict[int, tuple[float, int]] = {src: (0.0, 0)}
        parent: dict[int, int] = {}
        done: set[int] = set()
        heap: list[tuple[float, int, int]] = [(0.0, 0, src)]
        while heap:
            c, h, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v, w in adj[u]:
                cand = (c + w, h + 1)
                if v not in best or cand < best[v]:
                    best[v] = cand
                    parent[v] = u
                    heapq.heappush(heap, (cand[0], cand[1], v))
        for dst in range(1, n_qpus + 1):
            if dst not in best:
                raise ValidationError("interconnect graph is not connected")
            c, h = best[dst]
            cost[(src, dst)] = c
            hops[(src, dst)] = h
            chain: list[Link] = []
            node = dst
            while node != src:
                chain.append((parent[node], node))
                node = parent[node]
            path[(src, dst)] = tuple(reversed(chain))
    return cost, hops, path


def build_cluster(
    qpu_specs: list[dict], link_specs: list[dict]
) -> ClusterTopology:
    """Assemble and validate a topology from plain dict specs."""
    if not qpu_specs:
        raise ValidationError("cluster needs at least one QPU")
    qpus = []
    names = set()
    for pos, spec in enumerate(qpu_specs, start=1):
        name = spec["name"]
        cap = spec["comp_capacity"]
        coupling = spec["coupling"]
        comm = spec["comm_qubits"]
        if not isinstance(name, str) or not name:
            raise ValidationError(f"qpu {pos}: name must be a nonempty string")
        if name in names:
            raise ValidationError(f"qpu {pos}: duplicate name '{name}'")
        names.add(name)
        if not isinstance(cap, int) or cap < 1:
            raise ValidationError(f"qpu '{name}': comp_capacity must be a positive integer")
        if not isinstance(comm, int) or comm < 1:
            raise ValidationError(f"qpu '{name}': comm_qubits must be a positive integer")
        edges = []
        for e in coupling:
            if (not isinstance(e, (list, tuple)) or len(e) != 2
                    or not all(isinstance(x, int) for x in e)):
                raise ValidationError(f"qpu '{name}': coupling edges must be integer pairs")
            i, j = e
            if i == j:
                raise ValidationError(f"qpu '{name}': self-loop in coupling map")
            if not (0 <= i < cap and 0 <= j < cap):
                raise ValidationError(f"qpu '{name}': coupling index out of range")
            edges.append((min(i, j), max(i, j)))
        qpus.append(QPU(
            id=pos, name=name, comp_capacity=cap,
            coupling=tuple(sorted(set(edges))), comm_qubits=comm,
        ))

    links: list[tuple[int, int, float]] = []
    seen: set[Link] = set()
    for spec in link_specs:
        a, b, c = spec["a"], spec["b"], spec["cost_factor"]
        if not isinstance(a, int) or not isinstance(b, int):
            raise ValidationError("link endpoints must be integer QPU ids")
        if not (1 <= a <= len(qpus) and 1 <= b <= len(qpus)):
            raise ValidationError(f"link ({a}, {b}) references an unknown QPU id")
        if a == b:
            raise ValidationError(f"link ({a}, {b}) is a self-loop")
        if not isinstance(c, (int, float)) or isinstance(c, bool) or c <= 0:
            raise ValidationError(f"link ({a}, {b}): cost_factor must be positive")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise ValidationError(f"duplicate link {key}")
        seen.add(key)
        links.append((key[0], key[1], float(c)))
    links.sort()

    intra = tuple(_intra_table(p) for p in qpus)
    cost, hops, path = _inter_tables(len(qpus), tuple(links))
    return ClusterTopology(
        qpus=tuple(qpus),
        links=tuple(links),
        switch=QuantumSwitch([(a, b) for a, b, _ in links]),
        distances=DistanceTables(intra=intra, inter_cost=cost, inter_hops=hops,
                                 inter_path=path),
    )


_QPU_FIELDS = {"name", "comp_capacity", "coupling", "comm_qubits"}
_LINK_FIELDS = {"a", "b", "cost_factor"}


def load_cluster(text: str) -> ClusterTopology:
    """Parse and validate a cluster config JSON document.

    Schema: {"qpus": [{"name", "comp_capacity", "coupling", "comm_qubits"}],
    "links": [{"a", "b", "cost_factor"}]} where a/b are 1-based positions in
    the qpus array. Unknown fields anywhere are rejected.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    extra = set(doc) - {"qpus", "links"}
    if extra:
        raise ValidationError(f"unknown config fields: {sorted(extra)}")
    if "qpus" not in doc or not isinstance(doc["qpus"], list):
        raise ValidationError("config needs a 'qpus' array")
    link_specs = doc.get("links", [])
    if not isinstance(link_specs, list):
        raise ValidationError("'links' must be an array")
    for pos, spec in enumerate(doc["qpus"], start=1):
        if not isinstance(spec, dict):
            raise ValidationError(f"qpu {pos} must be an object")
        missing = _QPU_FIELDS - set(spec)
        if missing:
            raise ValidationError(f"qpu {pos}: missing fields {sorted(missing)}")
        extra = set(spec) - _QPU_FIELDS
        if extra:
            raise ValidationError(f"qpu {pos}: unknown fields {sorted(extra)}")
    for pos, spec in enumerate(link_specs, start=1):
        if not isinstance(spec, dict):
            raise ValidationError(f"link {pos} must be an object")
        missing = _LINK_FIELDS - set(spec)
        if missing:
            raise ValidationError(f"link {pos}: missing fields {sorted(missing)}")
        extra = set(spec) - _LINK_FIELDS
        if extra:
            raise ValidationError(f"link {pos}: unknown fields {sorted(extra)}")
    return build_cluster(doc["qpus"], link_specs)


def cluster_to_config(ct: ClusterTopology) -> dict:
    """Inverse of load_cluster, minus derived tables."""
    return {
        "qpus": [
            {
                "name": p.name,
                "comp_capacity": p.comp_capacity,
                "coupling": [list(e) for e in p.coupling],
                "comm_qubits": p.comm_qubits,
            }
            for p in ct.qpus
        ],
        "links": [
            {"a": a, "b": b, "cost_factor": c} for a, b, c in ct.links
        ],
    }


def serialize_cluster(ct: ClusterTopology) -> str:
    return json.dumps(cluster_to_config(ct), indent=2, sort_keys=True) + "\n"


# --- generation ---------------------------------------------------------------

def _coupling_line(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def _coupling_ring(n: int) -> list[tuple[int, int]]:
    edges = _coupling_line(n)
    if n >= 3:
        edges.append((0, n - 1))
    return edges


def _coupling_grid(n: int) -> list[tuple[int, int]]:
    if n < 2:
        return []
    rows = max(1, int(n ** 0.5))
    cols = -(-n // rows)
    edges = []
    for v in range(n):
        r, c = divmod(v, cols)
        if c + 1 < cols and v + 1 < n:
            edges.append((v, v + 1))
        if (r + 1) * cols + c < n:
            edges.append((v, (r + 1) * cols + c))
    return edges


def _coupling_hex(n: int) -> list[tuple[int, int]]:
    # Degree <= 3: a chain with sparse cross links, the shape heavy-hex
    # devices reduce to at small sizes.
    edges = _coupling_line(n)
    for i in range(0, n - 5, 10):
        edges.append((i, i + 5))
    return edges


_COUPLING_BUILDERS = {
    "line": _coupling_line,
    "ring": _coupling_ring,
    "grid": _coupling_grid,
    "heavy_hex_like": _coupling_hex,
}

TOPOLOGY_KINDS = ("line", "ring", "grid", "heavy_hex_like")


def gen_topology(kind: str, sizes: list[int], seed: int) -> ClusterTopology:
    """Generate a cluster: `kind` shapes the interconnect, `sizes` gives one
    comp_capacity per QPU. Internal coupling maps are drawn per QPU from the
    same shape family, link cost factors from U(0.5, 2.0), all from `seed`.
    """
    if kind not in _COUPLING_BUILDERS:
        raise ValueError(f"unknown topology kind '{kind}'")
    if not sizes:
        raise ValueError("sizes must be nonempty")
    for s in sizes:
        if not isinstance(s, int) or s < 2:
            raise ValueError("every QPU size must be an integer >= 2")
    rng = component_rng(seed, f"topology:{kind}")
    styles = sorted(_COUPLING_BUILDERS)
    qpu_specs = []
    for pos, cap in enumerate(sizes, start=1):
        style = rng.choice(styles)
        qpu_specs.append({
            "name": f"qpu{pos}",
            "comp_capacity": cap,
            "coupling": [list(e) for e in _COUPLING_BUILDERS[style](cap)],
            "comm_qubits": max(1, cap // 8),
        })
    p = len(sizes)
    inter = _COUPLING_BUILDERS[kind](p)
    link_specs = []
    for a, b in sorted(set(inter)):
        link_specs.append({
            "a": a + 1,
            "b": b + 1,
            "cost_factor": round(rng.uniform(0.5, 2.0), 3),
        })
    if p > 1 and not link_specs:
        raise InfeasibleError("topology kind produced no links for multiple QPUs")
    return build_cluster(qpu_specs, link_specs)
