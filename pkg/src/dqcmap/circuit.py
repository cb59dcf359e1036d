"""Circuit intermediate representation.

Covers the OpenQASM 2.0 subset the rest of the pipeline consumes: a flat gate
list on a single quantum register, layered into an ASAP schedule, plus
two-qubit interaction counting over layer intervals. Everything here is
immutable after construction and safe to share across threads.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import QasmError

# Gate name -> number of angle parameters. Single-qubit set.
ONE_QUBIT_GATES: dict[str, int] = {
    "h": 0, "x": 0, "y": 0, "z": 0, "s": 0, "t": 0, "sdg": 0, "tdg": 0,
    "id": 0, "rx": 1, "ry": 1, "rz": 1, "u1": 1, "u2": 2, "u3": 3,
}

# Two-qubit set. cu1 is accepted on input as an alias for cp.
TWO_QUBIT_GATES: dict[str, int] = {"cx": 0, "cz": 0, "swap": 0, "cp": 1}

# Known wider gates get a targeted "decompose first" message.
_WIDE_GATES = {"ccx", "cswap", "ccz", "c3x", "c4x", "mcx", "rccx", "rc3x"}


@dataclass(frozen=True)
class GateOp:
    """One gate application.

    qubits are indices into the circuit's single register. params holds the
    angle arguments in gate order. clbit is only set for measures and names
    the classical bit the result lands in.
    """

    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    clbit: int | None = None

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2


@dataclass(frozen=True)
class Circuit:
    """A gate list on one quantum register.

    barriers holds gate-list positions: a value b means a barrier sits
    immediately before gates[b]. Barriers and measures are kept so circuits
    re-serialize faithfully, but neither contributes interactions.
    """

    n_qubits: int
    gates: tuple[GateOp, ...]
    name: str = "circuit"
    n_clbits: int = 0
    barriers: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        for g in self.gates:
            if len(g.qubits) not in (1, 2):
                raise ValueError(f"gate {g.name} must act on 1 or 2 qubits")
            if len(set(g.qubits)) != len(g.qubits):
                raise ValueError(f"gate {g.name} repeats a qubit operand")
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"qubit index {q} out of range")
        for b in self.barriers:
            if not 0 <= b <= len(self.gates):
                raise ValueError(f"barrier position {b} out of range")

    @property
    def n_gates(self) -> int:
        return len(self.gates)

    @property
    def two_qubit_gate_count(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)


@dataclass(frozen=True)
class LayeredCircuit:
    """ASAP layering of a circuit.

    layers[i] is the frozenset of gate indices scheduled in layer i+1;
    layer_of[g] is the 1-based layer of gate index g. Every gate index
    appears in exactly one layer.
    """

    circuit: Circuit
    layers: tuple[frozenset[int], ...]
    layer_of: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def n_qubits(self) -> int:
        return self.circuit.n_qubits


@dataclass(frozen=True)
class InteractionCount:
    """Two-qubit gate counts over some layer interval.

    pairs maps unordered qubit pairs, stored as (i, j) with i < j, to the
    number of two-qubit gates between them inside the interval. Treat as
    read-only.
    """

    pairs: dict[tuple[int, int], int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.pairs.values())

    def weight_on(self, q: int) -> int:
        """Total count of interactions that touch qubit q."""
        return sum(c for (i, j), c in self.pairs.items() if q == i or q == j)

    def touching(self, q: int) -> list[tuple[int, int]]:
        """(partner, count) rows for qubit q, partner ascending."""
        rows = []
        for (i, j), c in self.pairs.items():
            if i == q:
                rows.append((j, c))
            elif j == q:
                rows.append((i, c))
        rows.sort()
        return rows


def layerize(circuit: Circuit) -> LayeredCircuit:
    """Assign every gate its earliest layer.

    A gate lands one past the latest layer among earlier gates that share a
    qubit with it. A barrier lifts the floor to the current maximum layer, so
    everything after it starts a fresh layer.
    """
    barrier_at: set[int] = set(circuit.barriers)
    last_layer = [0] * circuit.n_qubits
    floor = 0
    layer_of: list[int] = []
    layers: list[set[int]] = []
    for idx, g in enumerate(circuit.gates):
        if idx in barrier_at:
            floor = len(layers)
        lay = max([floor] + [last_layer[q] for q in g.qubits]) + 1
        while len(layers) < lay:
            layers.append(set())
        layers[lay - 1].add(idx)
        layer_of.append(lay)
        for q in g.qubits:
            last_layer[q] = lay
    return LayeredCircuit(
        circuit=circuit,
        layers=tuple(frozenset(s) for s in layers),
        layer_of=tuple(layer_of),
    )


def count_interactions(lc: LayeredCircuit, from_layer: int, to_layer: int) -> InteractionCount:
    """Count two-qubit gates whose layer falls in [from_layer, to_layer]."""
    if not (1 <= from_layer <= to_layer <= lc.depth):
        raise ValueError(
            f"layer interval [{from_layer}, {to_layer}] out of range for depth {lc.depth}"
        )
    pairs: dict[tuple[int, int], int] = {}
    for idx, g in enumerate(lc.circuit.gates):
        if not g.is_two_qubit:
            continue
        lay = lc.layer_of[idx]
        if from_layer <= lay <= to_layer:
            a, b = g.qubits
            key = (a, b) if a < b else (b, a)
            pairs[key] = pairs.get(key, 0) + 1
    return InteractionCount(pairs=pairs)


# --- OpenQASM 2.0 subset -----------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+|\d+(?:[eE][+-]?\d+)?|pi|[()+\-*/])")


def _eval_angle(expr: str, line: int) -> float:
    """Evaluate a parameter expression: numbers, pi, + - * / and parentheses."""
    tokens: list[str] = []
    pos = 0
    while pos < len(expr):
        m = _TOKEN_RE.match(expr, pos)
        if m is None:
            raise QasmError(f"bad parameter expression '{expr}'", line)
        tokens.append(m.group(1))
        pos = m.end()
    tokens.append("$end")
    at = 0

    def peek() -> str:
        return tokens[at]

    def take() -> str:
        nonlocal at
        tok = tokens[at]
        at += 1
        return tok

    def parse_expr() -> float:
        val = parse_term()
        while peek() in ("+", "-"):
            if take() == "+":
                val += parse_term()
            else:
                val -= parse_term()
        return val

    def parse_term() -> float:
        val = parse_factor()
        while peek() in ("*", "/"):
            if take() == "*":
                val *= parse_factor()
            else:
                denom = parse_factor()
                if denom == 0:
                    raise QasmError(f"division by zero in '{expr}'", line)
                val /= denom
        return val

    def parse_factor() -> float:
        tok = take()
        if tok == "-":
            return -parse_factor()
        if tok == "+":
            return parse_factor()
        if tok == "(":
            val = parse_expr()
            if take() != ")":
                raise QasmError(f"unbalanced parentheses in '{expr}'", line)
            return val
        if tok == "pi":
            return math.pi
        try:
            return float(tok)
        except ValueError:
            raise QasmError(f"bad token '{tok}' in parameter '{expr}'", line) from None

    val = parse_expr()
    if peek() != "$end":
        raise QasmError(f"trailing junk in parameter '{expr}'", line)
    return val


_QREG_RE = re.compile(r"^qreg\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_CREG_RE = re.compile(r"^creg\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_GATE_RE = re.compile(r"^([A-Za-z_]\w*)\s*(?:\(([^)]*)\))?\s+(.+)$")
_MEASURE_RE = re.compile(r"^measure\s+(\S+?)\s*->\s*(\S+)$")
_OPERAND_RE = re.compile(r"^([A-Za-z_]\w*)\s*(?:\[\s*(\d+)\s*\])?$")


class _RegisterView:
    """Resolves register operands against the declared qreg/creg."""

    def __init__(self):
        self.qreg: tuple[str, int] | None = None
        self.creg: tuple[str, int] | None = None

    def qubits(self, operand: str, line: int) -> list[int]:
        name, idx = self._split(operand, line)
        if self.qreg is None or name != self.qreg[0]:
            raise QasmError(f"unknown quantum register '{name}'", line)
        size = self.qreg[1]
        if idx is None:
            return list(range(size))
        if idx >= size:
            raise QasmError(f"qubit index {idx} out of range for {name}[{size}]", line)
        return [idx]

    def clbits(self, operand: str, line: int) -> list[int]:
        name, idx = self._split(operand, line)
        if self.creg is None or name != self.creg[0]:
            raise QasmError(f"unknown classical register '{name}'", line)
        size = self.creg[1]
        if idx is None:
            return list(range(size))
        if idx >= size:
            raise QasmError(f"bit index {idx} out of range for {name}[{size}]", line)
        return [idx]

    @staticmethod
    def _split(operand: str, line: int) -> tuple[str, int | None]:
        m = _OPERAND_RE.match(operand.strip())
        if m is None:
            raise QasmError(f"bad operand '{operand}'", line)
        return m.group(1), int(m.group(2)) if m.group(2) is not None else None


def parse_qasm(text: str, name: str = "circuit") -> Circuit:
    """Parse an OpenQASM 2.0 source string into a Circuit.

    Supports one qreg, an optional creg, barrier, measure, the single-qubit
    gates in ONE_QUBIT_GATES and the two-qubit gates in TWO_QUBIT_GATES.
    Wider gates are rejected with a hint to decompose them first. Errors
    carry the offending source line.
    """
    regs = _RegisterView()
    gates: list[GateOp] = []
    barriers: list[int] = []
    saw_version = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        for stmt in filter(None, (s.strip() for s in line.split(";"))):
            if stmt.startswith("OPENQASM"):
                if not stmt.replace(" ", "").startswith("OPENQASM2"):
                    raise QasmError(f"unsupported version '{stmt}'", lineno)
                saw_version = True
                continue
            if stmt.startswith("include"):
                continue
            m = _QREG_RE.match(stmt)
            if m:
                if regs.qreg is not None:
                    raise QasmError("multiple quantum registers are not supported", lineno)
                if int(m.group(2)) < 1:
                    raise QasmError("empty quantum register", lineno)
                regs.qreg = (m.group(1), int(m.group(2)))
                continue
            m = _CREG_RE.match(stmt)
            if m:
                if regs.creg is not None:
                    raise QasmError("multiple classical registers are not supported", lineno)
                regs.creg = (m.group(1), int(m.group(2)))
                continue
            m = _MEASURE_RE.match(stmt)
            if m:
                qs = regs.qubits(m.group(1), lineno)
                cs = regs.clbits(m.group(2), lineno)
                if len(qs) != len(cs):
                    raise QasmError("measure operand sizes differ", lineno)
                for q, c in zip(qs, cs):
                    gates.append(GateOp("measure", (q,), (), clbit=c))
                continue
            if stmt == "barrier" or stmt.startswith("barrier ") or stmt.startswith("barrier\t"):
                # Operand list ignored: every barrier is treated as full width.
                if regs.qreg is None:
                    raise QasmError("barrier before qreg declaration", lineno)
                barriers.append(len(gates))
                continue
            m = _GATE_RE.match(stmt)
            if m is None:
                raise QasmError(f"cannot parse statement '{stmt}'", lineno)
            gname, params_src, operands_src = m.group(1), m.group(2), m.group(3)
            gname = "cp" if gname == "cu1" else gname
            if gname in _WIDE_GATES:
                raise QasmError(
                    f"gate '{gname}' acts on 3 or more qubits; decompose first", lineno
                )
            params = tuple(
                _eval_angle(p, lineno)
                for p in (params_src.split(",") if params_src else [])
                if p.strip()
            )
            operands = [o.strip() for o in operands_src.split(",")]
            if gname in ONE_QUBIT_GATES:
                want = ONE_QUBIT_GATES[gname]
                if len(params) != want:
                    raise QasmError(f"{gname} takes {want} parameter(s)", lineno)
                if len(operands) != 1:
                    raise QasmError(f"{gname} takes one operand", lineno)
                for q in regs.qubits(operands[0], lineno):
                    gates.append(GateOp(gname, (q,), params))
            elif gname in TWO_QUBIT_GATES:
                want = TWO_QUBIT_GATES[gname]
                if len(params) != want:
                    raise QasmError(f"{gname} takes {want} parameter(s)", lineno)
                if len(operands) != 2:
                    raise QasmError(f"{gname} takes two indexed operands", lineno)
                pair = []
                for op in operands:
                    qs = regs.qubits(op, lineno)
                    if len(qs) != 1:
                        raise QasmError(
                            f"{gname} operands must be indexed, got '{op}'", lineno
                        )
                    pair.append(qs[0])
                if pair[0] == pair[1]:
                    raise QasmError(f"{gname} operands must differ", lineno)
                gates.append(GateOp(gname, (pair[0], pair[1]), params))
            else:
                raise QasmError(f"unsupported gate '{gname}'", lineno)

    if not saw_version:
        raise QasmError("missing OPENQASM 2.0 header", 1)
    if regs.qreg is None:
        raise QasmError("no quantum register declared", 1)
    return Circuit(
        n_qubits=regs.qreg[1],
        gates=tuple(gates),
        name=name,
        n_clbits=regs.creg[1] if regs.creg else 0,
        barriers=tuple(barriers),
    )


def serialize_qasm(circuit: Circuit) -> str:
    """Emit the circuit as OpenQASM 2.0 using the same subset parse_qasm reads."""
    out = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{circuit.n_qubits}];"]
    if circuit.n_clbits > 0:
        out.append(f"creg c[{circuit.n_clbits}];")
    barrier_at: dict[int, int] = {}
    for b in circuit.barriers:
        barrier_at[b] = barrier_at.get(b, 0) + 1
    for idx, g in enumerate(circuit.gates):
        out.extend("barrier q;" for _ in range(barrier_at.get(idx, 0)))
        if g.name == "measure":
            out.append(f"measure q[{g.qubits[0]}] -> c[{g.clbit}];")
            continue
        args = ",".join(f"q[{q}]" for q in g.qubits)
        if g.params:
            angle = ",".join(repr(p) for p in g.params)
            out.append(f"{g.name}({angle}) {args};")
        else:
            out.append(f"{g.name} {args};")
    out.extend("barrier q;" for _ in range(barrier_at.get(len(circuit.gates), 0)))
    return "\n".join(out) + "\n"
