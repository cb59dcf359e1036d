"""Circuit model, ASAP layering, interaction counting, QASM round trips."""
from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqcmap.circuit import (
    Circuit,
    GateOp,
    count_interactions,
    layerize,
    parse_qasm,
    serialize_qasm,
)
from dqcmap.errors import QasmError

from conftest import cx_chain


QASM_SMALL = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
creg c[3];
h q;
cx q[0],q[1];
rz(pi/2) q[2];
cu1(pi/4) q[0],q[2];
barrier q;
measure q -> c;
"""


class TestParse:
    def test_broadcast_and_gate_list(self):
        c = parse_qasm(QASM_SMALL)
        names = [g.name for g in c.gates]
        # h broadcast over the register, cu1 normalizes to cp, 3 measures
        assert names == ["h", "h", "h", "cx", "rz", "cp",
                         "measure", "measure", "measure"]
        assert c.n_qubits == 3
        assert c.n_clbits == 3
        assert c.gates[3].qubits == (0, 1)
        assert c.gates[5].qubits == (0, 2)
        assert c.gates[6].clbit == 0

    def test_angle_arithmetic(self):
        c = parse_qasm(QASM_SMALL)
        assert c.gates[4].params[0] == pytest.approx(math.pi / 2, rel=1e-12)
        assert c.gates[5].params[0] == pytest.approx(math.pi / 4, rel=1e-12)

    def test_compound_angle_expression(self):
        text = "OPENQASM 2.0;\nqreg q[1];\nrz(2*pi/4+1) q[0];\n"
        c = parse_qasm(text)
        assert c.gates[0].params[0] == pytest.approx(math.pi / 2 + 1, rel=1e-12)

    def test_unknown_gate_reports_line(self):
        text = "OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n"
        with pytest.raises(QasmError, match="line 3"):
            parse_qasm(text)

    def test_wide_gate_needs_decomposition(self):
        text = "OPENQASM 2.0;\nqreg q[3];\nccx q[0],q[1],q[2];\n"
        with pytest.raises(QasmError, match="decompose"):
            parse_qasm(text)

    def test_out_of_range_index(self):
        text = "OPENQASM 2.0;\nqreg q[2];\nh q[5];\n"
        with pytest.raises(QasmError):
            parse_qasm(text)

    def test_two_qregs_rejected(self):
        text = "OPENQASM 2.0;\nqreg q[2];\nqreg r[2];\n"
        with pytest.raises(QasmError):
            parse_qasm(text)

    def test_missing_header_rejected(self):
        with pytest.raises(QasmError):
            parse_qasm("qreg q[2];\nh q[0];\n")


class TestCircuitModel:
    def test_gate_index_bounds_checked(self):
        with pytest.raises(ValueError):
            Circuit(n_qubits=2, gates=(GateOp("cx", (0, 2), ()),), name="bad")

    def test_duplicate_qubits_in_gate_rejected(self):
        with pytest.raises(ValueError):
            Circuit(n_qubits=2, gates=(GateOp("cx", (1, 1), ()),), name="bad")

    def test_two_qubit_count(self):
        c = parse_qasm(QASM_SMALL)
        assert c.two_qubit_gate_count == 2
        assert c.n_gates == 9


class TestLayerize:
    def test_asap_hand_trace(self):
        # g0 h0 | g1 cx01 | g2 cx23 | g3 cx12 | g4 h3
        gates = (
            GateOp("h", (0,), ()),
            GateOp("cx", (0, 1), ()),
            GateOp("cx", (2, 3), ()),
            GateOp("cx", (1, 2), ()),
            GateOp("h", (3,), ()),
        )
        lc = layerize(Circuit(n_qubits=4, gates=gates, name="t"))
        assert lc.layers == (frozenset({0, 2}), frozenset({1, 4}), frozenset({3}))
        assert lc.depth == 3
        assert lc.layer_of == (1, 2, 1, 3, 2)

    def test_barrier_lifts_floor(self):
        text = "OPENQASM 2.0;\nqreg q[2];\nh q[0];\nbarrier q;\nh q[1];\n"
        lc = layerize(parse_qasm(text))
        # without the barrier both h gates would share layer 1
        assert lc.layers == (frozenset({0}), frozenset({1}))

    def test_empty_circuit(self):
        lc = layerize(Circuit(n_qubits=3, gates=(), name="empty"))
        assert lc.depth == 0
        assert lc.layers == ()


@st.composite
def random_circuits(draw):
    n = draw(st.integers(min_value=2, max_value=8))
    n_gates = draw(st.integers(min_value=0, max_value=25))
    gates = []
    for _ in range(n_gates):
        if draw(st.booleans()):
            q = draw(st.integers(min_value=0, max_value=n - 1))
            gates.append(GateOp("h", (q,), ()))
        else:
            a = draw(st.integers(min_value=0, max_value=n - 1))
            b = draw(st.integers(min_value=0, max_value=n - 1).filter(lambda x: x != a))
            gates.append(GateOp("cx", (a, b), ()))
    return Circuit(n_qubits=n, gates=tuple(gates), name="rand")


class TestLayerInvariants:
    @given(random_circuits())
    @settings(max_examples=60, deadline=None)
    def test_partition_and_order(self, circ):
        lc = layerize(circ)
        seen = [g for layer in lc.layers for g in layer]
        assert sorted(seen) == list(range(circ.n_gates))
        for layer in lc.layers:
            used = set()
            for gi in layer:
                qs = set(circ.gates[gi].qubits)
                assert not (qs & used)
                used |= qs
        # ASAP: each gate sits strictly after every earlier gate sharing a qubit
        for gi, gate in enumerate(circ.gates):
            for gj in range(gi):
                if set(gate.qubits) & set(circ.gates[gj].qubits):
                    assert lc.layer_of[gi] > lc.layer_of[gj]

    @given(random_circuits(), st.data())
    @settings(max_examples=60, deadline=None)
    def test_interaction_count_additivity(self, circ, data):
        lc = layerize(circ)
        if lc.depth < 2:
            return
        m = data.draw(st.integers(min_value=1, max_value=lc.depth - 1))
        whole = count_interactions(lc, 1, lc.depth)
        left = count_interactions(lc, 1, m)
        right = count_interactions(lc, m + 1, lc.depth)
        merged: dict = {}
        for part in (left, right):
            for pair, cnt in part.pairs.items():
                merged[pair] = merged.get(pair, 0) + cnt
        assert merged == dict(whole.pairs)


class TestInteractionCount:
    def test_hand_counts(self):
        circ = cx_chain(3, [(0, 1), (0, 1), (1, 2)])
        lc = layerize(circ)
        ic = count_interactions(lc, 1, lc.depth)
        assert ic.pairs == {(0, 1): 2, (1, 2): 1}
        assert ic.total() == 3
        assert ic.weight_on(1) == 3
        assert ic.touching(0) == [(1, 2)]
        assert ic.touching(1) == [(0, 2), (2, 1)]

    def test_range_validation(self):
        lc = layerize(cx_chain(2, [(0, 1)]))
        with pytest.raises(ValueError):
            count_interactions(lc, 0, 1)
        with pytest.raises(ValueError):
            count_interactions(lc, 1, 2)


class TestRoundTrip:
    @given(random_circuits())
    @settings(max_examples=40, deadline=None)
    def test_serialize_parse_identity(self, circ):
        back = parse_qasm(serialize_qasm(circ))
        assert back.n_qubits == circ.n_qubits
        assert [g.name for g in back.gates] == [g.name for g in circ.gates]
        assert [g.qubits for g in back.gates] == [g.qubits for g in circ.gates]

    def test_parameters_survive(self):
        c = parse_qasm(QASM_SMALL)
        back = parse_qasm(serialize_qasm(c))
        assert back.gates == c.gates
        assert back.barriers == c.barriers
