"""Shared builders for the test suite plus the acceptance summary hook."""
from __future__ import annotations

import pytest

from dqcmap.circuit import Circuit, GateOp
from dqcmap.hardware import ClusterTopology, build_cluster


def line_coupling(k: int) -> list[list[int]]:
    return [[i, i + 1] for i in range(k - 1)]


def full_coupling(k: int) -> list[list[int]]:
    return [[i, j] for i in range(k) for j in range(i + 1, k)]


def two_qpu_line(cap_a: int, cap_b: int, cost_factor: float = 1.0) -> ClusterTopology:
    return build_cluster(
        [
            {"name": "a", "comp_capacity": cap_a,
             "coupling": line_coupling(cap_a), "comm_qubits": 1},
            {"name": "b", "comp_capacity": cap_b,
             "coupling": line_coupling(cap_b), "comm_qubits": 1},
        ],
        [{"a": 1, "b": 2, "cost_factor": cost_factor}],
    )


def triangle_cluster(caps=(6, 6, 8), cost_factors=(1.0, 2.0, 1.5)) -> ClusterTopology:
    """Three fully coupled QPUs on a triangle interconnect."""
    qpus = [
        {"name": f"qpu{i + 1}", "comp_capacity": c,
         "coupling": full_coupling(c), "comm_qubits": 1}
        for i, c in enumerate(caps)
    ]
    links = [
        {"a": 1, "b": 2, "cost_factor": cost_factors[0]},
        {"a": 1, "b": 3, "cost_factor": cost_factors[1]},
        {"a": 2, "b": 3, "cost_factor": cost_factors[2]},
    ]
    return build_cluster(qpus, links)


def cx_chain(n_qubits: int, pairs: list[tuple[int, int]], name: str = "chain") -> Circuit:
    gates = tuple(GateOp("cx", (a, b), ()) for a, b in pairs)
    return Circuit(n_qubits=n_qubits, gates=gates, name=name)


# -- acceptance criteria reporting ------------------------------------------


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion for the summary."""

    def record(criterion: int, passed: bool, detail: str) -> None:
        request.config._acceptance_lines.append((criterion, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = sorted(getattr(config, "_acceptance_lines", []))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in lines:
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {criterion}: {verdict} - {detail}")
