"""Experiment harness: single mappings, ablation arms, and cost-ratio sweeps.

Reports are plain dicts rendered to canonical JSON (sorted keys, no
timestamps), so identical inputs and seeds produce byte-identical output.
"""
from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import replace

from . import __version__
from .anneal import AnnealParams, Plan, compile
from .circuit import Circuit, layerize
from .cost import CostParams
from .hardware import ClusterTopology
from .seeding import split_seed
from .segmentation import SegmentationParams

SCHEMA_VERSION = 1

ARMS = ("baseline", "L1", "L2", "L3")


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _plan_dict(plan: Plan) -> dict:
    return {
        "segments": [
            {
                "index": s.segment.index,
                "from_layer": s.segment.from_layer,
                "to_layer": s.segment.to_layer,
                "n_layers": s.segment.n_layers,
                "two_qubit_gates": s.segment.interactions.total(),
            }
            for s in plan.steps
        ],
        "assignments": [
            {"segment": s.segment.index, "qpu_of": list(s.assignment.qpu_of)}
            for s in plan.steps
        ],
        "costs": [
            dict(s.costs.as_dict(), segment=s.segment.index) for s in plan.steps
        ],
        "totals": plan.totals.as_dict(),
        "epr_pairs": plan.epr_total,
        "per_link_epr": {f"{a}-{b}": v for (a, b), v in sorted(plan.per_link_epr.items())},
    }


def _run_header(command: str, seed: int, circuit: Circuit,
                cluster: ClusterTopology, cp: CostParams) -> dict:
    lc = layerize(circuit)
    return {
        "schema_version": SCHEMA_VERSION,
        "run": {
            "command": command,
            "seed": seed,
            "version": __version__,
            "costs": {
                "cx_cost": cp.cx_cost,
                "swap_cost": cp.swap_cost,
                "remote_op_cost": cp.remote_op_cost,
                "teleport_cost": cp.teleport_cost,
                "gamma1": cp.gamma1,
                "gamma2": cp.gamma2,
                "gamma3": cp.gamma3,
            },
        },
        "circuit": {
            "name": circuit.name,
            "n_qubits": circuit.n_qubits,
            "n_gates": circuit.n_gates,
            "two_qubit_gates": circuit.two_qubit_gate_count,
            "depth": lc.depth,
        },
        "topology": {
            "qpus": [
                {"id": p.id, "name": p.name, "comp_capacity": p.comp_capacity}
                for p in cluster.qpus
            ],
            "links": len(cluster.links),
        },
    }


def run_map(
    circuit: Circuit,
    cluster: ClusterTopology,
    seed: int = 0,
    seg_params: SegmentationParams | None = None,
    cost_params: CostParams | None = None,
    anneal_params: AnnealParams | None = None,
    baseline_samples: int = 10,
) -> dict:
    """Full pipeline on one circuit; report includes a random-placement
    baseline (median of `baseline_samples` static draws) for context."""
    cp = cost_params if cost_params is not None else CostParams()
    plan = compile(circuit, cluster, seed=seed, seg_params=seg_params,
                   cost_params=cp, anneal_params=anneal_params)
    base_totals = []
    for i in range(baseline_samples):
        base = compile(circuit, cluster, seed=split_seed(seed, f"baseline:{i}"),
                       seg_params=seg_params, cost_params=cp,
                       initial="random", do_anneal=False)
        base_totals.append(base.total_cost)
    base_median = statistics.median(base_totals) if base_totals else 0.0
    reduction = ((base_median - plan.total_cost) / base_median) if base_median > 0 else 0.0
    report = _run_header("map", seed, circuit, cluster, cp)
    report.update(_plan_dict(plan))
    report["baseline"] = {
        "samples": baseline_samples,
        "median_total": base_median,
        "reduction": reduction,
    }
    return report


def run_ablate(
    circuit: Circuit,
    cluster: ClusterTopology,
    seed: int = 0,
    seg_params: SegmentationParams | None = None,
    cost_params: CostParams | None = None,
    anneal_params: AnnealParams | None = None,
) -> dict:
    """Four-arm comparison isolating each pipeline stage.

    baseline: one static random feasible placement. L1: pattern segmentation
    plus clustering, no annealing. L2: random segment boundaries, clustering,
    annealing. L3: the full pipeline. Arms share cost parameters and derive
    their randomness from the run seed; reductions are relative to baseline.
    """
    cp = cost_params if cost_params is not None else CostParams()
    plans = {
        "baseline": compile(circuit, cluster, seed=seed, seg_params=seg_params,
                            cost_params=cp, initial="random", do_anneal=False),
        "L1": compile(circuit, cluster, seed=seed, seg_params=seg_params,
                      cost_params=cp, do_anneal=False),
        "L2": compile(circuit, cluster, seed=seed, seg_params=seg_params,
                      cost_params=cp, anneal_params=anneal_params,
                      segmentation_mode="random"),
        "L3": compile(circuit, cluster, seed=seed, seg_params=seg_params,
                      cost_params=cp, anneal_params=anneal_params),
    }
    base_total = plans["baseline"].total_cost
    report = _run_header("ablate", seed, circuit, cluster, cp)
    report["arms"] = {
        arm: {
            "totals": plan.totals.as_dict(),
            "epr_pairs": plan.epr_total,
            "segments": len(plan.steps),
        }
        for arm, plan in plans.items()
    }
    report["reductions"] = {
        arm: ((base_total - plans[arm].total_cost) / base_total) if base_total > 0 else 0.0
        for arm in ("L1", "L2", "L3")
    }
    return report


SWEEP_COLUMNS = ("ratio", "e_inter_share", "e_local_share", "e_move_share", "total")


def run_sweep_ratio(
    circuit: Circuit,
    cluster: ClusterTopology,
    ratios: list[float],
    seed: int = 0,
    seg_params: SegmentationParams | None = None,
    anneal_params: AnnealParams | None = None,
    cost_params: CostParams | None = None,
) -> list[dict]:
    """Compile once per inter:intra cost ratio; shares are the gamma-weighted
    component magnitudes, so the intra column tracks the local overhead in
    absolute terms while the total falls with cheaper interconnects."""
    if not ratios:
        raise ValueError("no ratios given")
    rows = []
    for r in ratios:
        if cost_params is not None:
            cp = replace(cost_params,
                         remote_op_cost=r * cost_params.cx_cost,
                         teleport_cost=r * cost_params.cx_cost)
        else:
            cp = CostParams.from_ratio(r)
        plan = compile(circuit, cluster, seed=seed, seg_params=seg_params,
                       cost_params=cp, anneal_params=anneal_params)
        rows.append({
            "ratio": r,
            "e_inter_share": cp.gamma1 * plan.totals.e_inter,
            "e_local_share": cp.gamma2 * plan.totals.e_local,
            "e_move_share": cp.gamma3 * plan.totals.e_move,
            "total": plan.totals.e_total,
        })
    return rows


def render_sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row[k] for k in SWEEP_COLUMNS})
    return buf.getvalue()
