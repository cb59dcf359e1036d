"""Command line interface.

Subcommands: map (compile one circuit), ablate (stage-isolation comparison),
sweep-ratio (cost-ratio sweep), gen-bench (emit a benchmark as OpenQASM),
gen-topology (emit a cluster config). Exit codes: 0 success, 2 invalid
input, 3 infeasible instance, 4 internal error.
"""
from __future__ import annotations

import argparse
import os
import sys
import traceback

from .anneal import AnnealParams
from .bench import gen_adder, gen_qaoa, gen_qft
from .circuit import Circuit, parse_qasm, serialize_qasm
from .cost import CostParams
from .errors import InfeasibleError, InputError
from .hardware import (
    ClusterTopology,
    TOPOLOGY_KINDS,
    gen_topology,
    load_cluster,
    serialize_cluster,
)
from .harness import render_json, render_sweep_csv, run_ablate, run_map, run_sweep_ratio
from .segmentation import SegmentationParams

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_INTERNAL = 4

SEED_ENV = "DQCMAP_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV} must be an integer, got '{raw}'") from None


def _add_circuit_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--circuit", metavar="FILE", help="OpenQASM 2.0 file to map")
    src.add_argument("--bench", choices=("qft", "qaoa", "adder"),
                     help="generate a benchmark instead of reading a file")
    p.add_argument("--size", type=int, help="qubit count for --bench")
    p.add_argument("--qaoa-layers", type=int, default=1,
                   help="ansatz depth for --bench qaoa (default 1)")


def _add_topology_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--topology", metavar="FILE", help="cluster config JSON")
    src.add_argument("--gen", choices=TOPOLOGY_KINDS,
                     help="generate the interconnect instead of reading a file")
    p.add_argument("--sizes", metavar="A,B,...",
                   help="per-QPU capacities for --gen, comma separated")


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help=f"top-level seed (default ${SEED_ENV} or 0)")
    p.add_argument("--window", type=int, help="segmentation density window")
    p.add_argument("--top-k", type=int, help="active-set size per layer")
    p.add_argument("--theta", type=float, help="segment boundary threshold")
    p.add_argument("--lambda", dest="decay", type=float,
                   help="interaction graph decay rate (default 3/segments)")
    p.add_argument("--gamma1", type=float, default=1.0)
    p.add_argument("--gamma2", type=float, default=1.0)
    p.add_argument("--gamma3", type=float, default=1.0)
    p.add_argument("--ratio", type=float, default=5.0,
                   help="inter:intra cost ratio (default 5)")
    p.add_argument("--iters", type=int, help="annealing iterations per segment")
    p.add_argument("--t0", type=float, help="initial temperature (default: calibrated)")
    p.add_argument("--cooling-rate", type=float, help="cooling rate (default 10/iters)")
    p.add_argument("--out", metavar="FILE", help="write the report here (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=None,
                   help="report format (map/ablate: json; sweep-ratio: csv)")


def _parse_sizes(raw: str | None) -> list[int]:
    if not raw:
        raise InputError("--gen requires --sizes")
    try:
        sizes = [int(s) for s in raw.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"--sizes must be comma-separated integers, got '{raw}'") from None
    if not sizes:
        raise InputError("--sizes is empty")
    return sizes


def _parse_ratios(raw: str) -> list[float]:
    out = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            num, den = part.split(":", 1)
            try:
                val = float(num) / float(den)
            except (ValueError, ZeroDivisionError):
                raise InputError(f"bad ratio '{part}'") from None
        else:
            try:
                val = float(part)
            except ValueError:
                raise InputError(f"bad ratio '{part}'") from None
        if val <= 0:
            raise InputError(f"ratio must be positive, got '{part}'")
        out.append(val)
    if not out:
        raise InputError("no ratios given")
    return out


def _load_circuit(args: argparse.Namespace, seed: int) -> Circuit:
    # gen-bench has no --circuit flag but shares this loader
    if getattr(args, "circuit", None):
        try:
            with open(args.circuit, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as exc:
            raise InputError(f"cannot read circuit file: {exc}") from exc
        name = os.path.splitext(os.path.basename(args.circuit))[0]
        return parse_qasm(text, name=name)
    if args.size is None:
        raise InputError("--bench requires --size")
    try:
        if args.bench == "qft":
            return gen_qft(args.size)
        if args.bench == "qaoa":
            return gen_qaoa(args.size, args.qaoa_layers, seed)
        return gen_adder(args.size)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _load_topology(args: argparse.Namespace, seed: int) -> ClusterTopology:
    if args.topology:
        try:
            with open(args.topology, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as exc:
            raise InputError(f"cannot read topology file: {exc}") from exc
        return load_cluster(text)
    try:
        return gen_topology(args.gen, _parse_sizes(args.sizes), seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _seg_params(args: argparse.Namespace) -> SegmentationParams | None:
    given = [args.window, args.top_k, args.theta]
    if all(v is None for v in given):
        return None
    if any(v is None for v in given):
        raise InputError("--window, --top-k and --theta must be given together")
    try:
        return SegmentationParams(window=args.window, top_k=args.top_k,
                                  threshold=args.theta)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _cost_params(args: argparse.Namespace, ratio: float | None = None) -> CostParams:
    r = args.ratio if ratio is None else ratio
    try:
        return CostParams.from_ratio(r, gamma1=args.gamma1, gamma2=args.gamma2,
                                     gamma3=args.gamma3)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _anneal_params(args: argparse.Namespace) -> AnnealParams | None:
    if args.iters is None and args.t0 is None and args.cooling_rate is None:
        return None
    try:
        return AnnealParams(t0=args.t0, cooling_rate=args.cooling_rate,
                            iters_per_segment=args.iters)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqcmap",
        description="Map logical qubits onto a cluster of interconnected QPUs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="compile one circuit to a mapping plan")
    _add_circuit_flags(p_map)
    _add_topology_flags(p_map)
    _add_param_flags(p_map)

    p_abl = sub.add_parser("ablate", help="compare pipeline stages on one circuit")
    _add_circuit_flags(p_abl)
    _add_topology_flags(p_abl)
    _add_param_flags(p_abl)

    p_sweep = sub.add_parser("sweep-ratio", help="sweep the inter:intra cost ratio")
    _add_circuit_flags(p_sweep)
    _add_topology_flags(p_sweep)
    _add_param_flags(p_sweep)
    p_sweep.add_argument("--ratios", default="5,4,3,2,1",
                         help="comma list, each a number or N:1 form (default 5,4,3,2,1)")

    p_bench = sub.add_parser("gen-bench", help="emit a benchmark circuit as OpenQASM")
    p_bench.add_argument("--bench", choices=("qft", "qaoa", "adder"), required=True)
    p_bench.add_argument("--size", type=int, required=True)
    p_bench.add_argument("--qaoa-layers", type=int, default=1)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--out", metavar="FILE")

    p_topo = sub.add_parser("gen-topology", help="emit a cluster config JSON")
    p_topo.add_argument("--gen", choices=TOPOLOGY_KINDS, required=True)
    p_topo.add_argument("--sizes", metavar="A,B,...", required=True)
    p_topo.add_argument("--seed", type=int, default=None)
    p_topo.add_argument("--out", metavar="FILE")

    return parser


def _dispatch(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()

    if args.command == "gen-bench":
        circuit = _load_circuit(args, seed)
        _emit(serialize_qasm(circuit), args.out)
        return EXIT_OK

    if args.command == "gen-topology":
        try:
            ct = gen_topology(args.gen, _parse_sizes(args.sizes), seed)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        _emit(serialize_cluster(ct), args.out)
        return EXIT_OK

    circuit = _load_circuit(args, seed)
    cluster = _load_topology(args, seed)
    seg_params = _seg_params(args)
    ap = _anneal_params(args)

    if args.command == "map":
        report = run_map(circuit, cluster, seed=seed, seg_params=seg_params,
                         cost_params=_cost_params(args), anneal_params=ap)
        _emit(render_json(report), args.out)
        return EXIT_OK

    if args.command == "ablate":
        report = run_ablate(circuit, cluster, seed=seed, seg_params=seg_params,
                            cost_params=_cost_params(args), anneal_params=ap)
        _emit(render_json(report), args.out)
        return EXIT_OK

    if args.command == "sweep-ratio":
        rows = run_sweep_ratio(circuit, cluster, _parse_ratios(args.ratios),
                               seed=seed, seg_params=seg_params, anneal_params=ap,
                               cost_params=_cost_params(args))
        if args.format == "json":
            _emit(render_json({"schema_version": 1, "rows": rows}), args.out)
        else:
            _emit(render_sweep_csv(rows), args.out)
        return EXIT_OK

    raise InputError(f"unknown command '{args.command}'")  # pragma: no cover


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
