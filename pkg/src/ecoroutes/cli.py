"""Command-line interface.

Subcommands: generate, solve, validate, bench (table1 | table2) and
export-network.  Summary lines are key=value pairs for shell pipelines.

Exit codes: 0 success / feasible verdict, 1 infeasible verdict,
2 solve or parameter error, 3 input/output or document-format error.
"""

import argparse
import os
import sys
from fractions import Fraction

from . import __version__
from .exact import ExactSolveError, ModelBounds, solve_exact, validate
from .instance import (InstanceError, generate_instance, read_instance,
                       total_waste, write_instance, ContainerSpec)
from .network import EdgeListError, bundled_sioux_falls, parse_edge_list
from .packing import ConfigError
from .routing import SolutionFormatError, read_solution, solve_heuristic, write_solution
from .experiments import (DEFAULT_STANDIN_SEED, TrialProtocol,
                          make_standin_network, run_table1, run_table2,
                          write_report, STANDIN_DEPOT)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_SOLVE = 2
EXIT_IO = 3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_network(name_or_path):
    if name_or_path == "sioux-falls":
        return bundled_sioux_falls()
    if name_or_path == "standin":
        return make_standin_network()
    try:
        text = open(name_or_path).read()
    except OSError as e:
        raise CliError(f"cannot read network file: {e}", EXIT_IO)
    try:
        return parse_edge_list(text, name=os.path.basename(name_or_path))
    except EdgeListError as e:
        raise CliError(f"bad network file: {e}", EXIT_IO)


def _parse_node_list(text):
    """Node list syntax: comma-separated ids and `a..b` ranges."""
    nodes = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..", 1)
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise CliError(f"empty node range {part!r}", EXIT_SOLVE)
                nodes.extend(range(lo, hi + 1))
            elif part:
                nodes.append(int(part))
    except ValueError:
        raise CliError(f"cannot parse node list {text!r}", EXIT_SOLVE) from None
    if not nodes:
        raise CliError("no demand nodes given", EXIT_SOLVE)
    return nodes


def _parse_range(text):
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise CliError(f"demand range must be LO:HI, got {text!r}", EXIT_SOLVE)


def _parse_lambda(text):
    try:
        lam = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CliError(f"cannot parse lambda {text!r}", EXIT_SOLVE)
    if not (0 <= lam <= 1):
        raise CliError(f"lambda {lam} outside [0, 1]", EXIT_SOLVE)
    return lam


def _read_instance_file(path):
    try:
        text = open(path).read()
    except OSError as e:
        raise CliError(f"cannot read instance: {e}", EXIT_IO)
    try:
        return read_instance(text)
    except InstanceError as e:
        raise CliError(f"bad instance document: {e}", EXIT_IO)


def _write_output(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as e:
            raise CliError(f"cannot write {path}: {e}", EXIT_IO)


def cmd_generate(args):
    net = _load_network(args.network)
    seed = args.seed
    if seed is None:
        seed = int.from_bytes(os.urandom(8), "big") >> 1
    depot = args.depot
    if depot is None:
        depot = STANDIN_DEPOT if args.network == "standin" else 1
    lo, hi = _parse_range(args.range)
    try:
        inst = generate_instance(
            net, depot=depot, demand_nodes=_parse_node_list(args.demand_nodes),
            modalities=args.modalities, demand_range=(lo, hi),
            spec=ContainerSpec(args.block_capacity, args.block_count),
            seed=seed, lam=_parse_lambda(args.lam), name=args.name or "")
    except InstanceError as e:
        raise CliError(str(e), EXIT_SOLVE)
    _write_output(write_instance(inst), args.out)
    totals = total_waste(inst)
    print(f"seed={seed} nodes={len(inst.demand_nodes)} modalities={inst.modalities} "
          f"grand_total_kg={totals.grand} out={args.out or '-'}", file=sys.stderr)
    return EXIT_OK


def _bounds_from(args):
    budget = args.time_budget
    if budget is None:
        env = os.environ.get("ECOROUTES_TIME_BUDGET")
        budget = float(env) if env else None
    return ModelBounds(max_routes=args.max_routes,
                       max_stops_per_route=args.max_stops,
                       time_budget=budget,
                       max_steps=args.max_steps)


def cmd_solve(args):
    inst = _read_instance_file(args.instance)
    if args.lam is not None:
        from .instance import Instance
        inst = Instance(inst.network, inst.depot, inst.demand_nodes,
                        inst.modalities, inst.demands, inst.container,
                        lam=_parse_lambda(args.lam), name=inst.name, seed=inst.seed)
    if args.strategy in ("fixed", "adapted"):
        try:
            sol = solve_heuristic(inst, args.strategy)
        except ConfigError as e:
            raise CliError(str(e), EXIT_SOLVE)
        certificate = None
    elif args.strategy == "exact":
        try:
            result = solve_exact(inst, _bounds_from(args))
        except ExactSolveError as e:
            raise CliError(str(e), EXIT_SOLVE)
        sol = result.solution
        certificate = result.certificate() if args.certificate else None
    else:
        raise CliError(f"unknown strategy {args.strategy!r}", EXIT_SOLVE)

    expand = None
    if args.expand_paths:
        from .network import all_pairs_shortest
        expand = all_pairs_shortest(inst.network)
    _write_output(write_solution(sol, inst, certificate=certificate,
                                 expand_paths=expand), args.out)
    line = (f"strategy={sol.strategy} routes={len(sol.routes)} "
            f"z1={sol.z1} z2={sol.z2} z3={sol.z3} lambda={sol.lam}")
    if args.strategy == "exact":
        line += f" status={result.status} bound={result.bound}"
    print(line, file=sys.stderr)
    return EXIT_OK


def cmd_validate(args):
    inst = _read_instance_file(args.instance)
    try:
        text = open(args.solution).read()
    except OSError as e:
        raise CliError(f"cannot read solution: {e}", EXIT_IO)
    try:
        sol, _ = read_solution(text, inst)
    except SolutionFormatError as e:
        raise CliError(f"bad solution document: {e}", EXIT_IO)
    try:
        verdict = validate(inst, sol)
    except ValueError as e:
        raise CliError(str(e), EXIT_IO)
    z1, z2, z3 = verdict.objectives
    print(f"feasible={str(verdict.feasible).lower()} violations={len(verdict.violations)} "
          f"z1={z1} z2={z2} z3={z3}", file=sys.stderr)
    for code, detail in verdict.violations:
        print(f"{code}: {detail}")
    return EXIT_OK if verdict.feasible else EXIT_INFEASIBLE


def cmd_bench(args):
    if args.table == "table1":
        net = _load_network(args.network)
        node_counts = _parse_node_list(args.nodes)
        seeds = _parse_node_list(args.seeds) if args.seeds else [args.seed]
        rows = []
        solutions = []
        report = None
        for seed in seeds:
            report = run_table1(net, node_counts, seed, bounds=_bounds_from(args))
            rows.extend(report.rows)
            solutions.extend(report.solutions)
        report.rows = rows
        report.solutions = solutions
        from .experiments import table1_aggregates
        report.aggregates = table1_aggregates(rows)
        report.config["seeds"] = seeds
        written = write_report(report, args.out, keep_solutions=args.keep_solutions)
    else:
        if args.trials < 1:
            raise CliError("--trials must be >= 1", EXIT_SOLVE)
        net = _load_network(args.network)
        protocol = TrialProtocol()
        report = run_table2(net, protocol=protocol, trials=args.trials,
                            master_seed=args.master_seed,
                            keep_solutions=args.keep_solutions)
        written = write_report(report, args.out, keep_solutions=args.keep_solutions)
    print(f"table={args.table} rows={len(report.rows)} out={args.out}", file=sys.stderr)
    for path in written:
        print(path, file=sys.stderr)
    return EXIT_OK


def cmd_export_network(args):
    net = _load_network(args.name)
    _write_output(net.to_edge_list(), args.out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="ecoroutes",
                                description="Mobile multi-block container routing")
    p.add_argument("--version", action="version",
                   version=f"ecoroutes {__version__} (instance-format 1, solution-format 1)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a seeded random instance")
    g.add_argument("--network", default="sioux-falls",
                   help="sioux-falls | standin | path to an edge-list file")
    g.add_argument("--depot", type=int, default=None)
    g.add_argument("--demand-nodes", required=True,
                   help="e.g. 2..11 or 1,11,19,22,29,33,39")
    g.add_argument("--modalities", type=int, default=4)
    g.add_argument("--range", default="1:9", help="demand interval LO:HI in kg")
    g.add_argument("--block-capacity", type=int, default=1)
    g.add_argument("--block-count", type=int, default=4)
    g.add_argument("--lambda", dest="lam", default="1")
    g.add_argument("--seed", type=int, default=None,
                   help="omit for a random seed (echoed on stderr)")
    g.add_argument("--name", default=None)
    g.add_argument("-o", "--out", default=None)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    s.add_argument("--strategy", choices=("fixed", "adapted", "exact"), required=True)
    s.add_argument("--lambda", dest="lam", default=None,
                   help="override the instance's lambda")
    s.add_argument("--time-budget", type=float, default=None,
                   help="exact-search wall budget in seconds "
                        "(default from ECOROUTES_TIME_BUDGET)")
    s.add_argument("--max-steps", type=int, default=None,
                   help="deterministic exact-search budget in route actions")
    s.add_argument("--max-stops", type=int, default=None)
    s.add_argument("--max-routes", type=int, default=None)
    s.add_argument("--certificate", action="store_true",
                   help="embed optimal/incumbent status and bound in the output")
    s.add_argument("--expand-paths", action="store_true",
                   help="embed full node walks for plotting")
    s.add_argument("-o", "--out", default=None)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check a solution against its instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", help="run a benchmark study")
    b.add_argument("table", choices=("table1", "table2"))
    b.add_argument("--network", default=None,
                   help="default: sioux-falls for table1, standin for table2")
    b.add_argument("--nodes", default="10", help="table1: demand-node counts")
    b.add_argument("--seed", type=int, default=1, help="table1: base seed")
    b.add_argument("--seeds", default=None, help="table1: several seeds, e.g. 1..10")
    b.add_argument("--trials", type=int, default=30, help="table2: trial count")
    b.add_argument("--master-seed", type=int, default=42)
    b.add_argument("--time-budget", type=float, default=None)
    b.add_argument("--max-steps", type=int, default=20_000)
    b.add_argument("--max-stops", type=int, default=None)
    b.add_argument("--max-routes", type=int, default=None)
    b.add_argument("--keep-solutions", action="store_true")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("export-network", help="emit a bundled network as an edge list")
    e.add_argument("name", choices=("sioux-falls", "standin"))
    e.add_argument("-o", "--out", default=None)
    e.set_defaults(func=cmd_export_network)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.func is cmd_bench and args.network is None:
        args.network = "sioux-falls" if args.table == "table1" else "standin"
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (InstanceError, EdgeListError, SolutionFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
