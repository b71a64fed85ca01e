"""Command-line front end: exact reliability, seeded solver benchmarks,
orthogonal-array tuning, and instance synthesis.

Verbs: ``reliability``, ``solve``, ``tune``, ``synthesize``.  Exit codes:
0 success, 1 usage error, 2 input error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import functools
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import bat, grrap, ss3oa, swarm
from .network import NetworkParseError, parse_network

CSV_COLUMNS = ["problem", "algorithm", "seed", "stage", "generation",
               "best_rs", "best_rp", "gv", "gc", "gw", "feasible", "runtime_s"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="grrap-bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    rel = sub.add_parser("reliability", help="exact reliability of one network")
    rel.add_argument("--network", required=True)
    rel.add_argument("--cap", type=int, default=bat.DEFAULT_CAP)
    rel.add_argument("probs", nargs="+", type=float,
                     help="per-arc up probabilities, arc order")

    solve = sub.add_parser("solve", help="seeded multi-run solver benchmark")
    solve.add_argument("--network", action="append", required=True)
    solve.add_argument("--instance", action="append", default=[])
    solve.add_argument("--algo", action="append", choices=swarm.ALGORITHMS)
    solve.add_argument("--nsol", type=int, default=100)
    solve.add_argument("--ngen", type=int, default=1000)
    solve.add_argument("--nrun", type=int, default=1)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--schedule", help="stage schedule file")
    solve.add_argument("--try", dest="try_index", type=int, choices=range(9),
                       help="fixed setting from the L9 try table")
    solve.add_argument("--stages", help="comma-separated stage generations")
    solve.add_argument("--out", help="CSV output path (default stdout)")
    solve.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    solve.add_argument("--cap", type=int, default=bat.DEFAULT_CAP)

    tune = sub.add_parser("tune", help="L9 orthogonal-array parameter tuning")
    tune.add_argument("--network", action="append", required=True)
    tune.add_argument("--instance", action="append", default=[])
    tune.add_argument("--nsol", type=int, default=100)
    tune.add_argument("--ngen", type=int, default=1000)
    tune.add_argument("--nrun", type=int, default=5,
                      help="runs per problem per try")
    tune.add_argument("--seed", type=int, default=0)
    tune.add_argument("--stages", help="comma-separated stage generations")
    tune.add_argument("--out", help="report CSV path (default stdout)")
    tune.add_argument("--cap", type=int, default=bat.DEFAULT_CAP)

    synth = sub.add_parser("synthesize", help="derive an instance file from a topology")
    synth.add_argument("--network", required=True)
    synth.add_argument("--out", help="instance file path (default stdout)")
    return parser


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _parse_stages(text, n_gen):
    if text is None:
        return swarm.default_stage_gens(n_gen)
    gens = tuple(int(v) for v in text.split(","))
    return gens


def _load_problems(args):
    """(name, instance) pairs from --network/--instance lists."""
    problems = []
    instances = list(args.instance)
    for idx, net_path in enumerate(args.network):
        net = parse_network(_read(net_path))
        if idx < len(instances):
            inst = grrap.parse_instance(_read(instances[idx]), net)
        else:
            inst = grrap.synthesize_instance(net)
        name = os.path.splitext(os.path.basename(net_path))[0]
        problems.append((name, inst))
    return problems


def _resolve_setting(args):
    if args.schedule and args.try_index is not None:
        raise _UsageError("--schedule and --try are mutually exclusive")
    if args.schedule:
        return swarm.read_schedule(_read(args.schedule))
    if args.try_index is not None:
        return ss3oa.derive_try_table(ss3oa.OADesign())[args.try_index]
    return swarm.DEFAULT_SCHEDULE


@functools.lru_cache(maxsize=32)
def _cached_cvs(network_text: str, cap: int):
    return bat.enumerate_connected(parse_network(network_text), cap=cap)


def _run_one(task):
    """One seeded run; executed in a worker process."""
    (name, network_text, instance_text, algo, setting, seed,
     n_sol, n_gen, stage_gens, cap) = task
    net = parse_network(network_text)
    inst = (grrap.parse_instance(instance_text, net) if instance_text
            else grrap.synthesize_instance(net))
    cvs = _cached_cvs(network_text, cap)
    spec = swarm.SolverSpec(algorithm=algo, setting=setting, n_sol=n_sol,
                            n_gen=n_gen, seed=seed)
    start = time.perf_counter()
    result = swarm.run_solver(spec, inst, cvs, stage_gens=stage_gens)
    runtime = time.perf_counter() - start
    n, r = grrap.decode(inst, result.best_x)
    rows = []
    for row in result.stage_rows:
        rows.append([name, algo, seed, row.stage, row.generation,
                     repr(row.best.r_s), repr(row.best.r_p),
                     repr(row.best.g_v), repr(row.best.g_c), repr(row.best.g_w),
                     row.best.feasible, repr(runtime)])
    solution = (f"problem={name} algorithm={algo} seed={seed} "
                f"n={list(n)} r={[repr(v) for v in r]}")
    return rows, solution


def _cmd_reliability(args) -> int:
    net = parse_network(_read(args.network))
    if len(args.probs) != net.n_arcs:
        raise NetworkParseError(
            f"expected {net.n_arcs} probabilities, got {len(args.probs)}")
    cvs = bat.enumerate_connected(net, cap=args.cap)
    print(f"{bat.reliability(cvs, args.probs):.15g}")
    return 0


def _cmd_solve(args) -> int:
    problems = _load_problems(args)
    algos = args.algo or ["ssoa3"]
    setting = _resolve_setting(args)
    stage_gens = _parse_stages(args.stages, args.ngen)
    tasks = []
    for idx, (name, inst) in enumerate(problems):
        network_text = _read(args.network[idx])
        instance_text = (_read(args.instance[idx])
                         if idx < len(args.instance) else None)
        for algo in algos:
            for run in range(args.nrun):
                tasks.append((name, network_text, instance_text, algo, setting,
                              args.seed + run, args.nsol, args.ngen,
                              stage_gens, args.cap))
    failures = []
    results = []
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_run_one, task) for task in tasks]
            for task, fut in zip(tasks, futures):
                try:
                    results.append(fut.result())
                except Exception as exc:  # keep the other runs going
                    failures.append((task[0], task[3], task[5], str(exc)))
                    results.append(None)
    else:
        for task in tasks:
            try:
                results.append(_run_one(task))
            except Exception as exc:  # keep the other runs going
                failures.append((task[0], task[3], task[5], str(exc)))
                results.append(None)
    rows = []
    solutions = []
    for outcome in results:
        if outcome is None:
            continue
        run_rows, solution = outcome
        rows.extend(run_rows)
        solutions.append(solution)
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    solutions.sort()
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    if args.out:
        with open(args.out + ".solutions.txt", "w", encoding="utf-8") as fh:
            fh.write("\n".join(solutions) + ("\n" if solutions else ""))
    for name, algo, seed, message in failures:
        print(f"run failed: problem={name} algorithm={algo} seed={seed}: {message}",
              file=sys.stderr)
    return 3 if failures else 0


def _cmd_tune(args) -> int:
    problems = []
    for idx, (name, inst) in enumerate(_load_problems(args)):
        cvs = bat.enumerate_connected(inst.network, cap=args.cap)
        problems.append((name, inst, cvs))
    stage_gens = _parse_stages(args.stages, args.ngen)
    template = swarm.SolverSpec(n_sol=args.nsol, n_gen=args.ngen)
    report = ss3oa.run_tuning(problems, runs_per_problem=args.nrun,
                              template=template, base_seed=args.seed,
                              stage_gens=stage_gens)
    schedule_text = swarm.write_schedule(report.schedule)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(report.to_csv())
        with open(args.out + ".schedule", "w", encoding="utf-8") as fh:
            fh.write(schedule_text)
    else:
        sys.stdout.write(report.to_csv())
        sys.stderr.write(schedule_text)
    return 0


def _cmd_synthesize(args) -> int:
    net = parse_network(_read(args.network))
    text = grrap.format_instance(grrap.synthesize_instance(net))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


_COMMANDS = {
    "reliability": _cmd_reliability,
    "solve": _cmd_solve,
    "tune": _cmd_tune,
    "synthesize": _cmd_synthesize,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (NetworkParseError, bat.EnumerationCapError, FileNotFoundError,
            ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
