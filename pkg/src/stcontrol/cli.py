"""Benchmark command line.

    bench run <config> [--csv out.csv] [--threads N] [--no-timing]
    bench table2 [--csv out.csv] ...
    bench table3 [--csv out.csv] ...
    bench dump <run-id> <outdir> [--eps 1e-3]

Run ids look like case2:space-time:c128:K64 and are printed by the sweep
commands.  dump re-executes that run (the numerics are deterministic) and
writes per-slice control/state/adjoint files plus manifest and history.
"""

from __future__ import annotations

import argparse
import sys

from .bench import (
    BENCH_CONFIG,
    ConfigError,
    RunPlan,
    built_in_plan,
    dump_fields,
    execute_run,
    load_config,
    parse_run_id,
    run_sweep,
)
from .cases import DEFAULT_EPS, get_case


def _add_sweep_options(parser: argparse.ArgumentParser):
    parser.add_argument("--csv", default="bench_results.csv",
                        help="CSV file to append rows to (default: %(default)s)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads; only used together with --no-timing")
    parser.add_argument("--no-timing", action="store_true",
                        help="allow parallel workers; wall times become meaningless")
    parser.add_argument("--history-dir", default=None,
                        help="also write per-run iteration histories to this directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Benchmark runner for the parabolic control solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the runs listed in a config file")
    p_run.add_argument("config", help="path to the sweep config file")
    _add_sweep_options(p_run)

    for table in ("table2", "table3"):
        p_tab = sub.add_parser(table, help=f"run the built-in {table} plan")
        _add_sweep_options(p_tab)

    p_dump = sub.add_parser("dump", help="re-run one case and dump its fields")
    p_dump.add_argument("run_id", help="e.g. case2:space-time:c128:K64")
    p_dump.add_argument("outdir", help="directory for the dump files")
    p_dump.add_argument("--eps", type=float, default=DEFAULT_EPS,
                        help="jump width for the non-smooth targets")
    return parser


def _sweep(plans, args) -> int:
    if args.threads > 1 and not args.no_timing:
        print("timing enabled: running sequentially (use --no-timing for threads)",
              file=sys.stderr)
    rows = run_sweep(
        plans,
        csv_path=args.csv,
        threads=args.threads,
        timing=not args.no_timing,
        history_dir=args.history_dir,
        log=lambda msg: print(msg, flush=True),
    )
    failed = sum(1 for row in rows if row.stop_reason == "error")
    print(f"{len(rows)} runs, {failed} failed; rows appended to {args.csv}")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            plans = load_config(args.config)
            if not plans:
                print(f"warning: {args.config} contains no runs", file=sys.stderr)
                return 0
            return _sweep(plans, args)
        if args.command in ("table2", "table3"):
            return _sweep(built_in_plan(args.command), args)
        if args.command == "dump":
            case_name, method, n_cells, K = parse_run_id(args.run_id)
            case = get_case(case_name, eps=args.eps)
            plan = RunPlan(case=case, n_cells=n_cells, K=K, method=method,
                           config=BENCH_CONFIG)
            row, record, dp = execute_run(plan)
            dump_fields(dp, record, args.outdir,
                        meta={"case": case_name, "method": method, "eps": args.eps})
            print(f"{args.run_id}: J={row.J_final:.6e} its={row.iterations} "
                  f"-> {args.outdir}")
            return 0
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
