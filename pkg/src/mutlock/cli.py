"""Command-line interface: ``sim``, ``bench``, and ``report`` subcommands."""

import argparse
import sys

from . import bench, model, report
from .lock import DEFAULT_K

_POLICY_BY_FLAG = {
    "spin": model.POLICY_SPIN,
    "sleep": model.POLICY_SLEEP,
    "hybrid": model.POLICY_HYBRID,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mutlock",
        description="Spinning-window lock toolkit: slot simulator, "
        "contention benchmark, and result reporting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("sim", help="run the deterministic slot model")
    sim.add_argument("--threads", type=int, required=True)
    sim.add_argument("--policy", choices=sorted(_POLICY_BY_FLAG), required=True)
    sim.add_argument("--sws", type=int, default=None,
                     help="spinning-window size (hybrid only)")
    sim.add_argument("--cs-slots", type=int, default=1)
    sim.add_argument("--wake-slots", type=int, default=1)
    sim.add_argument("--trace", nargs="?", const="text", choices=["text", "csv"],
                     help="emit the per-slot activity table")

    bn = sub.add_parser("bench", help="run the lock-contention benchmark")
    bn.add_argument("--lock", choices=bench.LOCK_KINDS, required=True)
    bn.add_argument("--threads", type=int, required=True)
    bn.add_argument("--csl", type=float, default=0.0,
                    help="critical-section lower bound (us)")
    bn.add_argument("--csu", type=float, default=3.7,
                    help="critical-section upper bound (us, exclusive)")
    bn.add_argument("--ncsl", type=float, default=0.0,
                    help="non-critical-section lower bound (us)")
    bn.add_argument("--ncsu", type=float, default=3.7,
                    help="non-critical-section upper bound (us, exclusive)")
    bn.add_argument("--duration", type=float, default=5.0,
                    help="measured seconds per run")
    bn.add_argument("--runs", type=int, default=1)
    bn.add_argument("--seed", type=int, default=1)
    bn.add_argument("--pin", action="store_true",
                    help="pin workers round-robin to cores")
    bn.add_argument("--K", type=int, default=DEFAULT_K, dest="k",
                    help="oracle decay period (mutlock)")
    bn.add_argument("--max-sws", type=int, default=None,
                    help="spinning-window ceiling (mutlock; default: cores)")
    bn.add_argument("--csv", metavar="PATH", default=None,
                    help="append result rows to a CSV file")

    rp = sub.add_parser("report", help="aggregate benchmark CSVs")
    rp.add_argument("--input", nargs="+", required=True, metavar="CSV")
    rp.add_argument("--format", choices=["csv", "md"], default="md")
    rp.add_argument("--metric", choices=["throughput", "cpu", "ratio", "ptexp"],
                    default="throughput")

    return parser


def _cmd_sim(args) -> int:
    config = model.SimConfig(
        threads=args.threads,
        policy=_POLICY_BY_FLAG[args.policy],
        sws=args.sws,
        cs_slots=args.cs_slots,
        wake_slots=args.wake_slots,
    )
    trace = model.simulate(config)
    print(f"policy={config.policy} threads={config.threads}"
          + (f" sws={config.sws}" if config.sws is not None else "")
          + f" cs_slots={config.cs_slots} wake_slots={config.wake_slots}")
    print(f"completion_slot={trace.completion_slot} "
          f"wasted_spin_slots={trace.wasted_spin_slots} "
          f"wasted_wake_slots={trace.wasted_wake_slots}")
    if args.trace:
        header = ["slot"] + [f"t{i}" for i in range(config.threads)]
        rows = [[slot] + list(acts) for slot, acts in enumerate(trace.activities)]
        fmt = "csv" if args.trace == "csv" else "md"
        print(report.render_table(header, rows, fmt), end="")
    return 0


def _cmd_bench(args) -> int:
    config = bench.BenchConfig(
        lock_kind=args.lock,
        threads=args.threads,
        csl=args.csl,
        csu=args.csu,
        ncsl=args.ncsl,
        ncsu=args.ncsu,
        duration=args.duration,
        runs=args.runs,
        seed=args.seed,
        k=args.k,
        max_sws=args.max_sws,
        pin=args.pin,
    )
    rows = []
    for run, seed, result in bench.run_series(config):
        rows.append(bench.result_row(config, run, seed, result))
        print(f"lock={config.lock_kind} threads={config.threads} run={run} "
              f"wall={result.wall:.3f}s cs={result.cs_count} "
              f"throughput={result.throughput:.1f}/s "
              f"sync_cpu={result.sync_cpu:.3f}s")
    if args.csv:
        bench.append_csv(args.csv, rows)
        print(f"appended {len(rows)} row(s) to {args.csv}")
    return 0


def _cmd_report(args) -> int:
    rows = report.read_rows(args.input)
    agg = report.aggregate(rows)
    if not agg:
        print("no benchmark rows found in input", file=sys.stderr)
        return 1
    if args.metric == "throughput":
        header = ["lock", "threads", "mean_throughput_cs_per_s", "runs"]
        data = [
            [a.lock, a.threads, f"{a.mean_throughput:.3f}", a.run_count] for a in agg
        ]
    elif args.metric == "cpu":
        header = ["lock", "threads", "mean_sync_cpu_s", "runs"]
        data = [
            [a.lock, a.threads, f"{a.mean_sync_cpu:.6f}", a.run_count] for a in agg
        ]
    elif args.metric == "ratio":
        header = ["lock", "ratio_to_optimum"]
        data = [
            [lock, f"{value:.4f}"]
            for lock, value in sorted(report.ratio_to_optimum(agg).items())
        ]
    else:
        header = ["threads", "pt_exp_throughput_cs_per_s"]
        data = [
            [threads, f"{value:.3f}"]
            for threads, value in sorted(report.pt_exp(agg).items())
        ]
    print(report.render_table(header, data, args.format), end="")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sim":
            return _cmd_sim(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_report(args)
    except (ValueError, OSError, bench.BenchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
