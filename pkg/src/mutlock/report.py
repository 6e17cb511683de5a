"""Aggregation of benchmark CSVs into comparison metrics.

Produces per-(lock, threads) averages, the per-lock ratio to the optimum
(the best mean throughput at each thread count), and the expected
throughput of a uniformly random static choice between the pure spin lock
and the default sleep lock.
"""

import csv
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Mapping, Sequence


class ReportError(ValueError):
    """Malformed or insufficient benchmark data."""


@dataclass(frozen=True)
class AggregateRow:
    lock: str
    threads: int
    mean_throughput: float
    mean_sync_cpu: float
    run_count: int


_REQUIRED = ("lock", "threads", "throughput_cs_per_s", "sync_cpu_s")


def read_rows(paths: Sequence[str]) -> list[dict]:
    """Read benchmark CSV files; malformed rows are rejected with file:line."""
    rows = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                line = reader.line_num
                for key in _REQUIRED:
                    if row.get(key) in (None, ""):
                        raise ReportError(f"{path}:{line}: missing column '{key}'")
                try:
                    row["threads"] = int(row["threads"])
                    row["throughput_cs_per_s"] = float(row["throughput_cs_per_s"])
                    row["sync_cpu_s"] = float(row["sync_cpu_s"])
                except ValueError as exc:
                    raise ReportError(f"{path}:{line}: {exc}") from exc
                rows.append(row)
    return rows


def aggregate(rows: Iterable[Mapping]) -> list[AggregateRow]:
    """Group rows by (lock, threads) and average the measured metrics."""
    groups: dict[tuple[str, int], list[Mapping]] = {}
    for row in rows:
        groups.setdefault((str(row["lock"]), int(row["threads"])), []).append(row)
    out = []
    for (lock, threads), members in sorted(groups.items()):
        out.append(
            AggregateRow(
                lock=lock,
                threads=threads,
                mean_throughput=fmean(
                    float(m["throughput_cs_per_s"]) for m in members
                ),
                mean_sync_cpu=fmean(float(m["sync_cpu_s"]) for m in members),
                run_count=len(members),
            )
        )
    return out


def _by_count(rows: Sequence[AggregateRow]) -> dict[int, dict[str, float]]:
    table: dict[int, dict[str, float]] = {}
    for row in rows:
        table.setdefault(row.threads, {})[row.lock] = row.mean_throughput
    return table


def ratio_to_optimum(rows: Sequence[AggregateRow]) -> dict[str, float]:
    """Mean, over thread counts, of each lock's throughput over the best.

    The optimum at a thread count is the highest mean throughput any lock
    achieved there; a lock that is best everywhere scores exactly 1.0.
    Every lock must cover every thread count present in the data.
    """
    if not rows:
        raise ReportError("no aggregate rows")
    table = _by_count(rows)
    counts = sorted(table)
    locks = sorted({row.lock for row in rows})
    missing = {
        lock: [t for t in counts if lock not in table[t]]
        for lock in locks
        if any(lock not in table[t] for t in counts)
    }
    if missing:
        detail = "; ".join(f"{lock} missing threads {m}" for lock, m in missing.items())
        raise ReportError(f"incomplete thread-count coverage: {detail}")
    optimum = {t: max(table[t].values()) for t in counts}
    return {
        lock: fmean(table[t][lock] / optimum[t] for t in counts) for lock in locks
    }


def pt_exp(rows: Sequence[AggregateRow]) -> dict[int, float]:
    """Expected throughput of a coin-flip static choice (ttas vs sleep).

    Per thread count, the arithmetic mean of the pure spin lock's and the
    default sleep lock's mean throughput.
    """
    if not rows:
        raise ReportError("no aggregate rows")
    table = _by_count(rows)
    out = {}
    for threads in sorted(table):
        locks = table[threads]
        for needed in ("ttas", "sleep"):
            if needed not in locks:
                raise ReportError(
                    f"threads={threads}: missing '{needed}' row for pt_exp"
                )
        out[threads] = (locks["ttas"] + locks["sleep"]) / 2
    return out


def render_table(header: Sequence[str], rows: Sequence[Sequence], fmt: str) -> str:
    """Render a table as CSV or as an aligned Markdown table."""
    cells = [[str(c) for c in row] for row in rows]
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(row) for row in cells]
        return "\n".join(lines) + "\n"
    if fmt == "md":
        widths = [
            max(len(header[i]), *(len(r[i]) for r in cells)) if cells else len(header[i])
            for i in range(len(header))
        ]
        def line(row):
            return "| " + " | ".join(c.ljust(w) for c, w in zip(row, widths)) + " |"
        out = [line(header), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
        out += [line(r) for r in cells]
        return "\n".join(out) + "\n"
    raise ValueError("fmt must be 'csv' or 'md'")
