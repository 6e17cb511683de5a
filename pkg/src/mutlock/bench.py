"""Lock-contention microbenchmark.

Workers repeatedly acquire the lock under test, burn a uniformly sampled
critical-section length, release, and burn a non-critical-section length,
until the measurement window closes. Reported metrics are throughput
(critical sections per second) and sync CPU time: per-thread CPU time spent
inside acquire/release only, so parked threads accrue nothing and the
critical-section body is not charged.

A 100 ms warmup precedes every measurement window. An occupancy counter
validates mutual exclusion throughout; a violation aborts the run.
"""

import csv
import io
import os
import random
import threading
import time
from dataclasses import dataclass, replace
from typing import Iterator

from .lock import DEFAULT_K, MutableLock
from .primitives import AdaptiveSleepLock, McsLock, McsNode, SleepLock, TtasLock

LOCK_KINDS = ("mutlock", "ttas", "mcs", "sleep", "adaptive_sleep")

WARMUP_S = 0.1
_JOIN_GRACE_S = 30.0

CSV_COLUMNS = [
    "lock",
    "threads",
    "csl_us",
    "csu_us",
    "ncsl_us",
    "ncsu_us",
    "run",
    "seed",
    "wall_s",
    "cs_count",
    "throughput_cs_per_s",
    "sync_cpu_s",
]

_MASK64 = 0xFFFF_FFFF_FFFF_FFFF


class BenchError(RuntimeError):
    """Benchmark run failed (worker error, spawn failure, or stuck join)."""


class MutualExclusionError(BenchError):
    """The occupancy check observed more than one thread in the critical section."""


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark workload; lengths are microseconds, half-open [low, high)."""

    lock_kind: str
    threads: int
    csl: float = 0.0
    csu: float = 0.0
    ncsl: float = 0.0
    ncsu: float = 0.0
    duration: float = 1.0
    runs: int = 1
    seed: int = 1
    k: int = DEFAULT_K
    max_sws: int | None = None
    pin: bool = False

    def __post_init__(self):
        if self.lock_kind not in LOCK_KINDS:
            raise ValueError(f"lock_kind must be one of {LOCK_KINDS}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.csl > self.csu:
            raise ValueError("csl must be <= csu")
        if self.ncsl > self.ncsu:
            raise ValueError("ncsl must be <= ncsu")
        if min(self.csl, self.ncsl) < 0:
            raise ValueError("section lengths must be >= 0")
        if self.duration <= 0:
            raise ValueError("duration must be > 0")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass(frozen=True)
class ThreadStats:
    cs_count: int
    sync_cpu: float


@dataclass(frozen=True)
class BenchResult:
    cs_count: int
    throughput: float
    sync_cpu: float
    wall: float
    per_thread: tuple[ThreadStats, ...]


def mix64(seed: int, index: int = 0) -> int:
    """SplitMix64 finalizer; decorrelates derived seeds."""
    z = (seed ^ ((index + 1) * 0x9E3779B97F4A7C15)) & _MASK64
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def workload_sampler(seed: int, low: float, high: float) -> Iterator[float]:
    """Deterministic stream of microsecond lengths uniform on [low, high)."""
    if low > high:
        raise ValueError("low must be <= high")
    rng = random.Random(seed)
    span = high - low
    while True:
        yield low + span * rng.random()


def worker_streams(config: BenchConfig, thread_index: int):
    """The (cs, ncs) length streams a given worker thread draws from."""
    tseed = mix64(config.seed, thread_index)
    return (
        workload_sampler(mix64(tseed, 1), config.csl, config.csu),
        workload_sampler(mix64(tseed, 2), config.ncsl, config.ncsu),
    )


_loops_per_us: float | None = None


def _burn(n: int) -> None:
    i = 0
    while i < n:
        i += 1


def calibrate_busy_work() -> float:
    """Measure the busy-loop rate (iterations per microsecond) once."""
    global _loops_per_us
    trials = 100_000
    best = min(
        _timed_burn(trials) for _ in range(5)
    )
    _loops_per_us = trials / (best * 1e6)
    return _loops_per_us


def _timed_burn(n: int) -> float:
    t0 = time.perf_counter()
    _burn(n)
    return time.perf_counter() - t0


def busy_work(duration_us: float) -> None:
    """Consume roughly ``duration_us`` microseconds of CPU on this thread."""
    if duration_us <= 0:
        return
    rate = _loops_per_us
    if rate is None:
        rate = calibrate_busy_work()
    _burn(round(duration_us * rate))


class _OccupancyCheck:
    """Counts threads inside the critical section; >1 means a violation."""

    __slots__ = ("level", "violations")

    def __init__(self):
        self.level = 0
        self.violations = 0

    def enter(self):
        level = self.level + 1
        self.level = level
        if level > 1:
            self.violations += 1

    def exit(self):
        self.level -= 1


def make_lock(config: BenchConfig):
    kind = config.lock_kind
    if kind == "mutlock":
        return MutableLock(max_sws=config.max_sws, k=config.k)
    if kind == "ttas":
        return TtasLock()
    if kind == "mcs":
        return McsLock()
    if kind == "sleep":
        return SleepLock()
    return AdaptiveSleepLock()


def _lock_ops(lock, kind: str):
    """Per-thread acquire/release callables for a lock instance."""
    if kind == "mcs":
        node = McsNode()
        return (lambda: lock.lock(node)), (lambda: lock.unlock(node))
    if kind == "ttas":
        return lock.lock, lock.unlock
    return lock.acquire, lock.release


def _worker(index, lock, config, barrier, bounds, occupancy, results, errors):
    try:
        enter, leave = _lock_ops(lock, config.lock_kind)
        cs_stream, ncs_stream = worker_streams(config, index)
        if config.pin:
            cores = os.cpu_count() or 1
            os.sched_setaffinity(0, {index % cores})
        perf_counter = time.perf_counter
        thread_time = time.thread_time
        barrier.wait()
        warm_end, end = bounds
        cs_count = 0
        sync_cpu = 0.0
        now = perf_counter()
        while now < end:
            measured = now >= warm_end
            t0 = thread_time()
            enter()
            t1 = thread_time()
            occupancy.enter()
            if measured:
                cs_count += 1  # counted inside the held section
            busy_work(next(cs_stream))
            occupancy.exit()
            t2 = thread_time()
            leave()
            t3 = thread_time()
            if measured:
                sync_cpu += (t1 - t0) + (t3 - t2)
            busy_work(next(ncs_stream))
            now = perf_counter()
        results[index] = (cs_count, sync_cpu, perf_counter())
    except BaseException as exc:  # surface worker failures to the harness
        errors.append((index, exc))
        try:
            barrier.abort()
        except Exception:
            pass


def run_bench(config: BenchConfig) -> BenchResult:
    """Execute one measured run of ``config`` and aggregate the results."""
    if _loops_per_us is None:
        calibrate_busy_work()  # calibrate before workers race for CPU
    lock = make_lock(config)
    barrier = threading.Barrier(config.threads + 1)
    bounds = [0.0, 0.0]
    occupancy = _OccupancyCheck()
    results: list = [None] * config.threads
    errors: list = []
    workers = []
    try:
        for i in range(config.threads):
            t = threading.Thread(
                target=_worker,
                args=(i, lock, config, barrier, bounds, occupancy, results, errors),
                name=f"bench-{config.lock_kind}-{i}",
                daemon=True,
            )
            t.start()
            workers.append(t)
    except Exception as exc:
        barrier.abort()
        raise BenchError(f"failed to spawn worker threads: {exc}") from exc

    warm_end = time.perf_counter() + WARMUP_S
    bounds[0] = warm_end
    bounds[1] = warm_end + config.duration
    try:
        barrier.wait()
    except threading.BrokenBarrierError:
        detail = f": {errors[0][1]!r}" if errors else ""
        raise BenchError(f"a worker failed before the run started{detail}")

    deadline = WARMUP_S + config.duration + _JOIN_GRACE_S
    for t in workers:
        t.join(timeout=deadline)
        if t.is_alive():
            raise BenchError(f"worker {t.name} failed to finish (stuck acquire?)")
    if errors:
        index, exc = errors[0]
        raise BenchError(f"worker {index} failed: {exc!r}") from exc
    if occupancy.violations:
        raise MutualExclusionError(
            f"occupancy counter exceeded 1 ({occupancy.violations} violations)"
        )

    per_thread = tuple(ThreadStats(c, s) for c, s, _ in results)
    cs_count = sum(t.cs_count for t in per_thread)
    sync_cpu = sum(t.sync_cpu for t in per_thread)
    wall = max(finish for _, _, finish in results) - bounds[0]
    throughput = cs_count / wall
    return BenchResult(
        cs_count=cs_count,
        throughput=throughput,
        sync_cpu=sync_cpu,
        wall=wall,
        per_thread=per_thread,
    )


def run_series(config: BenchConfig) -> list[tuple[int, int, BenchResult]]:
    """Run ``config.runs`` repetitions; yields (run, effective seed, result)."""
    out = []
    for run in range(config.runs):
        run_seed = mix64(config.seed, run)
        result = run_bench(replace(config, seed=run_seed, runs=1))
        out.append((run, run_seed, result))
    return out


def result_row(config: BenchConfig, run: int, seed: int, result: BenchResult) -> dict:
    return {
        "lock": config.lock_kind,
        "threads": config.threads,
        "csl_us": config.csl,
        "csu_us": config.csu,
        "ncsl_us": config.ncsl,
        "ncsu_us": config.ncsu,
        "run": run,
        "seed": seed,
        "wall_s": f"{result.wall:.6f}",
        "cs_count": result.cs_count,
        "throughput_cs_per_s": f"{result.throughput:.3f}",
        "sync_cpu_s": f"{result.sync_cpu:.6f}",
    }


def append_csv(path: str, rows: list[dict]) -> None:
    """Append result rows to ``path``, writing the header on a fresh file."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        if fresh:
            writer.writeheader()
        writer.writerows(rows)


def rows_to_csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
