"""Hybrid spin/sleep locking with an adaptive spinning window.

The package provides the adaptive lock itself, the baseline locks it is
compared against, a deterministic slot-based model of the waiting policies,
a contention benchmark harness, and result aggregation.
"""

from .bench import (
    BenchConfig,
    BenchResult,
    ThreadStats,
    busy_work,
    run_bench,
    run_series,
    workload_sampler,
)
from .lock import (
    MutableLock,
    ReleaseDecision,
    clamp_delta,
    plan_release,
    wuc_adjust,
)
from .model import (
    SimConfig,
    SimTrace,
    WaitArray,
    check_c1_c2,
    simulate,
    window_transition,
)
from .primitives import (
    AdaptiveSleepLock,
    McsLock,
    McsNode,
    SleepLock,
    SleepQueue,
    TtasLock,
)
from .report import AggregateRow, aggregate, pt_exp, ratio_to_optimum
from .state import pack, unpack

__version__ = "0.1.0"

__all__ = [
    "AdaptiveSleepLock",
    "AggregateRow",
    "BenchConfig",
    "BenchResult",
    "McsLock",
    "McsNode",
    "MutableLock",
    "ReleaseDecision",
    "SimConfig",
    "SimTrace",
    "SleepLock",
    "SleepQueue",
    "ThreadStats",
    "TtasLock",
    "WaitArray",
    "aggregate",
    "busy_work",
    "check_c1_c2",
    "clamp_delta",
    "pack",
    "plan_release",
    "pt_exp",
    "ratio_to_optimum",
    "run_bench",
    "run_series",
    "simulate",
    "unpack",
    "window_transition",
    "workload_sampler",
    "wuc_adjust",
]
