"""The adaptive spinning-window lock.

Arriving threads join a bounded *spinning window*; once the window is full
they park on a counting-semaphore sleep queue. Every release hands the
critical section to a spinner (via the inner spin lock) and wakes at most
one sleeper into the window, so a runnable waiter already exists by the
time the next release happens -- the wake-up latency is masked by the
spinner's critical section.

The window size adapts: an embedded oracle doubles it when a thread wakes
up to find nobody spinning (the window was too small to mask the wake-up)
and decays it by one after ``k`` quiet critical sections. Window-size
changes can desynchronize thread states -- growing the window may trap
sleepers inside it, shrinking it leaves surplus spinners -- so each change
computes a signed wake-up correction (``wuc``) that later releases apply:
positive values wake extra sleepers, negative values suppress wakes.

All counter reads/updates on the shared ``(sws, thc)`` word go through
single fetch-and-add operations; ``wuc`` and the oracle counter are only
touched while holding the inner spin lock.
"""

import os
from dataclasses import dataclass

from .primitives import SleepQueue, TtasLock
from .state import AtomicU64, pack, unpack

#: Default decay period of the window-size oracle.
DEFAULT_K = 10


def clamp_delta(sws: int, delta: int, max_sws: int) -> int:
    """Clamp a window-size variation so ``sws + delta`` lands in [1, max_sws].

    In-range variations pass through unchanged.
    """
    return min(max(delta, 1 - sws), max_sws - sws)


def wuc_adjust(delta: int, thc: int, sws_before: int, sws_after: int) -> int:
    """Signed wake-up correction owed after resizing the window.

    ``thc`` and ``sws_before`` are the field values returned by the
    fetch-and-add that applied ``delta``; ``sws_after = sws_before + delta``.
    Growing the window (positive ``delta``) requires waking the sleepers it
    swallowed; shrinking it (negative) requires suppressing wakes while the
    surplus spinners drain. Either correction is bounded by ``|delta|``.
    """
    if delta == 0:
        return 0
    sign = 1 if delta > 0 else -1
    if sign < 0 and thc > sws_after:
        base = thc - sws_after
    elif sign > 0 and thc > sws_before:
        base = thc - sws_before
    else:
        base = 0
    return sign * min(abs(delta), base)


@dataclass(frozen=True)
class ReleaseDecision:
    """Wake plan computed at the start of a release.

    ``r_wuc`` is the number of sleepers this release intends to wake;
    ``-1`` means one wake is suppressed because a window reduction left a
    surplus spinner to carry progress. ``wuc_after`` is the correction
    balance left for the next release.
    """

    r_wuc: int
    wuc_after: int


def plan_release(wuc: int) -> ReleaseDecision:
    """Split the pending wake-up correction into this release's plan."""
    if wuc >= 0:
        return ReleaseDecision(r_wuc=wuc, wuc_after=0)
    return ReleaseDecision(r_wuc=-1, wuc_after=wuc + 1)


class MutableLock:
    """Hybrid spin/sleep lock with a self-sizing spinning window.

    Parameters
    ----------
    max_sws:
        Ceiling on the spinning-window size. Defaults to the number of
        logical cores.
    k:
        Oracle decay period: after ``k`` critical sections without a late
        wake-up, the window shrinks by one.

    The lock is not reentrant, and behavior is undefined beyond 2**31 - 1
    simultaneous contenders. Ownership is not tracked: releasing a lock the
    caller does not hold is a usage error.
    """

    def __init__(self, max_sws: int | None = None, k: int = DEFAULT_K):
        if max_sws is None:
            max_sws = os.cpu_count() or 1
        if max_sws < 1:
            raise ValueError("max_sws must be >= 1")
        if k < 1:
            raise ValueError("k must be >= 1")
        self.max_sws = max_sws
        self.k = k
        self._slock = TtasLock()
        self._lstate = AtomicU64(pack(1, 0))
        self._sleepq = SleepQueue()
        self._wuc = 0  # pending wake-up correction; guarded by _slock
        self._cnt = 0  # critical sections since last window change; guarded by _slock

    def acquire(self) -> None:
        """Block until the calling thread holds the lock exclusively."""
        old = self._lstate.fetch_add(1)  # arrival linearization point
        sws_seen, thc_pre = unpack(old)
        slept = False
        if thc_pre >= sws_seen:
            # No room in the spinning window: park until a release (or a
            # window growth) grants a permit.
            slept = True
            self._sleepq.sleep()
        spun = self._slock.lock()
        self._adapt(spun, slept, sws_seen)

    def release(self) -> None:
        """Release the lock; wakes sleepers per the pending correction."""
        decision = plan_release(self._wuc)
        self._wuc = decision.wuc_after
        old = self._lstate.fetch_add(-1)  # departure linearization point
        self._slock.unlock()
        if decision.r_wuc < 0:
            # A window reduction left more than sws threads spinning; one
            # of them will take over, so skip this wake.
            return
        sws, thc_pre = unpack(old)
        wakes = decision.r_wuc
        if thc_pre > sws:
            wakes += 1
        if wakes:
            self._sleepq.wake_up(wakes)

    def eval_sws(self, spun: bool, slept: bool) -> int:
        """Window-size oracle; returns the signed variation to apply.

        A thread that slept and then found the inner lock free was woken
        too late (no spinner masked its wake-up): double the window. After
        ``k`` critical sections without that signal, shrink it by one.
        Concurrent callers must hold the inner lock.
        """
        self._cnt += 1
        if slept and not spun:
            self._cnt = 0
            current_sws, _ = unpack(self._lstate.load())
            return current_sws
        if self._cnt >= self.k:
            self._cnt = 0
            return -1
        return 0

    def _adapt(self, spun: bool, slept: bool, sws_seen: int) -> None:
        """Run the oracle and apply its decision. Caller holds ``_slock``."""
        delta = self.eval_sws(spun, slept)
        current_sws, _ = unpack(self._lstate.load())
        if sws_seen != current_sws:
            # The window changed while we were waiting; our observation is
            # stale, so drop the decision rather than apply it blindly.
            return
        delta = clamp_delta(sws_seen, delta, self.max_sws)
        if delta == 0:
            return
        old = self._lstate.fetch_add(delta << 32)
        sws_before, thc = unpack(old)
        self._wuc += wuc_adjust(delta, thc, sws_before, sws_before + delta)

    def snapshot(self) -> tuple[int, int]:
        """Racy ``(sws, thc)`` snapshot for instrumentation only."""
        return unpack(self._lstate.load())

    def __enter__(self):
        self.acquire()
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.release()

    def __repr__(self):
        sws, thc = self.snapshot()
        return f"<MutableLock sws={sws} thc={thc} max_sws={self.max_sws} k={self.k}>"
