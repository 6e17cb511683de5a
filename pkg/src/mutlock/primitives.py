"""Waiting primitives and baseline locks.

Building blocks: a contention-reporting test-and-test-and-set spin lock and
a counting-semaphore sleep queue. Baselines for comparison: an MCS queue
lock and the two classic sleep-on-contention locks (immediate sleep, and
bounded spin-then-sleep).

All spin loops yield between polls: under the GIL a non-yielding poll loop
starves the thread it is waiting for.
"""

import threading
import time

from .state import AtomicU64


class TtasLock:
    """Test-and-test-and-set spin lock.

    ``lock`` reports whether the caller ever observed the lock held before
    acquiring it, which the adaptive lock's oracle uses as its "was anyone
    spinning" signal.
    """

    __slots__ = ("_flag",)

    def __init__(self):
        # threading.Lock.acquire(blocking=False) is the one true atomic
        # test-and-set available to pure Python.
        self._flag = threading.Lock()

    def lock(self) -> bool:
        """Acquire; returns True iff a held state was observed first."""
        if self._flag.acquire(blocking=False):
            return False
        while True:
            while self._flag.locked():
                time.sleep(0)
            if self._flag.acquire(blocking=False):
                return True

    def unlock(self) -> None:
        self._flag.release()

    def locked(self) -> bool:
        return self._flag.locked()

    def __enter__(self):
        self.lock()
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.unlock()


class SleepQueue:
    """Counting-semaphore sleep queue.

    Permits accumulate: a wake-up granted before any thread sleeps is
    consumed by the next sleep call, so wake-ups are never lost to timing.
    """

    __slots__ = ("_sem",)

    def __init__(self):
        self._sem = threading.Semaphore(0)

    def sleep(self) -> None:
        """Block until a permit is available, then consume exactly one."""
        self._sem.acquire()

    def wake_up(self, n: int) -> int:
        """Add ``n`` permits (``n >= 0``); returns the number granted."""
        if n <= 0:
            return 0
        self._sem.release(n)
        return n


class _AtomicRef:
    """Reference cell with atomic exchange and compare-and-set."""

    __slots__ = ("_value", "_mutex")

    def __init__(self, initial=None):
        self._value = initial
        self._mutex = threading.Lock()

    def load(self):
        with self._mutex:
            return self._value

    def exchange(self, new):
        with self._mutex:
            old = self._value
            self._value = new
            return old

    def compare_and_set(self, expected, new) -> bool:
        with self._mutex:
            if self._value is expected:
                self._value = new
                return True
            return False


class McsNode:
    """Queue node for :class:`McsLock`.

    Caller-owned; must not be reused while enqueued. Safe to reuse once the
    matching ``unlock`` has returned.
    """

    __slots__ = ("next", "locked")

    def __init__(self):
        self.next = None
        self.locked = False


class McsLock:
    """MCS queue lock: FIFO handoff, each waiter spins on its own node."""

    __slots__ = ("_tail",)

    def __init__(self):
        self._tail = _AtomicRef(None)

    def lock(self, node: McsNode) -> None:
        node.next = None
        node.locked = True
        pred = self._tail.exchange(node)
        if pred is None:
            return
        pred.next = node
        while node.locked:
            time.sleep(0)

    def unlock(self, node: McsNode) -> None:
        if node.next is None:
            if self._tail.compare_and_set(node, None):
                return
            # A successor swapped the tail but has not linked itself yet.
            while node.next is None:
                time.sleep(0)
        node.next.locked = False


class SleepLock:
    """Sleep-on-contention lock: one failed test-and-set leads to sleep.

    Waiters are parked on a counting-semaphore queue; a release grants one
    permit whenever waiters may exist. Extra permits only cause a parked
    thread to recheck the flag, never a mutual-exclusion violation.
    """

    __slots__ = ("_flag", "_queue", "_waiters", "_spin_budget")

    def __init__(self):
        self._flag = threading.Lock()
        self._queue = SleepQueue()
        self._waiters = AtomicU64(0)
        self._spin_budget = 0

    def acquire(self) -> None:
        if self._flag.acquire(blocking=False):
            return
        for _ in range(self._spin_budget):
            if not self._flag.locked() and self._flag.acquire(blocking=False):
                return
            time.sleep(0)
        while True:
            self._waiters.fetch_add(1)
            # Recheck before parking: the holder may have released between
            # our failed test-and-set and the waiter-count increment.
            if self._flag.acquire(blocking=False):
                self._waiters.fetch_add(-1)
                return
            self._queue.sleep()
            self._waiters.fetch_add(-1)
            if self._flag.acquire(blocking=False):
                return

    def release(self) -> None:
        self._flag.release()
        if self._waiters.load() > 0:
            self._queue.wake_up(1)

    def __enter__(self):
        self.acquire()
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.release()


class AdaptiveSleepLock(SleepLock):
    """Spin-then-sleep lock: at most ``spin_budget`` polls before parking.

    With ``spin_budget=0`` it degenerates to :class:`SleepLock`.
    """

    __slots__ = ()

    def __init__(self, spin_budget: int = 100):
        if spin_budget < 0:
            raise ValueError("spin_budget must be >= 0")
        super().__init__()
        self._spin_budget = spin_budget
