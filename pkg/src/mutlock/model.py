"""Deterministic slot-based model of spin, sleep, and windowed waiting.

Time is divided into equal slots. Every thread arrives at slot 0 and needs
exactly one critical section. Three waiting policies are modeled:

* ``spin_only``   -- every waiter busy-waits; handoff is immediate.
* ``sleep_only``  -- every waiter sleeps; each release wakes one sleeper,
  which pays ``wake_slots`` of latency before its critical section.
* ``hybrid``      -- at most ``sws`` waiters occupy the spinning window;
  the rest sleep. A release promotes a spinner immediately and wakes one
  sleeper into the freed window slot, so the wake-up latency overlaps the
  promoted spinner's critical section.

Random selections are determinized to lowest-index choice so traces are
reproducible; the selection policy changes fairness, not the counted
metrics. Waste counts every thread-slot spent spinning or waking; sleeping
and finished threads cost nothing.
"""

from dataclasses import dataclass

ACT_CS = "cs"
ACT_SPIN = "spin"
ACT_WAKE = "wake"
ACT_IDLE = "idle"

POLICY_SPIN = "spin_only"
POLICY_SLEEP = "sleep_only"
POLICY_HYBRID = "hybrid"
POLICIES = (POLICY_SPIN, POLICY_SLEEP, POLICY_HYBRID)

_SPIN = "S"
_WAKE = "W"
_SLEEP = "Z"


@dataclass(frozen=True)
class SimConfig:
    """Workload description for :func:`simulate`."""

    threads: int
    policy: str
    sws: int | None = None
    cs_slots: int = 1
    wake_slots: int = 1

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        if self.cs_slots < 1:
            raise ValueError("cs_slots must be >= 1")
        if self.wake_slots < 0:
            raise ValueError("wake_slots must be >= 0")
        if self.policy == POLICY_HYBRID:
            if self.sws is None or self.sws < 1:
                raise ValueError("hybrid policy requires sws >= 1")
        elif self.sws is not None:
            raise ValueError(f"sws only applies to the {POLICY_HYBRID} policy")


@dataclass(frozen=True)
class SimTrace:
    """Per-slot activity grid plus the derived waste/latency metrics.

    ``activities[slot][thread]`` is one of ``cs``, ``spin``, ``wake``,
    ``idle``; sleeping and finished threads both show as ``idle``.
    """

    activities: tuple[tuple[str, ...], ...]
    completion_slot: int
    wasted_spin_slots: int
    wasted_wake_slots: int


class _Waiter:
    __slots__ = ("tid", "state", "remaining")

    def __init__(self, tid, state, remaining=0):
        self.tid = tid
        self.state = state
        self.remaining = remaining


def simulate(config: SimConfig) -> SimTrace:
    """Run the slot model; a pure function of ``config``."""
    n = config.threads
    cs = config.cs_slots
    wake = config.wake_slots
    if config.policy == POLICY_SPIN:
        cap = n  # window can hold every waiter
    elif config.policy == POLICY_SLEEP:
        cap = 0
    else:
        cap = config.sws

    holder_tid = 0
    holder_left = cs
    # Wait-array positions 0.. map to array indexes 1.. (index 0 = holder);
    # a waiter is inside the window iff its position is < cap.
    warr = [
        _Waiter(tid, _SPIN if tid - 1 < cap else _SLEEP) for tid in range(1, n)
    ]

    rows = []
    spin_waste = 0
    wake_waste = 0
    slot = 0

    def promote():
        nonlocal holder_tid, holder_left
        for pos, w in enumerate(warr):
            if w.state == _SPIN:
                warr.pop(pos)
                holder_tid = w.tid
                holder_left = cs
                return pos
        return None

    while holder_tid is not None or warr:
        acts = [ACT_IDLE] * n
        if holder_tid is not None:
            acts[holder_tid] = ACT_CS
        for w in warr:
            if w.state == _SPIN:
                acts[w.tid] = ACT_SPIN
                spin_waste += 1
            elif w.state == _WAKE:
                acts[w.tid] = ACT_WAKE
                wake_waste += 1
        rows.append(tuple(acts))

        # Advance through the slot.
        if holder_tid is not None:
            holder_left -= 1
        for w in warr:
            if w.state == _WAKE:
                w.remaining -= 1
        slot += 1

        # Boundary: wake-ups complete before the release is processed, so a
        # thread whose wake ends exactly at the release is promotable.
        for w in warr:
            if w.state == _WAKE and w.remaining <= 0:
                w.state = _SPIN
        released = False
        if holder_tid is not None and holder_left == 0:
            holder_tid = None
            released = True
        if released and cap == 0 and warr and warr[0].state == _SLEEP:
            # Pure sleeping: the release wakes the next sleeper in place.
            first = warr[0]
            first.state = _WAKE if wake > 0 else _SPIN
            first.remaining = wake
        promoted_pos = promote() if holder_tid is None else None
        if released and cap > 0:
            # One sleeper may enter the window per release. After the
            # promotion pop the first sleeper can sit inside the window
            # region already (positions shifted down); wake it wherever the
            # freed slot is.
            qpos = next(
                (i for i, w in enumerate(warr) if w.state == _SLEEP), None
            )
            if qpos is not None and qpos < cap:
                sleeper = warr.pop(qpos)
                sleeper.state = _WAKE if wake > 0 else _SPIN
                sleeper.remaining = wake
                dest = promoted_pos if (
                    promoted_pos is not None and promoted_pos <= qpos
                ) else qpos
                warr.insert(dest, sleeper)
        if holder_tid is None:
            # A zero-latency wake may have produced a runnable waiter at
            # this same boundary; let it take the free lock without a gap.
            promote()

    return SimTrace(
        activities=tuple(rows),
        completion_slot=slot,
        wasted_spin_slots=spin_waste,
        wasted_wake_slots=wake_waste,
    )


@dataclass(frozen=True)
class WaitArray:
    """Ordered occupancy of the lock's logical wait array.

    ``occupants[0]`` holds the lock; a waiter's behavior is a function of
    its index: indexes 1..sws spin, larger indexes sleep.
    """

    occupants: tuple = ()


def thread_state(index: int, sws: int) -> str:
    """State implied by an occupant's array index under window size ``sws``."""
    if index == 0:
        return "holder"
    if index <= sws:
        return "spin"
    return "sleep"


def window_transition(array: WaitArray, event: str, sws: int, tid=None) -> WaitArray:
    """Apply one arrival or release to the wait array.

    Arrivals append at the first free index. A release removes the holder,
    promotes the lowest-index spinner, moves the lowest-index sleeper into
    the freed window slot, and shifts the occupants past it down by one.
    """
    if sws < 1:
        raise ValueError("sws must be >= 1")
    occ = list(array.occupants)
    if event == "arrival":
        occ.append(tid if tid is not None else len(occ))
        return WaitArray(tuple(occ))
    if event == "release":
        if not occ:
            raise ValueError("release on an empty wait array")
        if len(occ) - 1 <= sws:
            # Nobody is sleeping; everyone simply moves up one slot.
            return WaitArray(tuple(occ[1:]))
        promoted = occ[1]
        woken = occ[sws + 1]
        rest = occ[2 : sws + 1] + occ[sws + 2 :]
        return WaitArray(tuple([promoted, woken] + rest))
    raise ValueError("event must be 'arrival' or 'release'")


def check_c1_c2(thc: int, sws: int, delta: int) -> int:
    """Remedy required when resizing the window desynchronizes waiters.

    Growing the window (``delta > 0``) while more than ``sws`` threads wait
    traps sleepers inside it: wake ``min(|delta|, thc - sws)`` of them.
    Shrinking it (``delta < 0``) while more than ``sws + delta`` threads
    wait leaves surplus spinners: suppress
    ``min(|delta|, thc - (sws + delta))`` wake-ups. Otherwise no remedy.
    """
    if delta > 0 and thc > sws:
        return min(delta, thc - sws)
    if delta < 0 and thc > sws + delta:
        return -min(-delta, thc - (sws + delta))
    return 0
