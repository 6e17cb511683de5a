"""Packed 64-bit lock state and the atomic word that holds it.

The adaptive lock keeps its two counters -- the spinning-window size (sws)
and the thread count (thc) -- in a single 64-bit word, sws in the upper 32
bits and thc in the lower 32. One atomic fetch-and-add can then update
either field and return a consistent snapshot of both.
"""

import threading

MASK32 = 0xFFFF_FFFF
MASK64 = 0xFFFF_FFFF_FFFF_FFFF

#: Adding this to the packed word bumps the sws field by exactly one.
SWS_UNIT = 1 << 32


def pack(sws: int, thc: int) -> int:
    """Pack ``(sws, thc)`` into one 64-bit word; both must fit in 32 bits."""
    return ((sws & MASK32) << 32) | (thc & MASK32)


def unpack(word: int) -> tuple[int, int]:
    """Inverse of :func:`pack`; returns ``(sws, thc)``."""
    return (word >> 32) & MASK32, word & MASK32


class AtomicU64:
    """64-bit unsigned integer supporting atomic fetch-and-add.

    CPython exposes no user-level atomic RMW instruction, so the word is
    guarded by a mutex. ``fetch_add`` is still a single linearization
    point, which is all the lock algorithm requires of the hardware
    primitive it stands in for.
    """

    __slots__ = ("_value", "_mutex")

    def __init__(self, initial: int = 0):
        self._value = initial & MASK64
        self._mutex = threading.Lock()

    def fetch_add(self, delta: int) -> int:
        """Add ``delta`` (mod 2**64) and return the value before the add."""
        with self._mutex:
            old = self._value
            self._value = (old + delta) & MASK64
            return old

    def load(self) -> int:
        with self._mutex:
            return self._value
