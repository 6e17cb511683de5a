"""Slot-model simulator: golden traces, transitions, remedies, invariants."""

import pytest
from hypothesis import given, strategies as st

from mutlock.model import (
    ACT_CS,
    ACT_SPIN,
    SimConfig,
    WaitArray,
    check_c1_c2,
    simulate,
    thread_state,
    window_transition,
)


def three_thread_config(policy, sws=None):
    return SimConfig(threads=3, policy=policy, sws=sws, cs_slots=1, wake_slots=1)


class TestGoldenTraces:
    def test_spin_only(self):
        trace = simulate(three_thread_config("spin_only"))
        assert trace.completion_slot == 3
        assert trace.wasted_spin_slots == 3
        assert trace.wasted_wake_slots == 0
        assert trace.activities == (
            ("cs", "spin", "spin"),
            ("idle", "cs", "spin"),
            ("idle", "idle", "cs"),
        )

    def test_sleep_only(self):
        trace = simulate(three_thread_config("sleep_only"))
        assert trace.completion_slot == 5
        assert trace.wasted_spin_slots == 0
        assert trace.wasted_wake_slots == 2
        assert trace.activities == (
            ("cs", "idle", "idle"),
            ("idle", "wake", "idle"),
            ("idle", "cs", "idle"),
            ("idle", "idle", "wake"),
            ("idle", "idle", "cs"),
        )

    def test_hybrid_window_of_one(self):
        trace = simulate(three_thread_config("hybrid", sws=1))
        assert trace.completion_slot == 3
        assert trace.wasted_spin_slots + trace.wasted_wake_slots == 2
        assert trace.activities == (
            ("cs", "spin", "idle"),
            ("idle", "cs", "wake"),
            ("idle", "idle", "cs"),
        )

    def test_throughput_arithmetic(self):
        spin = simulate(three_thread_config("spin_only"))
        sleep = simulate(three_thread_config("sleep_only"))
        spin_throughput = 3 / spin.completion_slot
        sleep_throughput = 3 / sleep.completion_slot
        assert (spin_throughput - sleep_throughput) / spin_throughput == pytest.approx(0.4)
        total_busy = spin.wasted_spin_slots + 3  # waste plus the three CS slots
        assert spin.wasted_spin_slots / total_busy == pytest.approx(0.5)


class TestSimulateGeneral:
    def test_single_thread_no_waste(self):
        for policy, sws in [("spin_only", None), ("sleep_only", None), ("hybrid", 2)]:
            trace = simulate(SimConfig(threads=1, policy=policy, sws=sws, cs_slots=3))
            assert trace.completion_slot == 3
            assert trace.wasted_spin_slots == 0
            assert trace.wasted_wake_slots == 0

    def test_determinism(self):
        config = SimConfig(threads=5, policy="hybrid", sws=2, cs_slots=2, wake_slots=3)
        assert simulate(config) == simulate(config)

    def test_at_most_one_cs_per_slot(self):
        for threads in range(1, 7):
            for policy, sws_values in [
                ("spin_only", [None]),
                ("sleep_only", [None]),
                ("hybrid", [1, 2, 3]),
            ]:
                for sws in sws_values:
                    for cs in (1, 2):
                        for wake in (0, 1, 3):
                            trace = simulate(SimConfig(
                                threads=threads, policy=policy, sws=sws,
                                cs_slots=cs, wake_slots=wake,
                            ))
                            for row in trace.activities:
                                assert row.count(ACT_CS) <= 1
                            assert sum(
                                row.count(ACT_CS) for row in trace.activities
                            ) == threads * cs

    def test_work_conservation_hybrid(self):
        # A runnable spinner at a release means the next slot runs a CS.
        for threads in range(2, 7):
            for sws in (1, 2, 3):
                trace = simulate(SimConfig(
                    threads=threads, policy="hybrid", sws=sws,
                    cs_slots=1, wake_slots=1,
                ))
                rows = trace.activities
                for slot in range(len(rows) - 1):
                    if ACT_CS in rows[slot] and ACT_SPIN in rows[slot]:
                        assert ACT_CS in rows[slot + 1], (threads, sws, slot)

    def test_window_bound_hybrid(self):
        for threads in range(1, 8):
            for sws in (1, 2, 3):
                for wake in (0, 1, 2):
                    trace = simulate(SimConfig(
                        threads=threads, policy="hybrid", sws=sws,
                        cs_slots=1, wake_slots=wake,
                    ))
                    for row in trace.activities:
                        assert row.count(ACT_SPIN) <= sws

    def test_spin_only_count_matches_closed_form(self):
        for threads in range(1, 8):
            for cs in (1, 2, 3):
                trace = simulate(SimConfig(threads=threads, policy="spin_only",
                                           cs_slots=cs, wake_slots=1))
                assert trace.completion_slot == threads * cs
                assert trace.wasted_spin_slots == cs * threads * (threads - 1) // 2

    def test_sleep_only_count_matches_closed_form(self):
        for threads in range(1, 8):
            for cs in (1, 2):
                for wake in (1, 2):
                    trace = simulate(SimConfig(threads=threads, policy="sleep_only",
                                               cs_slots=cs, wake_slots=wake))
                    assert trace.completion_slot == threads * cs + (threads - 1) * wake
                    assert trace.wasted_wake_slots == (threads - 1) * wake

    def test_validation(self):
        with pytest.raises(ValueError):
            SimConfig(threads=0, policy="spin_only")
        with pytest.raises(ValueError):
            SimConfig(threads=2, policy="hybrid")
        with pytest.raises(ValueError):
            SimConfig(threads=2, policy="hybrid", sws=0)
        with pytest.raises(ValueError):
            SimConfig(threads=2, policy="nonsense")
        with pytest.raises(ValueError):
            SimConfig(threads=2, policy="spin_only", sws=3)
        with pytest.raises(ValueError):
            SimConfig(threads=2, policy="spin_only", cs_slots=0)


class TestWaitArray:
    def test_arrival_into_empty_array_holds(self):
        array = window_transition(WaitArray(), "arrival", sws=2, tid="a")
        assert array.occupants == ("a",)
        assert thread_state(0, sws=2) == "holder"

    def test_arrival_beyond_window_sleeps(self):
        array = WaitArray(("a", "b", "c"))
        array = window_transition(array, "arrival", sws=2, tid="d")
        assert array.occupants.index("d") == 3
        assert thread_state(3, sws=2) == "sleep"

    def test_release_promotes_spinner_and_wakes_sleeper(self):
        array = WaitArray(("a", "b", "c", "d"))
        after = window_transition(array, "release", sws=1)
        assert after.occupants == ("b", "c", "d")
        assert thread_state(after.occupants.index("c"), sws=1) == "spin"

    def test_release_shifts_woken_sleeper_into_freed_slot(self):
        array = WaitArray(("a", "b", "c", "d", "e"))
        after = window_transition(array, "release", sws=2)
        assert after.occupants == ("b", "d", "c", "e")

    def test_release_without_sleepers_shifts_everyone(self):
        array = WaitArray(("a", "b", "c"))
        after = window_transition(array, "release", sws=4)
        assert after.occupants == ("b", "c")

    def test_release_on_empty_rejected(self):
        with pytest.raises(ValueError):
            window_transition(WaitArray(), "release", sws=2)

    def test_unknown_event_rejected(self):
        with pytest.raises(ValueError):
            window_transition(WaitArray(("a",)), "promote", sws=2)


class TestCheckC1C2:
    def test_growth_remedy(self):
        assert check_c1_c2(thc=6, sws=4, delta=4) == 2

    def test_shrink_remedy(self):
        assert check_c1_c2(thc=10, sws=4, delta=-1) == -1

    def test_no_remedy_when_growth_has_no_sleepers(self):
        assert check_c1_c2(thc=2, sws=4, delta=4) == 0

    def test_zero_delta_never_needs_remedy(self):
        for thc in range(10):
            assert check_c1_c2(thc=thc, sws=3, delta=0) == 0

    @given(
        st.integers(min_value=0, max_value=32),
        st.integers(min_value=1, max_value=16),
        st.integers(min_value=-15, max_value=16),
    )
    def test_remedy_bounded_by_delta(self, thc, sws, delta):
        if sws + delta < 1:
            return
        remedy = check_c1_c2(thc, sws, delta)
        assert abs(remedy) <= abs(delta)
        if delta != 0:
            assert remedy * delta >= 0  # remedy never opposes the change
