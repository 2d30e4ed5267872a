import unittest

from hypothesis import given, settings, strategies as st
import pytest

from bwelab.exception import ContractViolationError
from bwelab.netsim.link import SimState, step
from bwelab.netsim.lossmodel import LossModel
from bwelab.netsim.packet import Packet
from bwelab.netsim.trace import NetworkTrace, stable_trace


def burst(first_seq, t_ms, count, size, spacing=1.0):
    return [Packet(first_seq + k, size, 'video', t_ms + k * spacing)
            for k in range(count)]


class LinkTestCase(unittest.TestCase):
    """Test for (bwelab/netsim/link.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.trace = stable_trace(1000, 60000, prop_delay_ms=10)
        self.state = SimState(self.trace)

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        pass

    def test_empty_step(self):
        """Nothing offered, nothing resolved."""
        assert step(self.state, self.trace, []) == []
        assert self.state.counters() == {'sent': 0, 'delivered': 0, 'lost': 0,
                                         'in_queue': 0}
        assert self.state.clock_ms == 60

    def test_drop_tail(self):
        """Packets that find more than 500 ms of backlog are dropped."""
        # 1250 bytes drain in 10 ms and arrive 1 ms apart
        resolved = step(self.state, self.trace, burst(0, 0, 60, 1250))
        lost = [p.seq for p in resolved if p.lost]
        delivered = [p.seq for p in resolved if not p.lost]
        assert lost == [56, 57, 58, 59]
        assert delivered == [0, 1, 2, 3]
        assert self.state.counters() == {'sent': 60, 'delivered': 4, 'lost': 4,
                                         'in_queue': 52}
        assert self.state.dropped == 4

    def test_queue_time(self):
        """Queue time is the backlog at enqueue plus the own drain time."""
        trace = stable_trace(1000, 60000, prop_delay_ms=100)
        state = SimState(trace)
        assert step(state, trace, burst(0, 0, 3, 1250, 0.0)) == []
        queued = list(state.queue)
        assert [p.queue_time_ms for p in queued] == [10.0, 20.0, 30.0]
        assert [p.arrive_ts_ms for p in queued] == [110.0, 120.0, 130.0]
        assert [p.seq for p in step(state, trace, [])] == [0]
        assert [p.seq for p in step(state, trace, [])] == [1, 2]
        assert state.counters() == {'sent': 3, 'delivered': 3, 'lost': 0,
                                    'in_queue': 0}

    def test_overload_queue_growth(self):
        """At twice the capacity the backlog grows 60 ms per step."""
        times = []
        seq = 0
        for k in range(6):
            packets = burst(seq, k * 60.0, 60, 250)
            seq += 60
            step(self.state, self.trace, packets)
            times.append(packets[-1].queue_time_ms)
        growth = [b - a for a, b in zip(times[:-1], times[1:])]
        assert times[0] == pytest.approx(61.0)
        assert growth == [pytest.approx(60.0)] * 5
        assert self.state.lost == 0

    def test_iid_loss_one(self):
        """A loss rate of 1 loses every packet."""
        trace = stable_trace(1000, 60000, 10, loss_model=LossModel.iid(1.0))
        state = SimState(trace)
        resolved = step(state, trace, burst(0, 0, 10, 200))
        assert len(resolved) == 10
        assert all(p.lost for p in resolved)
        assert state.lost == 10
        assert state.dropped == 0

    def test_capacity_change(self):
        """Packets drain at the capacity of the current segment."""
        trace = NetworkTrace(60000, [(0, 1000), (60, 100)], 0)
        state = SimState(trace)
        step(state, trace, burst(0, 0, 1, 1250))
        packets = burst(1, 60, 1, 1250)
        step(state, trace, packets)
        assert packets[0].queue_time_ms == pytest.approx(100.0)

    def test_assertions_exceptions(self):
        """Packets outside the window and other step sizes are rejected."""
        with pytest.raises(ContractViolationError):
            step(self.state, self.trace, burst(0, 60, 1, 100))
        with pytest.raises(ContractViolationError):
            step(self.state, self.trace, [], dt_ms=30)

    def test_step_checks_conservation(self):
        """A step fails when the packet counters no longer add up."""
        step(self.state, self.trace, burst(0, 0, 5, 1250))
        self.state.sent += 1
        with pytest.raises(AssertionError):
            step(self.state, self.trace, [])

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.lists(st.integers(40, 1500), max_size=40), min_size=1,
                    max_size=12),
           st.floats(0.0, 0.6), st.integers(10, 8000), st.integers(0, 100),
           st.integers(0, 2 ** 32))
    def test_conservation(self, steps, loss_rate, capacity, prop_delay, seed):
        """sent = delivered + lost + in_queue after every step."""
        trace = stable_trace(capacity, 60000, prop_delay, seed,
                             LossModel.iid(loss_rate))
        state = SimState(trace)
        seq = 0
        seen = set()
        for k, sizes in enumerate(steps):
            spacing = 60.0 / max(len(sizes), 1)
            packets = [Packet(seq + i, size, 'video', k * 60.0 + i * spacing)
                       for i, size in enumerate(sizes)]
            seq += len(packets)
            resolved = step(state, trace, packets)
            state.check_conservation()
            assert [p.seq for p in resolved] == sorted(p.seq for p in resolved)
            for p in resolved:
                assert p.seq not in seen
                seen.add(p.seq)
                if not p.lost:
                    assert p.arrive_ts_ms < state.clock_ms
                    assert p.arrive_ts_ms >= p.send_ts_ms + prop_delay
        assert state.sent == seq


if __name__ == "__main__":
    unittest.main()
