"""Single bottleneck link with a drop-tail FIFO queue and propagation delay."""
from collections import deque

import numpy as np

from .. import config
from ..exception import ContractViolationError
from ..utilcol import derive_seed


class SimState(object):
    """Mutable state of one simulated link.

    Attributes:
        clock_ms: Start of the next step.
        queue: FIFO of in-flight packets (queued, draining or propagating).
        queue_bytes: Bytes of the in-flight packets.
        busy_until_ms: Time when the link finishes draining every accepted packet.
        loss_channel: Stateful loss process of the trace.
        sent, delivered, lost, in_queue: Packet counters.
        dropped: Lost packets that were rejected by the drop-tail limit rather
            than by the loss process. They are also counted in lost.
    """

    __slots__ = ('clock_ms', 'queue', 'queue_bytes', 'busy_until_ms', 'loss_channel',
                 'rng', 'sent', 'delivered', 'lost', 'in_queue', 'dropped')

    def __init__(self, trace, seed=None):
        seed = trace.seed if seed is None else seed
        self.clock_ms = 0.0
        self.queue = deque()
        self.queue_bytes = 0
        self.busy_until_ms = 0.0
        self.rng = np.random.default_rng(derive_seed(seed, 'loss'))
        self.loss_channel = trace.loss_model.channel(self.rng)
        self.sent = 0
        self.delivered = 0
        self.lost = 0
        self.in_queue = 0
        self.dropped = 0

    @property
    def backlog_ms(self):
        """Drain time of the queue at the current clock."""
        return max(self.busy_until_ms - self.clock_ms, 0.0)

    def counters(self):
        return {'sent': self.sent, 'delivered': self.delivered, 'lost': self.lost,
                'in_queue': self.in_queue}

    def check_conservation(self):
        assert self.sent == self.delivered + self.lost + self.in_queue, \
            'Packet conservation failed: {}'.format(self.counters())

    def __repr__(self):
        return 'SimState::{}ms::sent {} delivered {} lost {} in_queue {}'.format(
            self.clock_ms, self.sent, self.delivered, self.lost, self.in_queue)


def step(state, trace, offered, dt_ms=None):
    """Advance the link by one step.

    Offered packets enter the bottleneck at their send time. The random loss
    process is applied first and a packet that finds more than queue_limit_ms
    of drain time ahead of it is dropped. Accepted packets drain in FIFO order at
    the piecewise-constant capacity and arrive after the propagation delay.

    Args:
        state: SimState of the link.
        trace: NetworkTrace.
        offered: List of packets with send_ts_ms in [clock, clock + dt).
        dt_ms: Step duration. Only 60 ms is accepted.

    Returns:
        A list of packets that were lost in this step or arrived during it,
        sorted by seq.
    """
    dt_ms = dt_ms or config.step_ms
    if dt_ms != config.step_ms:
        raise ContractViolationError(
            'Step duration must be {} ms: {}'.format(config.step_ms, dt_ms))

    start = state.clock_ms
    end = start + dt_ms
    for p in offered:
        if not start <= p.send_ts_ms < end:
            raise ContractViolationError(
                'Packet {} was sent at {} ms outside the step window [{}, {}).'
                .format(p.seq, p.send_ts_ms, start, end))

    resolved = []
    prop = trace.prop_delay_ms
    limit = trace.queue_limit_ms
    for p in sorted(offered, key=lambda x: (x.send_ts_ms, x.seq)):
        state.sent += 1
        channel_loss = state.loss_channel.drop()
        if channel_loss or state.busy_until_ms - p.send_ts_ms > limit:
            p.mark_lost()
            state.lost += 1
            if not channel_loss:
                state.dropped += 1
            resolved.append(p)
            continue
        begin = max(p.send_ts_ms, state.busy_until_ms)
        finish = trace.serve(begin, p.size_bytes)
        state.busy_until_ms = finish
        p.arrive_ts_ms = finish + prop
        p.queue_time_ms = finish - p.send_ts_ms
        state.queue.append(p)
        state.queue_bytes += p.size_bytes
        state.in_queue += 1

    # arrival times are nondecreasing in FIFO order
    while state.queue and state.queue[0].arrive_ts_ms < end:
        p = state.queue.popleft()
        state.queue_bytes -= p.size_bytes
        state.in_queue -= 1
        state.delivered += 1
        resolved.append(p)

    state.clock_ms = end
    state.check_conservation()
    resolved.sort(key=lambda x: x.seq)
    return resolved
