# coding=utf-8
"""Interval statistics and the 64-element observation of the estimators.

Observation layout (most recent interval first in every window):

    0-39   8 scalar metrics x 5: receiving rate short/long, queue time
           short/long, loss ratio short/long, lost packets short/long
    40-63  8 media metrics x 3: video short/long, audio short/long,
           screen sharing short/long, probe short/long

Short-term intervals are 60 ms. Long-term intervals are consecutive 600 ms
blocks aligned to multiples of 10 steps.
"""
from collections import OrderedDict, deque
import math

import numpy as np

from . import config
from .exception import ConfigurationError, ContractViolationError
from .netsim.packet import MEDIA_TYPES

OBSERVATION_SIZE = 64
SCALAR_WINDOW = 5
MEDIA_WINDOW = 3
RECENT_SIZE = 10

QUEUE_NORM_MS = 1000.0
LOST_NORM_PACKETS = 50.0

FEATURE_GROUPS = OrderedDict([
    ('recv_rate', (0, 10)),
    ('queue_delay', (10, 20)),
    ('loss_ratio', (20, 30)),
    ('avg_lost', (30, 40)),
    ('media_type', (40, 64))
])
"""Feature groups and their [start, end) slice in the observation."""


class IntervalStats(object):
    """Aggregated packet statistics of one monitor interval.

    Attributes:
        recv_rate_kbps: Delivered bytes x 8 / dt.
        avg_queue_ms: Mean queue time of delivered packets.
        loss_ratio: lost / (lost + delivered).
        avg_lost_packets: Lost packets per 60 ms.
        media_mass: Fractions of delivered packets per media type in the order
            video, audio, screenshare, probe.
        delivered: Number of delivered packets.
        lost: Number of lost packets.
        bytes: Delivered bytes.
        min_queue_ms: Smallest queue time of a delivered packet.
        mean_delay_ms: Mean one-way delay of delivered packets.
        dt_ms: Interval duration.
    """

    __slots__ = ('recv_rate_kbps', 'avg_queue_ms', 'loss_ratio', 'avg_lost_packets',
                 'media_mass', 'delivered', 'lost', 'bytes', 'min_queue_ms',
                 'mean_delay_ms', 'dt_ms')

    def __init__(self, recv_rate_kbps=0.0, avg_queue_ms=0.0, loss_ratio=0.0,
                 avg_lost_packets=0.0, media_mass=(0.0, 0.0, 0.0, 0.0), delivered=0,
                 lost=0, bytes=0, min_queue_ms=0.0, mean_delay_ms=0.0, dt_ms=None):
        self.recv_rate_kbps = recv_rate_kbps
        self.avg_queue_ms = avg_queue_ms
        self.loss_ratio = loss_ratio
        self.avg_lost_packets = avg_lost_packets
        self.media_mass = tuple(media_mass)
        self.delivered = delivered
        self.lost = lost
        self.bytes = bytes
        self.min_queue_ms = min_queue_ms
        self.mean_delay_ms = mean_delay_ms
        self.dt_ms = dt_ms or config.step_ms

    @property
    def observed(self):
        """Number of packets the receiver accounted for."""
        return self.delivered + self.lost

    def to_json(self):
        return {s: getattr(self, s) for s in self.__slots__}

    @classmethod
    def from_json(cls, data):
        return cls(**data)

    def __eq__(self, other):
        return isinstance(other, IntervalStats) and self.to_json() == other.to_json()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'IntervalStats::{}ms::{:.1f}kbps::q{:.1f}ms::loss{:.3f}'.format(
            self.dt_ms, self.recv_rate_kbps, self.avg_queue_ms, self.loss_ratio)


def aggregate_interval(packets, dt_ms=None):
    """Aggregate resolved packets of one interval into IntervalStats.

    An empty interval returns all-zero statistics.
    """
    dt_ms = dt_ms or config.step_ms
    delivered = [p for p in packets if not p.lost]
    lost = len(packets) - len(delivered)
    if not packets:
        return IntervalStats(dt_ms=dt_ms)

    size = sum(p.size_bytes for p in delivered)
    if delivered:
        queues = [p.queue_time_ms for p in delivered]
        avg_queue = sum(queues) / len(queues)
        min_queue = min(queues)
        mean_delay = sum(p.arrive_ts_ms - p.send_ts_ms for p in delivered) / \
            len(delivered)
        counts = [0, 0, 0, 0]
        for p in delivered:
            counts[MEDIA_TYPES.index(p.media)] += 1
        mass = tuple(c / float(len(delivered)) for c in counts)
    else:
        avg_queue = min_queue = mean_delay = 0.0
        mass = (0.0, 0.0, 0.0, 0.0)

    return IntervalStats(
        recv_rate_kbps=size * 8.0 / dt_ms,
        avg_queue_ms=avg_queue,
        loss_ratio=lost / float(lost + len(delivered)),
        avg_lost_packets=lost * config.step_ms / float(dt_ms),
        media_mass=mass,
        delivered=len(delivered),
        lost=lost,
        bytes=size,
        min_queue_ms=min_queue,
        mean_delay_ms=mean_delay,
        dt_ms=dt_ms
    )


def normalize_rate(kbps):
    """Log map of a rate over [10, 8000] kbps into [0, 1]. Zero maps to 0."""
    if kbps <= config.min_kbps:
        return 0.0
    if kbps >= config.max_kbps:
        return 1.0
    low = math.log(config.min_kbps)
    return (math.log(kbps) - low) / (math.log(config.max_kbps) - low)


def normalize_queue(ms):
    return min(max(ms, 0.0) / QUEUE_NORM_MS, 1.0)


def normalize_loss(ratio):
    return min(max(ratio, 0.0), 1.0)


def normalize_lost(count):
    return min(max(count, 0.0) / LOST_NORM_PACKETS, 1.0)


def feature_mask(groups=None):
    """Boolean mask of the active observation entries.

    Args:
        groups: Names of the active feature groups. None keeps all groups.
    """
    if groups is None:
        return np.ones(OBSERVATION_SIZE, dtype=bool)
    groups = list(groups)
    if not groups:
        raise ConfigurationError('feature mask', groups, list(FEATURE_GROUPS))
    mask = np.zeros(OBSERVATION_SIZE, dtype=bool)
    for g in groups:
        if g not in FEATURE_GROUPS:
            raise ConfigurationError('feature group', g, list(FEATURE_GROUPS))
        start, end = FEATURE_GROUPS[g]
        mask[start:end] = True
    return mask


def mask_groups(mask):
    """Names of the feature groups that are active in mask."""
    mask = np.asarray(mask, dtype=bool)
    return [g for g, (start, end) in FEATURE_GROUPS.items() if mask[start:end].all()]


def parse_groups(value):
    """Parse a comma-separated list of feature group names."""
    groups = [v.strip() for v in value.split(',') if v.strip()]
    feature_mask(groups)
    return groups


class Observation(object):
    """Normalized observation of one step.

    Attributes:
        values: 64 floats in [0, 1].
        recent: Up to 10 raw short-term IntervalStats, most recent first. Only
            the expert estimator reads them.
    """

    __slots__ = ('values', 'recent')

    def __init__(self, values, recent=()):
        values = np.asarray(values, dtype=float)
        if values.shape != (OBSERVATION_SIZE,):
            raise ContractViolationError(
                'Observation must have {} entries: got shape {}.'.format(
                    OBSERVATION_SIZE, values.shape))
        self.values = values
        self.recent = tuple(recent)

    @property
    def latest(self):
        """Raw statistics of the last interval or None during warm-up."""
        return self.recent[0] if self.recent else None

    def masked(self, mask):
        """Observation values with inactive feature groups zeroed."""
        return np.where(mask, self.values, 0.0)

    def __len__(self):
        return OBSERVATION_SIZE

    def __repr__(self):
        return 'Observation::{:.3f}'.format(float(self.values.sum()))


class FeatureHistory(object):
    """Ring buffers of short and long-term interval statistics of one call."""

    def __init__(self):
        self.short = deque(maxlen=RECENT_SIZE)
        self.long = deque(maxlen=SCALAR_WINDOW)
        self._block = []
        self._steps = 0

    @property
    def steps(self):
        return self._steps

    def push(self, packets, dt_ms=None):
        """Add the resolved packets of a step and return its IntervalStats."""
        dt_ms = dt_ms or config.step_ms
        stats = aggregate_interval(packets, dt_ms)
        self.short.appendleft(stats)
        self._block.extend(packets)
        self._steps += 1
        if self._steps % config.long_term_steps == 0:
            self.long.appendleft(
                aggregate_interval(self._block, dt_ms * config.long_term_steps))
            self._block = []
        return stats

    def observation(self):
        return build_observation(self)


def _window(stats, size):
    items = list(stats)[:size]
    return items + [IntervalStats()] * (size - len(items))


def build_observation(history):
    """Build the normalized observation from a FeatureHistory.

    Windows are zero-padded during warm-up.
    """
    short = _window(history.short, SCALAR_WINDOW)
    long = _window(history.long, SCALAR_WINDOW)
    values = []
    for getter in (lambda s: normalize_rate(s.recv_rate_kbps),
                   lambda s: normalize_queue(s.avg_queue_ms),
                   lambda s: normalize_loss(s.loss_ratio),
                   lambda s: normalize_lost(s.avg_lost_packets)):
        values.extend(getter(s) for s in short)
        values.extend(getter(s) for s in long)
    for m in range(len(MEDIA_TYPES)):
        values.extend(s.media_mass[m] for s in short[:MEDIA_WINDOW])
        values.extend(s.media_mass[m] for s in long[:MEDIA_WINDOW])
    return Observation(values, tuple(history.short))
