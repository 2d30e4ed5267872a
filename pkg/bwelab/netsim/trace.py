# coding=utf-8
"""Bottleneck link traces and the randomized workload profiles."""
import bisect
import json
import logging

import numpy as np

from .. import config
from ..exception import ConfigurationError, MalformedRecordError, \
    TruncatedFileError
from ..futil import open_text
from ..utilcol import derive_seed, dumps
from .lossmodel import LossModel

logger = logging.getLogger(__name__)

PROFILES = ('low_bw', 'high_bw', 'fluctuating_bw', 'burst_loss', 'lte')
"""Workload profile tags."""

TARGETS = ('low_bw', 'high_bw')
"""Named target environments for personalization."""

LOW_BAND = (150, 999)
HIGH_BAND = (1000, 8000)


class NetworkTrace(object):
    """A simulated call environment.

    Attributes:
        duration_ms: Call duration in milliseconds.
        capacity_schedule: List of (t_ms, capacity_kbps) step-change points. The
            first point is at 0 and capacity is constant between points.
        prop_delay_ms: One-way propagation delay in milliseconds.
        queue_limit_ms: Drop-tail queue limit as drain time in milliseconds.
        loss_model: A LossModel.
        profile_tag: Workload profile of the trace.
        seed: Seed that generated the trace. It also seeds the loss process.
    """

    __slots__ = ('_duration_ms', '_schedule', '_times', '_prop_delay_ms',
                 '_queue_limit_ms', '_loss_model', '_profile_tag', '_seed')

    def __init__(self, duration_ms, capacity_schedule, prop_delay_ms,
                 queue_limit_ms=None, loss_model=None, profile_tag='high_bw', seed=0):
        self.duration_ms = duration_ms
        self.capacity_schedule = capacity_schedule
        self.prop_delay_ms = prop_delay_ms
        self.queue_limit_ms = queue_limit_ms
        self.loss_model = loss_model
        self.profile_tag = profile_tag
        self._seed = int(seed)

    @property
    def duration_ms(self):
        """Call duration in milliseconds."""
        return self._duration_ms

    @duration_ms.setter
    def duration_ms(self, value):
        value = int(value)
        if value <= 0:
            raise ValueError('Trace duration must be positive: {}'.format(value))
        self._duration_ms = value

    @property
    def capacity_schedule(self):
        """List of (t_ms, capacity_kbps) points."""
        return list(self._schedule)

    @capacity_schedule.setter
    def capacity_schedule(self, points):
        points = [(int(t), int(kbps)) for t, kbps in points]
        if not points or points[0][0] != 0:
            raise ValueError('Capacity schedule must start at t=0.')
        for (t0, _), (t1, _) in zip(points[:-1], points[1:]):
            if t1 <= t0:
                raise ValueError(
                    'Capacity schedule must be sorted strictly by time: '
                    '{} follows {}.'.format(t1, t0))
        for t, kbps in points:
            if not config.min_kbps <= kbps <= config.max_kbps:
                raise ValueError(
                    'Capacity {} kbps at {} ms is outside [{}, {}] kbps.'.format(
                        kbps, t, config.min_kbps, config.max_kbps))
        self._schedule = tuple(points)
        self._times = [t for t, _ in points]

    @property
    def prop_delay_ms(self):
        """One-way propagation delay."""
        return self._prop_delay_ms

    @prop_delay_ms.setter
    def prop_delay_ms(self, value):
        if value < 0:
            raise ValueError('Propagation delay must be >= 0: {}'.format(value))
        self._prop_delay_ms = int(value)

    @property
    def queue_limit_ms(self):
        """Drop-tail limit in ms of drain time."""
        return self._queue_limit_ms

    @queue_limit_ms.setter
    def queue_limit_ms(self, value):
        value = config.settings.get('netsim.queue_limit_ms') if value is None \
            else value
        if value <= 0:
            raise ValueError('Queue limit must be positive: {}'.format(value))
        self._queue_limit_ms = int(value)

    @property
    def loss_model(self):
        return self._loss_model

    @loss_model.setter
    def loss_model(self, model):
        self._loss_model = model or LossModel.none()

    @property
    def profile_tag(self):
        return self._profile_tag

    @profile_tag.setter
    def profile_tag(self, tag):
        if tag not in PROFILES:
            raise ConfigurationError('profile', tag, PROFILES)
        self._profile_tag = tag

    @property
    def seed(self):
        return self._seed

    @property
    def steps(self):
        """Number of 60 ms steps in the call."""
        return self._duration_ms // config.step_ms

    def capacity_at(self, t_ms):
        """Capacity in kbps at time t_ms."""
        i = bisect.bisect_right(self._times, t_ms) - 1
        return self._schedule[max(i, 0)][1]

    def serve(self, start_ms, size_bytes):
        """Time when size_bytes finish draining if service starts at start_ms.

        Capacity is piecewise constant; the last value holds after the end of
        the schedule. kbps equals bits per millisecond.
        """
        bits = size_bytes * 8.0
        i = max(bisect.bisect_right(self._times, start_ms) - 1, 0)
        t = start_ms
        while True:
            kbps = self._schedule[i][1]
            if i + 1 < len(self._schedule):
                seg_end = self._schedule[i + 1][0]
                capacity_bits = (seg_end - t) * kbps
                if bits > capacity_bits:
                    bits -= capacity_bits
                    t = seg_end
                    i += 1
                    continue
            return t + bits / kbps

    def mean_capacity(self):
        """Time-weighted mean capacity over the call."""
        total = 0.0
        for count, (t, kbps) in enumerate(self._schedule):
            if t >= self._duration_ms:
                break
            end = self._schedule[count + 1][0] if count + 1 < len(self._schedule) \
                else self._duration_ms
            total += (min(end, self._duration_ms) - t) * kbps
        return total / self._duration_ms

    def header(self):
        """Trace header as a dictionary."""
        return {'duration': self._duration_ms, 'prop_delay': self._prop_delay_ms,
                'queue_limit': self._queue_limit_ms,
                'loss_model': self._loss_model.to_json(),
                'profile': self._profile_tag, 'seed': self._seed}

    def to_json(self):
        data = self.header()
        data['schedule'] = [list(p) for p in self._schedule]
        return data

    @classmethod
    def from_json(cls, data):
        return cls(data['duration'], data['schedule'], data['prop_delay'],
                   data['queue_limit'], LossModel.from_json(data['loss_model']),
                   data['profile'], data['seed'])

    def to_jsonl(self):
        """Trace as JSON Lines: the header then one line per schedule point."""
        lines = [dumps(self.header())]
        lines.extend(dumps({'t_ms': t, 'kbps': kbps}) for t, kbps in self._schedule)
        return '\n'.join(lines) + '\n'

    def write(self, file_path):
        """Write the trace to a JSON Lines file."""
        with open_text(file_path, 'w') as outf:
            outf.write(self.to_jsonl())
        return file_path

    @classmethod
    def from_jsonl(cls, text, file_path='<string>'):
        lines = text.split('\n')
        if text and not text.endswith('\n'):
            raise TruncatedFileError(file_path, len(text.encode('utf-8')))
        records = []
        for count, line in enumerate(lines[:-1]):
            try:
                records.append(json.loads(line))
            except ValueError as e:
                raise MalformedRecordError(file_path, count + 1, str(e))
        if not records:
            raise MalformedRecordError(file_path, 1, 'missing trace header')
        header = records[0]
        try:
            header['schedule'] = [(r['t_ms'], r['kbps']) for r in records[1:]]
            return cls.from_json(header)
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedRecordError(file_path, 1, 'invalid trace: {}'.format(e))

    @classmethod
    def read(cls, file_path):
        """Load a trace from a JSON Lines file."""
        with open_text(file_path, 'r') as inf:
            return cls.from_jsonl(inf.read(), file_path)

    def __eq__(self, other):
        return isinstance(other, NetworkTrace) and self.to_json() == other.to_json()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'NetworkTrace::{}::#{}::{}ms::{} points'.format(
            self._profile_tag, self._seed, self._duration_ms, len(self._schedule))


def _band_value(rng, band):
    """Log-uniform integer capacity inside band."""
    low, high = band
    return int(round(np.exp(rng.uniform(np.log(low), np.log(high)))))


def _piecewise(rng, duration_ms, band, min_hold_ms, max_hold_ms):
    points = [(0, _band_value(rng, band))]
    t = int(rng.integers(min_hold_ms, max_hold_ms + 1))
    while t < duration_ms:
        points.append((t, _band_value(rng, band)))
        t += int(rng.integers(min_hold_ms, max_hold_ms + 1))
    return points


def _fluctuating(rng, duration_ms, band):
    count = max(3, duration_ms // 5000)
    times = np.sort(rng.choice(np.arange(1, duration_ms), size=count, replace=False))
    points = [(0, _band_value(rng, band))]
    for t in times:
        value = _band_value(rng, band)
        while value == points[-1][1]:
            value = _band_value(rng, band)
        points.append((int(t), value))
    return points


def _random_walk(rng, duration_ms, band):
    low, high = band
    value = float(_band_value(rng, (max(low, 500), min(high, 5000))))
    points = [(0, int(round(value)))]
    t = int(rng.integers(1000, 5001))
    while t < duration_ms:
        value = float(np.clip(value * np.exp(rng.normal(0.0, 0.3)), low, high))
        points.append((t, int(round(value))))
        t += int(rng.integers(1000, 5001))
    return points


def generate_trace(profile, seed, duration_ms=None, capacity_range=None):
    """Generate a random trace for a workload profile.

    The result is a deterministic function of the inputs.

    Args:
        profile: One of low_bw, high_bw, fluctuating_bw, burst_loss or lte.
        seed: An integer seed.
        duration_ms: Call duration (>= 1000 ms). Defaults to netsim.duration_ms.
        capacity_range: Optional (min, max) kbps band that overrides the
            profile band. Used by target environments.

    Returns:
        A NetworkTrace.
    """
    if profile not in PROFILES:
        raise ConfigurationError('profile', profile, PROFILES)
    if duration_ms is None:
        duration_ms = config.settings.get('netsim.duration_ms')
    if duration_ms < 1000:
        raise ValueError('Trace duration must be at least 1000 ms: {}'.format(
            duration_ms))
    if capacity_range is not None:
        low, high = capacity_range
        if not config.min_kbps <= low <= high <= config.max_kbps:
            raise ValueError(
                'Capacity range must lie inside [{}, {}] kbps: {}'.format(
                    config.min_kbps, config.max_kbps, capacity_range))
        if profile == 'fluctuating_bw' and round(low) == round(high):
            raise ValueError(
                'Fluctuating traces need a capacity range with at least two '
                'values: {}'.format(capacity_range))

    rng = np.random.default_rng(int(seed))
    low_delay, high_delay = config.settings.get('netsim.prop_delay_range_ms')
    prop_delay = int(rng.integers(low_delay, high_delay + 1))
    loss = LossModel.none()

    if profile == 'low_bw':
        schedule = _piecewise(rng, duration_ms, capacity_range or LOW_BAND,
                              10000, 30000)
    elif profile == 'high_bw':
        schedule = _piecewise(rng, duration_ms, capacity_range or HIGH_BAND,
                              10000, 30000)
    elif profile == 'fluctuating_bw':
        schedule = _fluctuating(rng, duration_ms, capacity_range or (200, 6000))
    elif profile == 'burst_loss':
        schedule = _piecewise(rng, duration_ms, capacity_range or (500, 4000),
                              20000, 60000)
        loss = LossModel.gilbert_elliott()
    else:
        schedule = _random_walk(rng, duration_ms, capacity_range or (200, 8000))

    return NetworkTrace(duration_ms, schedule, prop_delay, None, loss, profile,
                        seed)


def stable_trace(capacity_kbps, duration_ms=None, prop_delay_ms=None, seed=0,
                 loss_model=None):
    """A constant-capacity trace.

    The trace is tagged low_bw below 1000 kbps and high_bw otherwise. When
    prop_delay_ms is None it is drawn from seed.
    """
    if duration_ms is None:
        duration_ms = config.settings.get('netsim.duration_ms')
    if prop_delay_ms is None:
        low_delay, high_delay = config.settings.get('netsim.prop_delay_range_ms')
        prop_delay_ms = int(np.random.default_rng(int(seed)).integers(
            low_delay, high_delay + 1))
    tag = 'low_bw' if capacity_kbps < 1000 else 'high_bw'
    return NetworkTrace(duration_ms, [(0, int(capacity_kbps))], prop_delay_ms, None,
                        loss_model, tag, seed)


class TraceEnvironment(object):
    """A distribution of traces: a callable from seed to NetworkTrace.

    Args:
        profiles: List of profile tags to draw from (Default: all five).
        target: Optional named target. low_bw and high_bw mix stable, burst-loss
            and fluctuating scenarios inside the target capacity band.
            stable:<kbps> yields stable traces at that capacity. A target
            overrides profiles.
        duration_ms: Call duration.

    Usage:

        env = TraceEnvironment(target='low_bw', duration_ms=60000)
        trace = env(12)
    """

    def __init__(self, profiles=None, target=None, duration_ms=None):
        self.profiles = tuple(profiles or PROFILES)
        for p in self.profiles:
            if p not in PROFILES:
                raise ConfigurationError('profile', p, PROFILES)
        self.target = target
        self.duration_ms = config.settings.get('netsim.duration_ms') \
            if duration_ms is None else duration_ms
        self._stable_kbps = None
        if target is not None:
            if target.startswith('stable:'):
                try:
                    self._stable_kbps = int(float(target.split(':', 1)[1]))
                except ValueError:
                    raise ConfigurationError('target', target,
                                             TARGETS + ('stable:<kbps>',))
                if not config.min_kbps <= self._stable_kbps <= config.max_kbps:
                    raise ConfigurationError('target', target)
            elif target not in TARGETS:
                raise ConfigurationError('target', target, TARGETS + ('stable:<kbps>',))

    @classmethod
    def from_string(cls, value, duration_ms=None):
        """Parse a target name or a comma-separated list of profiles."""
        if value in TARGETS or value.startswith('stable:'):
            return cls(target=value, duration_ms=duration_ms)
        return cls(profiles=[v.strip() for v in value.split(',') if v.strip()],
                   duration_ms=duration_ms)

    def __call__(self, seed):
        if self._stable_kbps is not None:
            return stable_trace(self._stable_kbps, self.duration_ms, seed=seed)

        pick = derive_seed(seed, 'scenario')
        if self.target is None:
            profile = self.profiles[pick % len(self.profiles)]
            return generate_trace(profile, seed, self.duration_ms)

        band = LOW_BAND if self.target == 'low_bw' else HIGH_BAND
        scenario = pick % 3
        if scenario == 0:
            rng = np.random.default_rng(int(seed))
            return stable_trace(_band_value(rng, band), self.duration_ms, seed=seed)
        profile = 'burst_loss' if scenario == 1 else 'fluctuating_bw'
        return generate_trace(profile, seed, self.duration_ms, capacity_range=band)

    def to_json(self):
        return {'profiles': list(self.profiles), 'target': self.target,
                'duration_ms': self.duration_ms}

    @classmethod
    def from_json(cls, data):
        return cls(data.get('profiles'), data.get('target'), data.get('duration_ms'))

    def __repr__(self):
        return 'TraceEnvironment::{}'.format(self.target or ','.join(self.profiles))
