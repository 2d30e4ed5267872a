# coding=utf-8
"""Log transform between bandwidth estimates and normalized actions."""
import logging
import math

import numpy as np

from .. import config

logger = logging.getLogger(__name__)


class ActionCodec(object):
    """Map bandwidth estimates to [0, 1] on a log scale.

    a = (ln b - ln b_min) / (ln b_max - ln b_min) with b in Mbps.

    Out-of-range inputs are clamped and counted in ``clamped``.

    Args:
        min_kbps: Lowest estimate (Default: 10 kbps).
        max_kbps: Highest estimate (Default: 8000 kbps).

    Usage:

        codec = ActionCodec()
        print(codec.decode(0.5))

        > 282.84271247461896
    """

    __slots__ = ('_min_kbps', '_max_kbps', '_min_mbps', '_max_mbps', '_log_min',
                 '_log_span', 'clamped')

    def __init__(self, min_kbps=None, max_kbps=None):
        min_kbps = config.min_kbps if min_kbps is None else float(min_kbps)
        max_kbps = config.max_kbps if max_kbps is None else float(max_kbps)
        if not 0 < min_kbps < max_kbps:
            raise ValueError(
                'Codec bounds must satisfy 0 < min < max: {}, {}'.format(
                    min_kbps, max_kbps))
        self._min_kbps = min_kbps
        self._max_kbps = max_kbps
        self._min_mbps = min_kbps / 1000.0
        self._max_mbps = max_kbps / 1000.0
        self._log_min = math.log(self._min_mbps)
        self._log_span = math.log(self._max_mbps) - self._log_min
        self.clamped = 0

    @property
    def min_kbps(self):
        return self._min_kbps

    @property
    def max_kbps(self):
        return self._max_kbps

    def _clamp(self, value, low, high, what):
        if value < low or value > high:
            self.clamped += 1
            logger.warning('%s %s is out of range [%s, %s] and is clamped.',
                           what, value, low, high)
            return min(max(value, low), high)
        return value

    def encode(self, kbps):
        """Normalized action of an estimate in kbps."""
        mbps = self._clamp(float(kbps) / 1000.0, self._min_mbps, self._max_mbps,
                           'Estimate (Mbps)')
        return (math.log(mbps) - self._log_min) / self._log_span

    def decode(self, action):
        """Estimate in kbps of a normalized action."""
        action = self._clamp(float(action), 0.0, 1.0, 'Action')
        return math.exp(action * self._log_span + self._log_min) * 1000.0

    def encode_array(self, kbps):
        """Vectorized encode without clamp accounting."""
        mbps = np.clip(np.asarray(kbps, dtype=float) / 1000.0, self._min_mbps,
                       self._max_mbps)
        return (np.log(mbps) - self._log_min) / self._log_span

    def decode_array(self, actions):
        """Vectorized decode without clamp accounting."""
        actions = np.clip(np.asarray(actions, dtype=float), 0.0, 1.0)
        return np.exp(actions * self._log_span + self._log_min) * 1000.0

    def to_json(self):
        return {'min_kbps': self.min_kbps, 'max_kbps': self.max_kbps}

    @classmethod
    def from_json(cls, data):
        return cls(data['min_kbps'], data['max_kbps'])

    def __eq__(self, other):
        return isinstance(other, ActionCodec) and self.to_json() == other.to_json()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'ActionCodec::{}-{}kbps'.format(self.min_kbps, self.max_kbps)


def encode_action(codec, kbps):
    return codec.encode(kbps)


def decode_action(codec, action):
    return codec.decode(action)
