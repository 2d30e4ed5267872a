"""QoE reward of a simulated call."""
from . import config
from ._frozen import frozen
from .datatype import Number, Tuple
from .features import normalize_rate


@frozen
class QoeReward(object):
    """Per-step QoE reward.

    r = w_rate * u - w_delay * d - w_loss * l where u is the log-normalized
    receive rate, d = min(delay / delay_norm_ms, 1) and l is the loss ratio.
    Episode QoE is the mean per-step reward.

    Usage:

        reward = QoeReward((0.6, 0.2, 0.2))
        print(reward(282.8, 400, 1.0))

        > -0.1
    """

    weights = Tuple('weights', 'reward weights (rate, delay, loss)', tuple_size=3,
                    valid_range=(0, 1000))
    delay_norm_ms = Number('delay_norm_ms', 'delay normalizer', valid_range=(1, 1e6))

    def __init__(self, weights=None, delay_norm_ms=None):
        s = config.settings.section('reward')
        self.weights = weights or s['weights']
        self.delay_norm_ms = delay_norm_ms or s['delay_norm_ms']

    @property
    def bounds(self):
        """(min, max) of the per-step reward."""
        w_rate, w_delay, w_loss = self.weights
        return -w_delay - w_loss, w_rate

    def components(self, recv_rate_kbps, delay_ms, loss_ratio):
        """Normalized (rate, delay, loss) components in [0, 1]."""
        return (normalize_rate(recv_rate_kbps),
                min(max(delay_ms, 0.0) / self.delay_norm_ms, 1.0),
                min(max(loss_ratio, 0.0), 1.0))

    def from_components(self, components):
        u, d, l = components
        w_rate, w_delay, w_loss = self.weights
        return w_rate * u - w_delay * d - w_loss * l

    def __call__(self, recv_rate_kbps, delay_ms, loss_ratio):
        return self.from_components(
            self.components(recv_rate_kbps, delay_ms, loss_ratio))

    def to_json(self):
        return {'weights': list(self.weights), 'delay_norm_ms': self.delay_norm_ms}

    @classmethod
    def from_json(cls, data):
        return cls(data['weights'], data['delay_norm_ms'])

    def __repr__(self):
        return 'QoeReward::{}'.format(self.weights)


def compute_reward(stats, weights=None):
    """Reward of one step from its IntervalStats.

    Delay is the mean one-way delay of delivered packets and 0 when nothing
    was delivered.
    """
    reward = weights if isinstance(weights, QoeReward) else QoeReward(weights)
    return reward(stats.recv_rate_kbps, stats.mean_delay_ms, stats.loss_ratio)
