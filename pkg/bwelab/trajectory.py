"""Per-step log of a simulated call and its aggregate metrics."""
import math

import numpy as np

from .features import OBSERVATION_SIZE
from .policy.codec import ActionCodec
from .reward import QoeReward


class Trajectory(object):
    """One simulated call sampled every 60 ms.

    Attributes:
        observations: float32 array (T, 64).
        actions_kbps: Label estimate of every step. This is the expert's
            estimate when an expert co-runs and the driver's estimate otherwise.
        actions: Normalized labels (log transform of actions_kbps).
        estimates_kbps: Estimates of the estimator that drove the call.
        applied_kbps: Estimates the sender used after the feedback delay.
        rewards: float array (T, 3) of normalized (rate, delay, loss) reward
            components.
        trace_ref: Trace dictionary (NetworkTrace.to_json).
        call_config: MediaConfig dictionary.
    """

    __slots__ = ('observations', 'actions_kbps', 'actions', 'estimates_kbps',
                 'applied_kbps', 'rewards', 'trace_ref', 'call_config')

    def __init__(self, observations, actions_kbps, estimates_kbps=None,
                 applied_kbps=None, rewards=None, trace_ref=None, call_config=None,
                 actions=None, codec=None):
        self.observations = np.asarray(observations, dtype=np.float32).reshape(
            -1, OBSERVATION_SIZE)
        steps = len(self.observations)
        self.actions_kbps = np.asarray(actions_kbps, dtype=float).reshape(steps)
        if actions is None:
            actions = (codec or ActionCodec()).encode_array(self.actions_kbps)
        self.actions = np.asarray(actions, dtype=float).reshape(steps)
        self.estimates_kbps = self.actions_kbps.copy() if estimates_kbps is None \
            else np.asarray(estimates_kbps, dtype=float).reshape(steps)
        self.applied_kbps = self.estimates_kbps.copy() if applied_kbps is None \
            else np.asarray(applied_kbps, dtype=float).reshape(steps)
        self.rewards = np.zeros((steps, 3)) if rewards is None \
            else np.asarray(rewards, dtype=float).reshape(steps, 3)
        self.trace_ref = trace_ref or {}
        self.call_config = call_config or {}

    def __len__(self):
        return len(self.observations)

    @property
    def steps(self):
        return len(self.observations)

    def qoe(self, reward=None):
        """Per-step QoE rewards."""
        reward = reward or QoeReward()
        w_rate, w_delay, w_loss = reward.weights
        return w_rate * self.rewards[:, 0] - w_delay * self.rewards[:, 1] - \
            w_loss * self.rewards[:, 2]

    def relabel(self, actions_kbps, codec=None):
        """A copy with new label actions."""
        return Trajectory(self.observations, actions_kbps, self.estimates_kbps,
                          self.applied_kbps, self.rewards, self.trace_ref,
                          self.call_config, codec=codec)

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return False
        return all(np.array_equal(getattr(self, s), getattr(other, s))
                   for s in ('observations', 'actions_kbps', 'actions',
                             'estimates_kbps', 'applied_kbps', 'rewards')) and \
            self.trace_ref == other.trace_ref and \
            self.call_config == other.call_config

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'Trajectory::{}::#{}::{} steps'.format(
            self.trace_ref.get('profile'), self.trace_ref.get('seed'), self.steps)


class EpisodeMetrics(object):
    """Aggregate metrics of one call.

    Attributes:
        recv_rate_kbps: Mean receiving rate over the steps.
        loss_rate: lost / (lost + delivered) over the call.
        delay_ms: Mean one-way delay of delivered packets.
        qoe: Mean per-step QoE reward.
        mse_vs_expert: Mean squared difference of normalized driver and expert
            actions. None when no expert co-ran.
        estimate_error: Mean |driver - expert| / expert. None without expert.
        mean_estimate_kbps: Mean estimate of the driver.
        sent, delivered, lost: Packet counters.
        steps: Number of 60 ms steps.
    """

    FIELDS = ('recv_rate_kbps', 'loss_rate', 'delay_ms', 'qoe', 'mse_vs_expert',
              'estimate_error', 'mean_estimate_kbps', 'sent', 'delivered', 'lost',
              'steps')

    __slots__ = FIELDS

    def __init__(self, recv_rate_kbps, loss_rate, delay_ms, qoe, mse_vs_expert=None,
                 estimate_error=None, mean_estimate_kbps=0.0, sent=0, delivered=0,
                 lost=0, steps=0):
        self.recv_rate_kbps = recv_rate_kbps
        self.loss_rate = loss_rate
        self.delay_ms = delay_ms
        self.qoe = qoe
        self.mse_vs_expert = mse_vs_expert
        self.estimate_error = estimate_error
        self.mean_estimate_kbps = mean_estimate_kbps
        self.sent = sent
        self.delivered = delivered
        self.lost = lost
        self.steps = steps
        for name in ('recv_rate_kbps', 'loss_rate', 'delay_ms', 'qoe'):
            assert math.isfinite(getattr(self, name)), \
                '{} is not finite: {}'.format(name, getattr(self, name))

    def to_json(self):
        return {f: getattr(self, f) for f in self.FIELDS}

    @classmethod
    def from_json(cls, data):
        return cls(**{f: data[f] for f in cls.FIELDS if f in data})

    def __repr__(self):
        return 'EpisodeMetrics::{:.1f}kbps::loss {:.3f}::delay {:.1f}ms::qoe {:.3f}' \
            .format(self.recv_rate_kbps, self.loss_rate, self.delay_ms, self.qoe)
