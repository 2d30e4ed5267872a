"""Estimator driven by a policy network."""
import math

from ..policy.network import forward
from ..policy.paramfile import load_params
from .base import Estimator


class PolicyEstimator(Estimator):
    """Run a policy step by step. The hidden state resets at every call start.

    Args:
        params: PolicyParams.
        rng: Optional numpy Generator. When set, actions are sampled from the
            Gaussian head N(a, exp(log_std)) and clipped to [0, 1] and every
            (mean, raw sample) pair is recorded in ``samples``. The raw sample
            is the draw before clipping.
        name: Estimator name (Default: policy).

    Usage:

        est = PolicyEstimator.from_file('policy.bin')
        trajectory, metrics = run_episode(trace, est)
    """

    def __init__(self, params, rng=None, name='policy'):
        self.params = params
        self.rng = rng
        self.name = name
        self.hidden = None
        self.samples = []

    @classmethod
    def from_file(cls, file_path, name=None):
        return cls(load_params(file_path), name=name or 'policy:{}'.format(file_path))

    def reset(self):
        self.hidden = None
        self.samples = []

    def estimate(self, observation):
        mean, self.hidden = forward(self.params, observation, self.hidden)
        action = mean
        if self.rng is not None:
            std = math.exp(self.params.log_std or 0.0)
            raw = mean + std * float(self.rng.standard_normal())
            self.samples.append((mean, raw))
            action = min(max(raw, 0.0), 1.0)
        return self.params.codec.decode(action)
