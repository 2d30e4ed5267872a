"""Baseline estimators of the overshoot/undershoot study."""
from .. import config
from ..exception import ConfigurationError
from .base import Estimator
from .ukf import UkfEstimator

BASELINES = ('overshoot', 'undershoot', 'tracking_ukf', 'constant:<kbps>')


class ConstantEstimator(Estimator):
    """Estimator that always returns the same value."""

    def __init__(self, kbps, name=None):
        self.kbps = float(kbps)
        self.name = name or 'constant:{:g}'.format(self.kbps)

    def estimate(self, observation):
        return self.kbps


def overshoot():
    """Constant estimator far above a 1 Mbps link (eval.overshoot_kbps)."""
    return ConstantEstimator(config.settings.get('eval.overshoot_kbps'), 'overshoot')


def undershoot():
    """Constant estimator well below a 1 Mbps link (eval.undershoot_kbps)."""
    return ConstantEstimator(config.settings.get('eval.undershoot_kbps'),
                             'undershoot')


def baseline_estimator(kind):
    """Create a baseline estimator by name.

    Args:
        kind: overshoot, undershoot, tracking_ukf (or ukf) or constant:<kbps>.
    """
    if kind == 'overshoot':
        return overshoot()
    if kind == 'undershoot':
        return undershoot()
    if kind in ('tracking_ukf', 'tracking', 'ukf'):
        est = UkfEstimator()
        est.name = kind
        return est
    if kind.startswith('constant:'):
        try:
            kbps = float(kind.split(':', 1)[1])
        except ValueError:
            raise ConfigurationError('estimator', kind, BASELINES)
        if not config.min_kbps <= kbps <= config.max_kbps:
            raise ConfigurationError('estimator', kind)
        return ConstantEstimator(kbps, kind)
    raise ConfigurationError('estimator', kind, BASELINES)
