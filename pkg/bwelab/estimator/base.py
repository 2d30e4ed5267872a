"""Base class for bandwidth estimators."""
from abc import ABCMeta, abstractmethod


class Estimator(object, metaclass=ABCMeta):
    """A bandwidth estimator.

    An estimator is called once per 60 ms step with the current Observation and
    returns an estimate in kbps. ``reset`` is called at the start of every call.
    """

    name = 'estimator'

    def reset(self):
        """Reset per-call state."""
        pass

    @abstractmethod
    def estimate(self, observation):
        """Return the bandwidth estimate in kbps for observation."""
        pass

    def __call__(self, observation):
        return self.estimate(observation)

    def __repr__(self):
        return 'Estimator::{}'.format(self.name)


class FunctionEstimator(Estimator):
    """Wrap a plain function of an Observation as an estimator."""

    def __init__(self, func, name='function'):
        self.func = func
        self.name = name

    def estimate(self, observation):
        return self.func(observation)
