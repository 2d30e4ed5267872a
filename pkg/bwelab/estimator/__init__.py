"""Bandwidth estimators: the UKF expert, baselines and policy wrappers."""
from .base import Estimator, FunctionEstimator
from .baselines import BASELINES, ConstantEstimator, baseline_estimator
from .ukf import UkfEstimator, UkfParameters
from .policy import PolicyEstimator

__all__ = ['Estimator', 'FunctionEstimator', 'BASELINES', 'ConstantEstimator',
           'baseline_estimator', 'UkfEstimator', 'UkfParameters', 'PolicyEstimator']
