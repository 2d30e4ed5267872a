# coding=utf-8
"""Welch t-test and confidence intervals of per-episode samples."""
from collections import namedtuple
import math

import numpy as np
from scipy import stats

from ..exception import DegenerateSampleError

WelchResult = namedtuple('WelchResult', ('t', 'dof', 'p'))


def _sample(values, name):
    values = np.asarray(values, dtype=float).ravel()
    if len(values) < 2:
        raise DegenerateSampleError(
            'Sample {} has {} values. At least 2 are required.'.format(
                name, len(values)))
    if not np.all(np.isfinite(values)):
        raise DegenerateSampleError('Sample {} has non-finite values.'.format(name))
    return values


def welch_t_test(samples_a, samples_b):
    """Two-sided Welch t-test.

    Degrees of freedom follow the Welch-Satterthwaite equation and the p-value
    comes from the Student-t survival function.

    Args:
        samples_a: At least two values.
        samples_b: At least two values.

    Returns:
        WelchResult(t, dof, p)
    """
    a = _sample(samples_a, 'a')
    b = _sample(samples_b, 'b')
    va = a.var(ddof=1) / len(a)
    vb = b.var(ddof=1) / len(b)
    if va + vb == 0:
        raise DegenerateSampleError(
            'Both samples have zero variance. The t statistic is undefined.')
    t = (a.mean() - b.mean()) / math.sqrt(va + vb)
    dof = (va + vb) ** 2 / (va ** 2 / (len(a) - 1) + vb ** 2 / (len(b) - 1))
    p = min(max(2.0 * stats.t.sf(abs(t), dof), 0.0), 1.0)
    return WelchResult(float(t), float(dof), float(p))


def compare(samples_a, samples_b):
    """p-value of a Welch test that also covers two constant samples.

    Two constant samples give p = 1 when they are equal and p = 0 otherwise.
    """
    try:
        return welch_t_test(samples_a, samples_b).p
    except DegenerateSampleError:
        a = _sample(samples_a, 'a')
        b = _sample(samples_b, 'b')
        return 1.0 if a.mean() == b.mean() else 0.0


def mean_ci(samples, level=0.95):
    """Mean and half width of the Student-t confidence interval.

    The half width is None for fewer than two samples.
    """
    values = np.asarray(samples, dtype=float).ravel()
    if not len(values):
        raise DegenerateSampleError('Cannot compute the mean of an empty sample.')
    mean = float(values.mean())
    if len(values) < 2:
        return mean, None
    t_crit = stats.t.ppf(1.0 - (1.0 - level) / 2.0, len(values) - 1)
    return mean, float(t_crit * values.std(ddof=1) / math.sqrt(len(values)))
