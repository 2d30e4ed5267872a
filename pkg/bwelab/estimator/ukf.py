# coding=utf-8
"""Delay-based Unscented Kalman Filter expert estimator.

The filter tracks [bandwidth_kbps, trend_kbps_per_s]. Every step it predicts
with a decaying trend and corrects with two measurement channels:

    z1  capacity proxy from the receiving rate and the standing queue
    z2  positive part of the queue delay gradient in ms/s

The model of z2 is the queue growth rate of a sender that uses the last
estimate u on a link with capacity b: 1000 * softplus(u - b) / b. Noise
scales with the square of the estimate relative to 1000 kbps so the filter
gain does not depend on the link speed.
"""
import logging
import math

import numpy as np
from filterpy.kalman import MerweScaledSigmaPoints, unscented_transform
from scipy.linalg import LinAlgError, cholesky, solve

from .. import config
from .._frozen import frozen
from ..datatype import Number
from ..exception import NumericalError
from .base import Estimator

logger = logging.getLogger(__name__)

MEASUREMENT_TICKS = 5


@frozen
class UkfParameters(object):
    """Constants of the expert. Defaults come from the ukf config section."""

    alpha = Number('alpha', 'sigma point spread', valid_range=(1e-6, 10))
    beta = Number('beta', 'prior distribution', check_positive=True)
    kappa = Number('kappa', 'secondary scaling')
    q_bandwidth = Number('q_bandwidth', 'bandwidth process noise', check_positive=True)
    q_trend = Number('q_trend', 'trend process noise', check_positive=True)
    r_rate = Number('r_rate', 'rate measurement noise', valid_range=(1e-9, 1e12))
    r_gradient = Number('r_gradient', 'gradient measurement noise',
                        valid_range=(1e-9, 1e12))
    initial_kbps = Number('initial_kbps', 'initial estimate', valid_range=(10, 8000))
    trend_tau_s = Number('trend_tau_s', 'trend time constant', valid_range=(1e-3, 1e6))
    max_step_change = Number('max_step_change', 'largest relative change per step',
                             valid_range=(0, 10))
    underuse_ms = Number('underuse_ms', 'underuse threshold', check_positive=True)
    overuse_ms = Number('overuse_ms', 'overuse threshold', check_positive=True)
    probe_gain = Number('probe_gain', 'probe gain', check_positive=True)
    backoff_gain = Number('backoff_gain', 'backoff gain', check_positive=True)
    jitter = Number('jitter', 'cholesky jitter', check_positive=True)
    softness = Number('softness', 'relative softplus width', valid_range=(1e-6, 1))
    initial_sd_fraction = Number('initial_sd_fraction', 'initial bandwidth sd',
                                 check_positive=True)
    initial_trend_sd = Number('initial_trend_sd', 'initial trend sd',
                              check_positive=True)

    FIELDS = ('alpha', 'beta', 'kappa', 'q_bandwidth', 'q_trend', 'r_rate',
              'r_gradient', 'initial_kbps', 'trend_tau_s', 'max_step_change',
              'underuse_ms', 'overuse_ms', 'probe_gain', 'backoff_gain', 'jitter',
              'softness', 'initial_sd_fraction', 'initial_trend_sd')

    def __init__(self, **kwargs):
        values = config.settings.section('ukf')
        unknown = set(kwargs) - set(self.FIELDS)
        if unknown:
            raise AttributeError('Invalid UKF parameters: {}'.format(sorted(unknown)))
        values.update(kwargs)
        for name in self.FIELDS:
            setattr(self, name, values[name])
        if self.overuse_ms < self.underuse_ms:
            raise ValueError('overuse_ms must not be smaller than underuse_ms.')

    @property
    def ut_params(self):
        return self.alpha, self.beta, self.kappa

    def to_json(self):
        return {name: getattr(self, name) for name in self.FIELDS}

    def __repr__(self):
        return 'UkfParameters::alpha {}::Q ({}, {})::R ({}, {})'.format(
            self.alpha, self.q_bandwidth, self.q_trend, self.r_rate, self.r_gradient)


class Measurement(object):
    """Measurement of the expert over the last 300 ms.

    Attributes:
        recv_rate_kbps: Receiving rate.
        queue_delay_gradient_ms_per_s: Change of the average queue time per second.
        standing_queue_ms: Smallest queue time of a delivered packet. None if
            nothing was delivered.
        delivered: Number of delivered packets.
    """

    __slots__ = ('recv_rate_kbps', 'queue_delay_gradient_ms_per_s',
                 'standing_queue_ms', 'delivered')

    def __init__(self, recv_rate_kbps, queue_delay_gradient_ms_per_s,
                 standing_queue_ms=None, delivered=1):
        assert math.isfinite(recv_rate_kbps) and \
            math.isfinite(queue_delay_gradient_ms_per_s), \
            'Measurement must be finite: {}, {}'.format(
                recv_rate_kbps, queue_delay_gradient_ms_per_s)
        self.recv_rate_kbps = float(recv_rate_kbps)
        self.queue_delay_gradient_ms_per_s = float(queue_delay_gradient_ms_per_s)
        self.standing_queue_ms = standing_queue_ms
        self.delivered = delivered

    def __repr__(self):
        return 'Measurement::{:.1f}kbps::{:.1f}ms/s::standing {}'.format(
            self.recv_rate_kbps, self.queue_delay_gradient_ms_per_s,
            self.standing_queue_ms)


def _mean_queue(stats):
    delivered = sum(s.delivered for s in stats)
    if not delivered:
        return None
    return sum(s.avg_queue_ms * s.delivered for s in stats) / float(delivered)


def measurement_from(recent):
    """Build a Measurement from the 10 most recent short-term IntervalStats.

    Returns None until 10 intervals are available.
    """
    if len(recent) < 2 * MEASUREMENT_TICKS:
        return None
    window = recent[:MEASUREMENT_TICKS]
    previous = recent[MEASUREMENT_TICKS:2 * MEASUREMENT_TICKS]
    span_ms = float(sum(s.dt_ms for s in window))
    recv = sum(s.bytes for s in window) * 8.0 / span_ms
    delivered = sum(s.delivered for s in window)
    standing = min((s.min_queue_ms for s in window if s.delivered), default=None)
    now, before = _mean_queue(window), _mean_queue(previous)
    gradient = 0.0 if now is None or before is None else \
        (now - before) / (span_ms / 1000.0)
    return Measurement(recv, gradient, standing, delivered)


def capacity_proxy(measurement, params):
    """Capacity evidence from the standing queue.

    A drained queue probes above the receiving rate, a standing queue above
    the overuse threshold backs off and anything in between holds.
    """
    recv = measurement.recv_rate_kbps
    standing = measurement.standing_queue_ms
    if not measurement.delivered or standing is None:
        return params.backoff_gain * recv
    if standing < params.underuse_ms:
        return params.probe_gain * recv
    if standing > params.overuse_ms:
        return params.backoff_gain * recv
    return recv


class UkfState(object):
    """Filter state.

    Attributes:
        mean: [bandwidth_kbps, trend_kbps_per_s].
        cov: 2x2 covariance.
        params: UkfParameters.
        last_estimate: Last estimate the filter returned.
    """

    __slots__ = ('mean', 'cov', 'params', 'last_estimate')

    def __init__(self, mean, cov, params=None, last_estimate=None):
        self.mean = np.asarray(mean, dtype=float).reshape(2)
        self.cov = np.asarray(cov, dtype=float).reshape(2, 2)
        self.params = params or UkfParameters()
        self.last_estimate = float(self.mean[0]) if last_estimate is None \
            else float(last_estimate)

    @classmethod
    def initial(cls, params=None):
        params = params or UkfParameters()
        b0 = params.initial_kbps
        cov = np.diag([(params.initial_sd_fraction * b0) ** 2,
                       params.initial_trend_sd ** 2])
        return cls([b0, 0.0], cov, params)

    @property
    def scale(self):
        return max(self.mean[0], config.min_kbps) / 1000.0

    @property
    def ut_params(self):
        return self.params.ut_params

    def process_noise(self, dt_ms):
        """Q * dt scaled to the current estimate."""
        dt = dt_ms / 1000.0
        return np.diag([self.params.q_bandwidth, self.params.q_trend]) * dt * \
            self.scale ** 2

    def meas_noise(self):
        """R scaled to the current estimate."""
        return np.diag([self.params.r_rate * self.scale ** 2, self.params.r_gradient])

    def copy(self):
        return UkfState(self.mean.copy(), self.cov.copy(), self.params,
                        self.last_estimate)

    def __repr__(self):
        return 'UkfState::{:.1f}kbps::{:.1f}kbps/s'.format(self.mean[0], self.mean[1])


def matrix_sqrt(a, jitter=1e-9):
    """Upper Cholesky factor of a PSD matrix.

    A jitter relative to the matrix scale is added when the plain factorization
    fails. A matrix that still fails raises NumericalError.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if not np.any(a):
        return np.zeros_like(a)
    try:
        return cholesky(a, lower=False)
    except (LinAlgError, ValueError):
        pass
    scale = max(1.0, float(np.abs(np.diag(a)).max()))
    try:
        return cholesky(a + jitter * scale * np.eye(len(a)), lower=False)
    except (LinAlgError, ValueError):
        raise NumericalError('Covariance is not positive semi-definite:\n{}'.format(a))


def _centered_mean(sigmas, weights):
    # equal to weights @ sigmas since the weights sum to 1
    return sigmas[0] + np.dot(weights, sigmas - sigmas[0])


def sigma_points(mean, cov, ut_params, jitter=1e-9):
    """Merwe scaled sigma points.

    Args:
        mean: State mean of size n.
        cov: n x n PSD covariance.
        ut_params: (alpha, beta, kappa).

    Returns:
        (points, Wm, Wc) with 2n+1 points in rows.
    """
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    alpha, beta, kappa = ut_params
    points = MerweScaledSigmaPoints(len(mean), alpha=alpha, beta=beta, kappa=kappa,
                                    sqrt_method=lambda a: matrix_sqrt(a, jitter))
    return points.sigma_points(mean, cov), points.Wm, points.Wc


def _checked(cov):
    cov = 0.5 * (cov + cov.T)
    if not np.all(np.isfinite(cov)):
        raise NumericalError('Covariance is not finite:\n{}'.format(cov))
    values, vectors = np.linalg.eigh(cov)
    if values.min() < -1e-9 * max(1.0, values.max()):
        raise NumericalError('Covariance lost positive semi-definiteness: '
                             'eigenvalues {}'.format(values))
    if values.min() < 0:
        cov = np.dot(vectors * np.maximum(values, 0.0), vectors.T)
        cov = 0.5 * (cov + cov.T)
    return cov


def _clamp_estimate(value, last, params):
    low = max(config.min_kbps, last * (1.0 - params.max_step_change))
    high = min(config.max_kbps, last * (1.0 + params.max_step_change))
    return min(max(value, low), high)


def predict(state, dt_ms=None):
    """Propagate the state by dt_ms.

    bandwidth' = bandwidth + trend * dt and the trend decays with trend_tau_s.
    """
    dt_ms = dt_ms or config.step_ms
    params = state.params
    dt = dt_ms / 1000.0
    sigmas, wm, wc = sigma_points(state.mean, state.cov, params.ut_params,
                                  params.jitter)
    decay = math.exp(-dt / params.trend_tau_s)
    propagated = np.column_stack([sigmas[:, 0] + sigmas[:, 1] * dt,
                                  sigmas[:, 1] * decay])
    mean, cov = unscented_transform(propagated, wm, wc, state.process_noise(dt_ms),
                                    mean_fn=_centered_mean)
    mean[0] = min(max(mean[0], config.min_kbps), config.max_kbps)
    return UkfState(mean, _checked(cov), params, state.last_estimate)


def _measure(sigmas, last, params):
    b = np.maximum(sigmas[:, 0], config.min_kbps)
    tau = params.softness * max(last, config.min_kbps)
    growth = tau * np.logaddexp(0.0, (last - b) / tau)
    return np.column_stack([sigmas[:, 0], 1000.0 * growth / b])


def predicted_measurement(state):
    """Mean of the measurement model at state."""
    params = state.params
    sigmas, wm, wc = sigma_points(state.mean, state.cov, params.ut_params,
                                  params.jitter)
    z, _ = unscented_transform(_measure(sigmas, state.last_estimate, params), wm, wc,
                               state.meas_noise(), mean_fn=_centered_mean)
    return z


def update(state, measurement):
    """Correct the state with a measurement.

    Args:
        state: UkfState after predict.
        measurement: A Measurement or a raw [capacity_proxy, gradient] vector.

    Returns:
        (state, estimate_kbps). The estimate is clamped to [10, 8000] kbps and
        to max_step_change of the last estimate.
    """
    params = state.params
    if isinstance(measurement, Measurement):
        z = np.array([capacity_proxy(measurement, params),
                      max(measurement.queue_delay_gradient_ms_per_s, 0.0)])
    else:
        z = np.asarray(measurement, dtype=float).reshape(2)
    if not np.all(np.isfinite(z)):
        raise NumericalError('Measurement is not finite: {}'.format(z))

    sigmas, wm, wc = sigma_points(state.mean, state.cov, params.ut_params,
                                  params.jitter)
    zs = _measure(sigmas, state.last_estimate, params)
    z_pred, s = unscented_transform(zs, wm, wc, state.meas_noise(),
                                    mean_fn=_centered_mean)
    x = _centered_mean(sigmas, wm)
    pxz = np.dot((sigmas - x).T * wc, zs - z_pred)
    try:
        gain = solve(s, pxz.T, assume_a='pos').T
    except (LinAlgError, ValueError):
        raise NumericalError('Innovation covariance is singular:\n{}'.format(s))

    mean = state.mean + np.dot(gain, z - z_pred)
    cov = _checked(state.cov - np.dot(gain, np.dot(s, gain.T)))
    estimate = _clamp_estimate(mean[0], state.last_estimate, params)
    mean[0] = estimate
    return UkfState(mean, cov, params, estimate), estimate


class UkfEstimator(Estimator):
    """The expert estimator.

    Usage:

        expert = UkfEstimator()
        trajectory, metrics = run_episode(stable_trace(1000), expert)
    """

    name = 'ukf'

    def __init__(self, params=None):
        self.params = params or UkfParameters()
        self.state = UkfState.initial(self.params)

    def reset(self):
        self.state = UkfState.initial(self.params)

    def estimate(self, observation):
        state = predict(self.state)
        m = measurement_from(observation.recent)
        if m is None:
            estimate = _clamp_estimate(state.mean[0], state.last_estimate, self.params)
            state.mean[0] = estimate
            state.last_estimate = estimate
        else:
            state, estimate = update(state, m)
        self.state = state
        return estimate
