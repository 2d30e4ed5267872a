"""Closed-loop simulation of one call."""
import logging
import math

import numpy as np

from .. import config
from ..exception import EstimatorFaultError
from ..features import FeatureHistory
from ..media import encode_step, sample_call_config
from ..policy.codec import ActionCodec
from ..reward import QoeReward
from ..trajectory import EpisodeMetrics, Trajectory
from ..utilcol import derive_seed
from .link import SimState, step

logger = logging.getLogger(__name__)


def _reset(estimator):
    reset = getattr(estimator, 'reset', None)
    if reset is not None:
        reset()


def _ask(estimator, observation, step_index, episode):
    value = estimator(observation)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise EstimatorFaultError(value, step_index, episode)
    if not math.isfinite(value):
        raise EstimatorFaultError(value, step_index, episode)
    return min(max(value, config.min_kbps), config.max_kbps)


def run_episode(trace, estimator, media_cfg=None, expert=None, reward=None,
                seed=None, episode=None):
    """Simulate a call driven by an estimator.

    Every 60 ms step builds the observation from the finished steps, asks the
    estimator, applies the estimate after the feedback delay, encodes media and
    advances the link.

    Args:
        trace: NetworkTrace.
        estimator: A callable from Observation to an estimate in kbps.
        media_cfg: MediaConfig. Sampled from the trace seed when None.
        expert: Optional shadow estimator that labels every observation.
        reward: QoeReward (Default: packaged weights).
        seed: Seed of the loss process (Default: the trace seed).
        episode: Optional episode index that is reported in estimator faults.

    Returns:
        (Trajectory, EpisodeMetrics)
    """
    media_cfg = media_cfg or sample_call_config(derive_seed(trace.seed, 'media'))
    reward = reward or QoeReward()
    codec = ActionCodec()
    state = SimState(trace, seed)
    history = FeatureHistory()
    _reset(estimator)
    if expert is not None:
        _reset(expert)

    delay_steps = media_cfg.feedback_delay_steps(trace.prop_delay_ms)
    steps = trace.steps
    observations = np.zeros((steps, 64), dtype=np.float32)
    estimates = np.zeros(steps)
    labels = np.zeros(steps)
    applied = np.zeros(steps)
    components = np.zeros((steps, 3))
    recv = np.zeros(steps)
    delays = []
    seq = 0

    for k in range(steps):
        obs = history.observation()
        observations[k] = obs.values
        estimates[k] = _ask(estimator, obs, k, episode)
        labels[k] = estimates[k] if expert is None else _ask(expert, obs, k, episode)
        applied[k] = estimates[max(k - delay_steps, 0)]

        packets = encode_step(media_cfg, applied[k], k * config.step_ms, seq)
        seq += len(packets)
        resolved = step(state, trace, packets)
        stats = history.push(resolved)
        delays.extend(p.arrive_ts_ms - p.send_ts_ms for p in resolved if not p.lost)
        recv[k] = stats.recv_rate_kbps
        components[k] = reward.components(stats.recv_rate_kbps, stats.mean_delay_ms,
                                          stats.loss_ratio)

    trajectory = Trajectory(observations, labels, estimates, applied, components,
                            trace.to_json(), media_cfg.to_json(), codec=codec)

    resolved_count = state.delivered + state.lost
    if expert is not None and steps:
        driver_norm = codec.encode_array(estimates)
        mse = float(np.mean((driver_norm - trajectory.actions) ** 2))
        error = float(np.mean(np.abs(estimates - labels) / labels))
    else:
        mse = error = None

    metrics = EpisodeMetrics(
        recv_rate_kbps=float(recv.mean()) if steps else 0.0,
        loss_rate=state.lost / float(resolved_count) if resolved_count else 0.0,
        delay_ms=float(np.mean(delays)) if delays else 0.0,
        qoe=float(trajectory.qoe(reward).mean()) if steps else 0.0,
        mse_vs_expert=mse,
        estimate_error=error,
        mean_estimate_kbps=float(estimates.mean()) if steps else 0.0,
        sent=state.sent,
        delivered=state.delivered,
        lost=state.lost,
        steps=steps
    )
    logger.debug('Episode %s on %r: %r', episode, trace, metrics)
    return trajectory, metrics
