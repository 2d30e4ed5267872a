# coding=utf-8
"""Online finetuning with KL-penalized proximal policy optimization.

The policy network output is the mean of a Gaussian over the normalized action
with a learned log standard deviation. Sampled actions are clipped to [0, 1]
before they are decoded. A value head on the recurrent state is trained on
the QoE returns.

Per update the loss is

    -mean(ratio * A) + beta * mean(KL(old || new)) + value_weight * mean((V - R)^2)

and beta doubles when the measured KL is above 1.5x the target and halves
when it is below target / 1.5.
"""
from collections import OrderedDict
import logging
import math

import numpy as np

from .. import config
from .._frozen import frozen
from ..datatype import Number
from ..estimator.policy import PolicyEstimator
from ..exception import DivergenceError, NumericalError
from ..futil import read_csv, write_csv
from ..netsim.episode import run_episode
from ..netsim.trace import TraceEnvironment
from ..policy.network import PolicyParams, backward_batch, forward_batch
from ..policy.optim import Adam
from ..reward import QoeReward
from ..utilcol import derive_seed, parallel_map

logger = logging.getLogger(__name__)

KL_PENALTIES = (0.1, 0.3, 0.5, 0.7, 0.9)
"""Initial KL penalties of the offline-to-online sweep."""

LOG_2PI = math.log(2.0 * math.pi)


@frozen
class PpoConfig(object):
    """PPO hyperparameters.

    Args:
        initial_kl_penalty: Starting KL coefficient beta.
        kl_target: Target mean KL per update.
        episodes_per_update: Calls rolled out per update.
        epochs_per_update: Gradient steps per update.
        value_weight: Weight of the value loss.
        gamma: Discount.
        lam: GAE lambda.
        lr: Adam learning rate.
        episodes: Total calls (Default: 75).
        initial_log_std: Starting log std of the exploration noise.
        seed: Seed of traces and exploration noise.
        clip_norm: Global gradient norm limit.
    """

    initial_kl_penalty = Number('initial_kl_penalty', 'initial KL penalty',
                                valid_range=(1e-6, 1e3))
    kl_target = Number('kl_target', 'KL target', valid_range=(1e-9, 10))
    episodes_per_update = Number('episodes_per_update', 'episodes per update',
                                 num_type=int, valid_range=(1, 1e6))
    epochs_per_update = Number('epochs_per_update', 'epochs per update',
                               num_type=int, valid_range=(1, 1e6))
    value_weight = Number('value_weight', 'value loss weight', check_positive=True)
    gamma = Number('gamma', 'discount', valid_range=(1e-9, 1))
    lam = Number('lam', 'GAE lambda', valid_range=(1e-9, 1))
    lr = Number('lr', 'learning rate', valid_range=(0, 10))
    episodes = Number('episodes', 'training episodes', num_type=int,
                      check_positive=True)
    initial_log_std = Number('initial_log_std', 'initial log std',
                             valid_range=(-20, 2))
    seed = Number('seed', 'seed', num_type=int, check_positive=True, default_value=0)
    clip_norm = Number('clip_norm', 'gradient clip norm', check_positive=True)

    def __init__(self, initial_kl_penalty=None, kl_target=None,
                 episodes_per_update=None, epochs_per_update=None, value_weight=None,
                 gamma=None, lam=None, lr=None, episodes=None, initial_log_std=None,
                 seed=0, clip_norm=None):
        s = config.settings.section('ppo')

        def pick(value, key):
            return s[key] if value is None else value

        self.initial_kl_penalty = pick(initial_kl_penalty, 'initial_kl_penalty')
        self.kl_target = pick(kl_target, 'kl_target')
        self.episodes_per_update = pick(episodes_per_update, 'episodes_per_update')
        self.epochs_per_update = pick(epochs_per_update, 'epochs_per_update')
        self.value_weight = pick(value_weight, 'value_weight')
        self.gamma = pick(gamma, 'gamma')
        self.lam = pick(lam, 'lam')
        self.lr = pick(lr, 'lr')
        self.episodes = pick(episodes, 'episodes')
        self.initial_log_std = pick(initial_log_std, 'initial_log_std')
        self.seed = seed
        self.clip_norm = config.settings.get('bc.clip_norm') if clip_norm is None \
            else clip_norm
        if not any(abs(self.initial_kl_penalty - k) < 1e-9 for k in KL_PENALTIES):
            logger.warning('Initial KL penalty %s is not one of %s.',
                           self.initial_kl_penalty, KL_PENALTIES)

    def duplicate(self, **kwargs):
        data = self.to_json()
        data.update(kwargs)
        return PpoConfig(**data)

    def to_json(self):
        return OrderedDict(
            (key, getattr(self, key)) for key in (
                'initial_kl_penalty', 'kl_target', 'episodes_per_update',
                'epochs_per_update', 'value_weight', 'gamma', 'lam', 'lr',
                'episodes', 'initial_log_std', 'seed', 'clip_norm'))

    def __repr__(self):
        return 'PpoConfig::kl {}::episodes {}::lr {}'.format(
            self.initial_kl_penalty, self.episodes, self.lr)


class RewardCurve(object):
    """Per-episode mean QoE, KL of the update and exploration std."""

    HEADER = ('episode', 'mean_qoe', 'mean_kl', 'policy_std')

    def __init__(self, rows=None):
        self.rows = [tuple(r) for r in rows or []]

    def append(self, episode, mean_qoe, mean_kl, policy_std):
        self.rows.append((int(episode), float(mean_qoe), float(mean_kl),
                          float(policy_std)))

    def __len__(self):
        return len(self.rows)

    @property
    def qoe(self):
        return np.array([r[1] for r in self.rows])

    @property
    def kl(self):
        return np.array([r[2] for r in self.rows])

    def episodes_to_reach(self, level):
        """First episode count whose trailing 5-episode mean QoE reaches level."""
        qoe = self.qoe
        for count in range(len(qoe)):
            if np.mean(qoe[max(0, count - 4):count + 1]) >= level:
                return count + 1
        return None

    def to_csv(self, file_path):
        return write_csv(file_path, self.HEADER,
                         [(e, repr(q), repr(k), repr(s)) for e, q, k, s in self.rows])

    @classmethod
    def from_csv(cls, file_path):
        _, rows = read_csv(file_path)
        return cls([(int(e), float(q), float(k), float(s)) for e, q, k, s in rows])

    def __repr__(self):
        return 'RewardCurve::{} episodes'.format(len(self))


class Rollout(object):
    """One exploratory call."""

    __slots__ = ('observations', 'samples', 'rewards', 'qoe', 'metrics')

    def __init__(self, observations, samples, rewards, metrics):
        self.observations = observations
        self.samples = np.asarray(samples, dtype=float)
        self.rewards = np.asarray(rewards, dtype=float)
        self.qoe = float(np.mean(self.rewards)) if len(self.rewards) else 0.0
        self.metrics = metrics


def _rollout(args):
    """Run one call with Gaussian exploration. Module level for worker processes."""
    params, env, reward, episode, seed = args
    trace = env(derive_seed(seed, 'trace', episode))
    estimator = PolicyEstimator(
        params, np.random.default_rng(derive_seed(seed, 'noise', episode)))
    trajectory, metrics = run_episode(trace, estimator, reward=reward,
                                      episode=episode)
    rewards = trajectory.qoe(reward)
    if not np.all(np.isfinite(rewards)):
        raise NumericalError(
            'Non-finite reward in episode {} on {!r}.'.format(episode, trace))
    return Rollout(trajectory.observations, [raw for _, raw in estimator.samples],
                   rewards, metrics)


def gae(rewards, values, gamma, lam):
    """Generalized advantage estimates and returns of one call.

    The call ends after the last step, so the value after it is 0.
    """
    steps = len(rewards)
    advantages = np.zeros(steps)
    running = 0.0
    for k in reversed(range(steps)):
        next_value = values[k + 1] if k + 1 < steps else 0.0
        delta = rewards[k] + gamma * next_value - values[k]
        running = delta + gamma * lam * running
        advantages[k] = running
    return advantages, advantages + np.asarray(values[:steps])


def gaussian_log_prob(x, mean, log_std):
    return -0.5 * ((x - mean) / math.exp(log_std)) ** 2 - log_std - 0.5 * LOG_2PI


def gaussian_kl(mean_old, log_std_old, mean_new, log_std_new):
    """KL(old || new) of two scalar Gaussians, elementwise over the means."""
    var_old = math.exp(2.0 * log_std_old)
    var_new = math.exp(2.0 * log_std_new)
    return log_std_new - log_std_old + \
        (var_old + (mean_old - mean_new) ** 2) / (2.0 * var_new) - 0.5


def adapt_kl_penalty(beta, kl, target):
    """Adaptive KL coefficient."""
    if kl > 1.5 * target:
        return beta * 2.0
    if kl < target / 1.5:
        return beta / 2.0
    return beta


def _batch(rollouts):
    steps = max(len(r.rewards) for r in rollouts)
    shape = (len(rollouts), steps)
    mask = np.zeros(shape)
    samples = np.zeros(shape)
    for count, r in enumerate(rollouts):
        mask[count, :len(r.rewards)] = 1.0
        samples[count, :len(r.rewards)] = r.samples
    return mask, samples


def ppo_loss(params, old_means, old_log_std, samples, advantages, returns, mask,
             beta, value_weight, observations):
    """Loss, gradients and mean KL of one PPO epoch.

    All arrays are (B, T) over the padded batch; mask marks the valid steps.
    """
    means, values, cache = forward_batch(params, observations)
    log_std = params.log_std
    var = math.exp(2.0 * log_std)
    count = mask.sum()

    diff = samples - means
    log_ratio = gaussian_log_prob(samples, means, log_std) - \
        gaussian_log_prob(samples, old_means, old_log_std)
    ratio = np.exp(np.clip(log_ratio, -50, 50)) * mask
    kl = gaussian_kl(old_means, old_log_std, means, log_std) * mask

    surrogate = float(np.sum(ratio * advantages)) / count
    mean_kl = float(np.sum(kl)) / count
    value_loss = float(np.sum(mask * (values - returns) ** 2)) / count
    loss = -surrogate + beta * mean_kl + value_weight * value_loss

    # d/d mean
    d_means = (-ratio * advantages * diff / var +
               beta * mask * (means - old_means) / var) / count
    d_values = 2.0 * value_weight * mask * (values - returns) / count
    grads = backward_batch(params, cache, d_means, d_values)

    # d/d log_std
    d_log_std = -np.sum(ratio * advantages * (diff ** 2 / var - 1.0)) + \
        beta * np.sum(mask * (1.0 - (math.exp(2.0 * old_log_std) +
                                     (old_means - means) ** 2) / var))
    grads['log_std'] = np.array([d_log_std / count])
    return loss, grads, mean_kl


def finetune(params, env=None, cfg=None, reward=None, curve_path=None, jobs=1):
    """Finetune a policy online against simulated calls.

    Args:
        params: Pretrained PolicyParams. A value head is added when missing.
        env: TraceEnvironment, a target name or a callable from seed to trace.
        cfg: PpoConfig.
        reward: QoeReward.
        curve_path: Optional CSV path for the reward curve.
        jobs: Worker processes for the rollouts of one update.

    Returns:
        (PolicyParams, RewardCurve). With 0 episodes the input params are
        returned unchanged.
    """
    cfg = cfg or PpoConfig()
    reward = reward or QoeReward()
    if env is None:
        env = TraceEnvironment()
    elif isinstance(env, str):
        env = TraceEnvironment.from_string(env)
    curve = RewardCurve()
    if cfg.episodes == 0:
        if curve_path:
            curve.to_csv(curve_path)
        return params, curve

    params = params.with_value_head(derive_seed(cfg.seed, 'value'),
                                    cfg.initial_log_std)
    optimizer = Adam(cfg.lr, clip_norm=cfg.clip_norm)
    beta = cfg.initial_kl_penalty
    logger.info('Finetuning %r on %r with %r', params, env, cfg)

    update = 0
    for start in range(0, cfg.episodes, cfg.episodes_per_update):
        episodes = range(start, min(start + cfg.episodes_per_update, cfg.episodes))
        rollouts = parallel_map(
            _rollout, [(params, env, reward, e, cfg.seed) for e in episodes], jobs)
        observations = [r.observations for r in rollouts]
        mask, samples = _batch(rollouts)

        old_log_std = params.log_std
        old_means, old_values, _ = forward_batch(params, observations)
        advantages = np.zeros_like(mask)
        returns = np.zeros_like(mask)
        for count, r in enumerate(rollouts):
            steps = len(r.rewards)
            adv, ret = gae(r.rewards, old_values[count, :steps], cfg.gamma, cfg.lam)
            advantages[count, :steps] = adv
            returns[count, :steps] = ret
        valid = mask > 0
        std = advantages[valid].std()
        advantages[valid] = (advantages[valid] - advantages[valid].mean()) / \
            (std if std > 1e-8 else 1.0)

        for _ in range(cfg.epochs_per_update):
            loss, grads, _ = ppo_loss(
                params, old_means, old_log_std, samples, advantages, returns, mask,
                beta, cfg.value_weight, observations)
            if not math.isfinite(loss):
                raise NumericalError('Non-finite PPO loss in update {}.'.format(update))
            optimizer.step(params, grads)

        new_means, _, _ = forward_batch(params, observations)
        kl = float(np.sum(mask * gaussian_kl(old_means, old_log_std, new_means,
                                             params.log_std)) / mask.sum())
        if kl > 10.0 * cfg.kl_target:
            raise DivergenceError(kl, cfg.kl_target, update)
        for e, r in zip(episodes, rollouts):
            curve.append(e, r.qoe, kl, math.exp(old_log_std))
        logger.info('Update %d: mean qoe %.4f, kl %.5f, beta %.3f, std %.3f',
                    update, np.mean([r.qoe for r in rollouts]), kl, beta,
                    math.exp(params.log_std))
        beta = adapt_kl_penalty(beta, kl, cfg.kl_target)
        update += 1

    if curve_path:
        curve.to_csv(curve_path)
    return params.rounded(), curve


def train_from_scratch(cfg=None, env=None, architecture=None, hidden_size=None,
                       dense_size=None, reward=None, curve_path=None, jobs=1):
    """PPO from a randomly initialized policy.

    Same machinery as finetune. Used for the sample-efficiency comparison.
    """
    cfg = cfg or PpoConfig()
    params = PolicyParams.initialize(architecture, hidden_size, dense_size,
                                     seed=derive_seed(cfg.seed, 'scratch'))
    return finetune(params, env, cfg, reward, curve_path, jobs)
