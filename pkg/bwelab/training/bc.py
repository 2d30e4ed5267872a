# coding=utf-8
"""Behavioral cloning of the expert into a policy network."""
import logging
import math

import numpy as np

from .. import config
from .._frozen import frozen
from ..datatype import Number, Value
from ..exception import EmptyDatasetError, LayoutMismatchError
from ..features import OBSERVATION_SIZE, feature_mask, mask_groups
from ..futil import read_csv, write_csv
from ..policy.network import ARCHITECTURES, PolicyParams, backward, predict_actions
from ..policy.optim import Adam
from ..utilcol import derive_seed

logger = logging.getLogger(__name__)


@frozen
class BcConfig(object):
    """Behavioral cloning hyperparameters.

    Args:
        batch_size: Calls per minibatch (Default: 256).
        epochs: Passes over the training calls (Default: 1000).
        lr: Adam learning rate (Default: 0.001).
        seed: Seed of the split, the initialization and the shuffles.
        holdout_fraction: Share of calls kept for model selection (Default: 0.1).
        feature_groups: Active feature groups. None keeps all five.
        architecture: lstm or mlp.
        hidden_size: Recurrent width H.
        dense_size: First decode layer width D.
        clip_norm: Global gradient norm limit.
    """

    batch_size = Number('batch_size', 'minibatch size', valid_range=(1, 1e9),
                        num_type=int)
    epochs = Number('epochs', 'training epochs', num_type=int, check_positive=True)
    lr = Number('lr', 'learning rate', valid_range=(0, 10))
    seed = Number('seed', 'training seed', num_type=int, check_positive=True,
                  default_value=0)
    holdout_fraction = Number('holdout_fraction', 'holdout fraction',
                              valid_range=(0, 0.99))
    architecture = Value('architecture', 'policy architecture',
                         accepted_inputs=ARCHITECTURES)
    hidden_size = Number('hidden_size', 'hidden size', valid_range=(1, 4096),
                         num_type=int)
    dense_size = Number('dense_size', 'dense size', valid_range=(1, 4096),
                        num_type=int)
    clip_norm = Number('clip_norm', 'gradient clip norm', check_positive=True)

    def __init__(self, batch_size=None, epochs=None, lr=None, seed=0,
                 holdout_fraction=None, feature_groups=None, architecture=None,
                 hidden_size=None, dense_size=None, clip_norm=None):
        s = config.settings.section('bc')
        p = config.settings.section('policy')
        self.batch_size = batch_size or s['batch_size']
        self.epochs = s['epochs'] if epochs is None else epochs
        self.lr = lr or s['lr']
        self.seed = seed
        self.holdout_fraction = s['holdout_fraction'] if holdout_fraction is None \
            else holdout_fraction
        self.feature_groups = mask_groups(feature_mask(feature_groups))
        self.architecture = architecture or p['architecture']
        self.hidden_size = hidden_size or p['hidden_size']
        self.dense_size = dense_size or p['dense_size']
        self.clip_norm = s['clip_norm'] if clip_norm is None else clip_norm

    def duplicate(self, **kwargs):
        """A copy with some fields replaced."""
        data = self.to_json()
        data.update(kwargs)
        return BcConfig.from_json(data)

    def to_json(self):
        return {
            'batch_size': self.batch_size, 'epochs': self.epochs, 'lr': self.lr,
            'seed': self.seed, 'holdout_fraction': self.holdout_fraction,
            'feature_groups': list(self.feature_groups),
            'architecture': self.architecture, 'hidden_size': self.hidden_size,
            'dense_size': self.dense_size, 'clip_norm': self.clip_norm
        }

    @classmethod
    def from_json(cls, data):
        return cls(**data)

    def __repr__(self):
        return 'BcConfig::{}::H{}::batch {}::epochs {}::lr {}'.format(
            self.architecture, self.hidden_size, self.batch_size, self.epochs,
            self.lr)


class TrainingCurve(object):
    """Per-epoch train and holdout MSE in normalized action units."""

    HEADER = ('epoch', 'train_mse', 'holdout_mse')

    def __init__(self, rows=None):
        self.rows = [tuple(r) for r in rows or []]

    def append(self, epoch, train_mse, holdout_mse):
        self.rows.append((int(epoch), float(train_mse), float(holdout_mse)))

    def __len__(self):
        return len(self.rows)

    @property
    def train_mse(self):
        return np.array([r[1] for r in self.rows])

    @property
    def holdout_mse(self):
        return np.array([r[2] for r in self.rows])

    @property
    def best_epoch(self):
        """Epoch with the lowest holdout MSE (train MSE without a holdout)."""
        if not self.rows:
            return None
        scores = [r[2] if math.isfinite(r[2]) else r[1] for r in self.rows]
        return self.rows[int(np.argmin(scores))][0]

    def to_csv(self, file_path):
        return write_csv(file_path, self.HEADER,
                         [(e, repr(t), repr(h)) for e, t, h in self.rows])

    @classmethod
    def from_csv(cls, file_path):
        _, rows = read_csv(file_path)
        return cls([(int(e), float(t), float(h)) for e, t, h in rows])

    def __repr__(self):
        return 'TrainingCurve::{} epochs'.format(len(self))


def split(demos, holdout_fraction, seed):
    """Split trajectory indices into (train, holdout) by seed.

    At least one call is kept for training. The holdout is empty when the
    fraction is 0 or the set has a single call.
    """
    count = len(demos)
    order = np.random.default_rng(derive_seed(seed, 'holdout')).permutation(count)
    n_hold = int(round(holdout_fraction * count))
    if holdout_fraction > 0 and count > 1:
        n_hold = min(max(n_hold, 1), count - 1)
    else:
        n_hold = 0
    holdout = sorted(int(i) for i in order[:n_hold])
    train = sorted(int(i) for i in order[n_hold:])
    return train, holdout


def _samples(demos):
    samples = []
    for count, t in enumerate(demos):
        if hasattr(t, 'observations'):
            obs, actions = t.observations, t.actions
        else:
            obs, actions = t
        obs = np.asarray(obs)
        if obs.ndim != 2 or obs.shape[1] != OBSERVATION_SIZE:
            raise LayoutMismatchError(
                'Sample {} has observations of shape {}. The policy expects '
                '(steps, {}).'.format(count, obs.shape, OBSERVATION_SIZE))
        if len(actions) != len(obs):
            raise LayoutMismatchError(
                'Sample {} has {} observations and {} actions.'.format(
                    count, len(obs), len(actions)))
        samples.append((obs, np.asarray(actions, dtype=float)))
    return samples


def _mean_mse(params, samples):
    values = [float(np.mean((predict_actions(params, o) - y) ** 2))
              for o, y in samples if len(o)]
    return float(np.mean(values)) if values else float('nan')


def train(demos, cfg=None, params=None, curve_path=None):
    """Fit a policy to expert demonstrations.

    Every call is one training sample. An epoch shuffles the training calls,
    cuts them into minibatches and takes one Adam step per minibatch. The
    returned parameters are those with the lowest holdout MSE, rounded to
    float32.

    Args:
        demos: DemoSet or list of trajectories.
        cfg: BcConfig.
        params: Optional PolicyParams to resume from. Architecture and feature
            groups must match cfg. Adam moment estimates start from
            zero.
        curve_path: Optional CSV path for the training curve.

    Returns:
        (PolicyParams, TrainingCurve)
    """
    cfg = cfg or BcConfig()
    if not len(demos):
        raise EmptyDatasetError('demonstration set')
    samples = _samples(demos)
    train_idx, hold_idx = split(samples, cfg.holdout_fraction, cfg.seed)
    train_set = [samples[i] for i in train_idx]
    hold_set = [samples[i] for i in hold_idx]

    if params is None:
        params = PolicyParams.initialize(
            cfg.architecture, cfg.hidden_size, cfg.dense_size,
            seed=derive_seed(cfg.seed, 'init'), feature_groups=cfg.feature_groups)
    else:
        if (params.architecture, params.hidden_size, params.dense_size) != \
                (cfg.architecture, cfg.hidden_size, cfg.dense_size):
            logger.warning('Resuming %r ignores the architecture of %r.',
                           params, cfg)
        if list(params.feature_groups) != list(cfg.feature_groups):
            raise LayoutMismatchError(
                'The checkpoint uses feature groups {} but the run asks for {}.'
                .format(params.feature_groups, cfg.feature_groups))
        params = params.without_value_head()

    logger.info('Behavioral cloning %r on %d calls (%d held out) with %r',
                params, len(train_set), len(hold_set), cfg)
    optimizer = Adam(cfg.lr, clip_norm=cfg.clip_norm)
    shuffle = np.random.default_rng(derive_seed(cfg.seed, 'shuffle'))
    curve = TrainingCurve()
    best, best_score = params.copy(), float('inf')
    batch_index = 0
    for epoch in range(cfg.epochs):
        order = shuffle.permutation(len(train_set))
        total = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = [train_set[i] for i in order[start:start + cfg.batch_size]]
            loss, grads = backward(params, batch, normalizer=len(batch),
                                   batch_index=batch_index)
            optimizer.step(params, grads, params.policy_tensors())
            total += loss * len(batch)
            batch_index += 1
        train_mse = total / len(train_set)
        hold_mse = _mean_mse(params, hold_set) if hold_set else float('nan')
        curve.append(epoch, train_mse, hold_mse)
        score = hold_mse if hold_set else train_mse
        if score < best_score:
            best, best_score = params.copy(), score
        if epoch % 10 == 0 or epoch == cfg.epochs - 1:
            logger.info('Epoch %d: train mse %.6f, holdout mse %.6f',
                        epoch, train_mse, hold_mse)

    if curve_path:
        curve.to_csv(curve_path)
    return best.rounded(), curve


class MseReport(object):
    """Open-loop MSE of every trajectory.

    Attributes:
        values: Array of per-trajectory MSE in normalized action units.
    """

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)

    @property
    def mean(self):
        return float(np.mean(self.values)) if len(self.values) else float('nan')

    @property
    def median(self):
        return float(np.median(self.values)) if len(self.values) else float('nan')

    def cdf(self):
        """Empirical CDF as a list of (mse, fraction) pairs."""
        ordered = np.sort(self.values)
        count = len(ordered)
        return [(float(v), (i + 1) / float(count)) for i, v in enumerate(ordered)]

    def write_cdf(self, file_path):
        return write_csv(file_path, ('mse', 'fraction'),
                         [(repr(v), repr(f)) for v, f in self.cdf()])

    def to_json(self):
        return {'mean': self.mean, 'median': self.median, 'count': len(self.values)}

    def __repr__(self):
        return 'MseReport::{} trajectories::mean {:.6f}'.format(
            len(self.values), self.mean)


def evaluate_mse(params, demos, cdf_path=None):
    """Per-trajectory MSE between policy and expert actions.

    The policy runs open loop on the stored observations; the simulator is
    not involved.

    Args:
        params: PolicyParams.
        demos: DemoSet, list of trajectories or (observations, actions) pairs.
        cdf_path: Optional path for a two-column CDF CSV.

    Returns:
        MseReport
    """
    samples = _samples(demos)
    values = []
    for obs, actions in samples:
        if not len(obs):
            continue
        values.append(float(np.mean((predict_actions(params, obs) - actions) ** 2)))
    report = MseReport(values)
    if cdf_path:
        report.write_cdf(cdf_path)
    return report

