# coding=utf-8
"""Recurrent (or MLP) policy with two fully connected decode layers.

    lstm:  x -> LSTM(H) -> fc1(D) -> ReLU -> fc2(1) -> sigmoid
    mlp:   x -> tanh(dense H) -> fc1(D) -> ReLU -> fc2(1) -> sigmoid

LSTM gates are packed in the order input, forget, cell, output. An optional
value head (H -> 1) and a learned log standard deviation are added for online
finetuning; they never change the action path.

Sequences of different lengths are padded and processed as one batch. Padded
steps are causal followers of the valid steps and get zero loss weight, so they
never contribute gradients.
"""
from collections import OrderedDict
import math

import numpy as np

from .. import config
from ..exception import ConfigurationError, ContractViolationError, TrainingError
from ..features import OBSERVATION_SIZE, feature_mask, mask_groups
from .codec import ActionCodec

ARCHITECTURES = ('lstm', 'mlp')
VALUE_HEAD = ('Vw', 'Vb', 'log_std')


def parameter_shapes(architecture, hidden_size, dense_size, value_head=False):
    """Tensor names and shapes in declaration order."""
    H, D, X = hidden_size, dense_size, OBSERVATION_SIZE
    if architecture == 'lstm':
        shapes = [('Wx', (X, 4 * H)), ('Wh', (H, 4 * H)), ('b', (4 * H,))]
    elif architecture == 'mlp':
        shapes = [('We', (X, H)), ('be', (H,))]
    else:
        raise ConfigurationError('architecture', architecture, ARCHITECTURES)
    shapes += [('W1', (H, D)), ('b1', (D,)), ('W2', (D, 1)), ('b2', (1,))]
    if value_head:
        shapes += [('Vw', (H, 1)), ('Vb', (1,)), ('log_std', (1,))]
    return OrderedDict(shapes)


def _fan_in(name, hidden_size, dense_size):
    if name in ('Wx', 'We'):
        return OBSERVATION_SIZE
    if name in ('Wh', 'W1', 'Vw'):
        return hidden_size
    return dense_size


class PolicyParams(object):
    """All weights of a policy.

    Attributes:
        architecture: lstm or mlp.
        hidden_size: Recurrent (or dense encoder) width H.
        dense_size: Width D of the first decode layer.
        tensors: OrderedDict of float64 arrays in declaration order.
        codec: ActionCodec of the policy output.
        feature_groups: Active feature groups. Other groups are zeroed.
    """

    def __init__(self, architecture, hidden_size, dense_size, tensors, codec=None,
                 feature_groups=None):
        self.architecture = architecture
        self.hidden_size = int(hidden_size)
        self.dense_size = int(dense_size)
        self.codec = codec or ActionCodec()
        self.feature_groups = mask_groups(feature_mask(feature_groups))
        self.feature_mask = feature_mask(self.feature_groups)

        value_head = all(name in tensors for name in VALUE_HEAD)
        shapes = parameter_shapes(architecture, self.hidden_size, self.dense_size,
                                  value_head)
        self.tensors = OrderedDict()
        for name, shape in shapes.items():
            if name not in tensors:
                raise ContractViolationError('Missing policy tensor {}.'.format(name))
            value = np.array(tensors[name], dtype=float)
            if value.shape != shape:
                raise ContractViolationError(
                    'Policy tensor {} has shape {} but {} is expected.'.format(
                        name, value.shape, shape))
            self.tensors[name] = value

    @classmethod
    def initialize(cls, architecture=None, hidden_size=None, dense_size=None, seed=0,
                   codec=None, feature_groups=None):
        """Random initialization.

        Weights are uniform in [-k, k] with k = 1 / sqrt(fan_in), drawn in float32.
        The forget gate bias starts at 1 and the other biases at 0.
        """
        s = config.settings.section('policy')
        architecture = architecture or s['architecture']
        hidden_size = hidden_size or s['hidden_size']
        dense_size = dense_size or s['dense_size']
        rng = np.random.default_rng(int(seed))
        tensors = OrderedDict()
        for name, shape in parameter_shapes(architecture, hidden_size,
                                            dense_size).items():
            if name.startswith('b'):
                value = np.zeros(shape)
                if name == 'b':
                    value[hidden_size:2 * hidden_size] = 1.0
            else:
                k = 1.0 / math.sqrt(_fan_in(name, hidden_size, dense_size))
                value = rng.uniform(-k, k, size=shape).astype(np.float32)
            tensors[name] = value.astype(float)
        return cls(architecture, hidden_size, dense_size, tensors, codec,
                   feature_groups)

    @classmethod
    def zeros(cls, architecture='lstm', hidden_size=4, dense_size=3, value_head=False):
        tensors = OrderedDict(
            (name, np.zeros(shape)) for name, shape in
            parameter_shapes(architecture, hidden_size, dense_size, value_head).items())
        return cls(architecture, hidden_size, dense_size, tensors)

    @property
    def has_value_head(self):
        return 'Vw' in self.tensors

    @property
    def names(self):
        return list(self.tensors.keys())

    @property
    def log_std(self):
        return float(self.tensors['log_std'][0]) if self.has_value_head else None

    def __getitem__(self, name):
        return self.tensors[name]

    def _derive(self, tensors):
        return PolicyParams(self.architecture, self.hidden_size, self.dense_size,
                            tensors, self.codec, self.feature_groups)

    def copy(self):
        return self._derive(OrderedDict((k, v.copy()) for k, v in self.tensors.items()))

    def rounded(self):
        """A copy with every tensor rounded to float32 precision."""
        return self._derive(OrderedDict(
            (k, v.astype(np.float32).astype(float)) for k, v in self.tensors.items()))

    def with_value_head(self, seed=0, log_std=None):
        """A copy with a fresh value head and exploration log std."""
        if self.has_value_head:
            return self.copy()
        rng = np.random.default_rng(int(seed))
        k = 1.0 / math.sqrt(self.hidden_size)
        tensors = OrderedDict((k_, v.copy()) for k_, v in self.tensors.items())
        tensors['Vw'] = rng.uniform(-k, k, size=(self.hidden_size, 1)).astype(
            np.float32).astype(float)
        tensors['Vb'] = np.zeros(1)
        log_std = config.settings.get('ppo.initial_log_std') if log_std is None \
            else log_std
        tensors['log_std'] = np.array([float(log_std)])
        return self._derive(tensors)

    def without_value_head(self):
        return self._derive(OrderedDict(
            (k, v.copy()) for k, v in self.tensors.items() if k not in VALUE_HEAD))

    def policy_tensors(self):
        """Names of the tensors on the action path."""
        return [n for n in self.tensors if n not in VALUE_HEAD]

    def is_finite(self):
        return all(np.all(np.isfinite(v)) for v in self.tensors.values())

    def count(self):
        return sum(v.size for v in self.tensors.values())

    def __eq__(self, other):
        if not isinstance(other, PolicyParams):
            return False
        return self.architecture == other.architecture and \
            self.hidden_size == other.hidden_size and \
            self.dense_size == other.dense_size and \
            self.codec == other.codec and \
            self.feature_groups == other.feature_groups and \
            self.names == other.names and \
            all(np.array_equal(self.tensors[n], other.tensors[n]) for n in self.names)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'PolicyParams::{}::H{}::D{}{}'.format(
            self.architecture, self.hidden_size, self.dense_size,
            '::value' if self.has_value_head else '')


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def initial_hidden(params, batch=None):
    """Zero hidden state (h, c). The mlp tag has no hidden state."""
    if params.architecture != 'lstm':
        return None
    shape = (params.hidden_size,) if batch is None else (batch, params.hidden_size)
    return np.zeros(shape), np.zeros(shape)


def _check_obs(obs):
    values = getattr(obs, 'values', obs)
    values = np.asarray(values, dtype=float)
    if values.shape[-1:] != (OBSERVATION_SIZE,):
        raise ContractViolationError(
            'Observations must have {} entries: got shape {}.'.format(
                OBSERVATION_SIZE, values.shape))
    return values


def _head(params, h):
    t = params.tensors
    a1 = np.dot(h, t['W1']) + t['b1']
    r = np.maximum(a1, 0.0)
    y = np.dot(r, t['W2'])[..., 0] + t['b2'][0]
    return a1, r, sigmoid(y)


def forward(params, obs, hidden=None):
    """One policy step.

    Args:
        params: PolicyParams.
        obs: An Observation or an array of 64 values.
        hidden: (h, c) of the previous step. None starts a call.

    Returns:
        (a_norm, hidden'). a_norm is in (0, 1).
    """
    x = _check_obs(obs) * params.feature_mask
    if x.ndim != 1:
        raise ContractViolationError('forward expects a single observation.')
    t = params.tensors
    if params.architecture == 'lstm':
        h, c = hidden if hidden is not None else initial_hidden(params)
        H = params.hidden_size
        z = np.dot(x, t['Wx']) + np.dot(h, t['Wh']) + t['b']
        i, f = sigmoid(z[:H]), sigmoid(z[H:2 * H])
        g, o = np.tanh(z[2 * H:3 * H]), sigmoid(z[3 * H:])
        c = f * c + i * g
        h = o * np.tanh(c)
        hidden = (h, c)
    else:
        h = np.tanh(np.dot(x, t['We']) + t['be'])
        hidden = None
    _, _, a = _head(params, h)
    return float(a), hidden


def value(params, h):
    t = params.tensors
    return np.dot(h, t['Vw'])[..., 0] + t['Vb'][0]


def pad(sequences):
    """Pad sequences of (T_i, 64) observations into (B, T, 64) and lengths."""
    arrays = [_check_obs(s).reshape(-1, OBSERVATION_SIZE) for s in sequences]
    lengths = np.array([len(a) for a in arrays], dtype=int)
    steps = int(lengths.max()) if len(lengths) else 0
    batch = np.zeros((len(arrays), steps, OBSERVATION_SIZE))
    for count, a in enumerate(arrays):
        batch[count, :len(a)] = a
    return batch, lengths


def forward_batch(params, sequences):
    """Forward a batch of whole calls.

    Args:
        params: PolicyParams.
        sequences: List of (T_i, 64) observation arrays.

    Returns:
        (actions, values, cache). actions and values are (B, T) arrays of the
        padded batch; values is None without a value head.
    """
    X, lengths = pad(sequences)
    X = X * params.feature_mask
    B, T, _ = X.shape
    t = params.tensors
    cache = {'X': X, 'lengths': lengths}
    if params.architecture == 'lstm':
        H = params.hidden_size
        h, c = initial_hidden(params, B)
        hs = np.zeros((B, T, H))
        steps = []
        for k in range(T):
            z = np.dot(X[:, k], t['Wx']) + np.dot(h, t['Wh']) + t['b']
            i, f = sigmoid(z[:, :H]), sigmoid(z[:, H:2 * H])
            g, o = np.tanh(z[:, 2 * H:3 * H]), sigmoid(z[:, 3 * H:])
            c_prev, h_prev = c, h
            c = f * c_prev + i * g
            tc = np.tanh(c)
            h = o * tc
            hs[:, k] = h
            steps.append((h_prev, c_prev, i, f, g, o, tc))
        cache['steps'] = steps
    else:
        hs = np.tanh(np.dot(X, t['We']) + t['be'])
    a1, r, actions = _head(params, hs)
    cache.update(hs=hs, a1=a1, r=r, actions=actions)
    values = value(params, hs) if params.has_value_head else None
    return actions, values, cache


def forward_sequence(params, observations):
    """Forward one call. Returns (actions, values, cache) of length T."""
    actions, values, cache = forward_batch(params, [observations])
    return actions[0], None if values is None else values[0], cache


def backward_batch(params, cache, d_actions, d_values=None):
    """Reverse accumulation through the decode layers and through time.

    Args:
        params: PolicyParams used in forward_batch.
        cache: Cache of forward_batch.
        d_actions: (B, T) gradient of the loss w.r.t. the sigmoid outputs.
        d_values: Optional (B, T) gradient w.r.t. the value head outputs.

    Returns:
        OrderedDict of gradients for every tensor (zeros for log_std).
    """
    t = params.tensors
    grads = OrderedDict((n, np.zeros_like(v)) for n, v in t.items())
    X, hs, a1, r, a = cache['X'], cache['hs'], cache['a1'], cache['r'], \
        cache['actions']
    B, T, _ = X.shape
    if B == 0 or T == 0:
        return grads
    H, D = params.hidden_size, params.dense_size

    d_y = np.asarray(d_actions, dtype=float).reshape(B, T) * a * (1.0 - a)
    grads['W2'][:, 0] = np.dot(r.reshape(-1, D).T, d_y.reshape(-1))
    grads['b2'][0] = d_y.sum()
    d_a1 = d_y[..., None] * t['W2'][:, 0] * (a1 > 0)
    grads['W1'] = np.dot(hs.reshape(-1, H).T, d_a1.reshape(-1, D))
    grads['b1'] = d_a1.reshape(-1, D).sum(axis=0)
    d_h = np.dot(d_a1, t['W1'].T)

    if d_values is not None and params.has_value_head:
        d_v = np.asarray(d_values, dtype=float).reshape(B, T)
        grads['Vw'][:, 0] = np.dot(hs.reshape(-1, H).T, d_v.reshape(-1))
        grads['Vb'][0] = d_v.sum()
        d_h = d_h + d_v[..., None] * t['Vw'][:, 0]

    if params.architecture == 'mlp':
        d_pre = d_h * (1.0 - hs ** 2)
        grads['We'] = np.dot(X.reshape(-1, OBSERVATION_SIZE).T, d_pre.reshape(-1, H))
        grads['be'] = d_pre.reshape(-1, H).sum(axis=0)
        return grads

    dh_next = np.zeros((B, H))
    dc_next = np.zeros((B, H))
    for k in reversed(range(T)):
        h_prev, c_prev, i, f, g, o, tc = cache['steps'][k]
        dh = d_h[:, k] + dh_next
        do = dh * tc
        dc = dh * o * (1.0 - tc ** 2) + dc_next
        dz = np.concatenate([dc * g * i * (1.0 - i),
                             dc * c_prev * f * (1.0 - f),
                             dc * i * (1.0 - g ** 2),
                             do * o * (1.0 - o)], axis=1)
        dc_next = dc * f
        grads['Wx'] += np.dot(X[:, k].T, dz)
        grads['Wh'] += np.dot(h_prev.T, dz)
        grads['b'] += dz.sum(axis=0)
        dh_next = np.dot(dz, t['Wh'].T)
    return grads


def _unpack(sample):
    if hasattr(sample, 'observations'):
        return sample.observations, sample.actions
    return sample


def backward(params, batch, loss_fn='mse', normalizer=None, chunk_size=32,
             batch_index=0):
    """Loss and exact gradients for a batch of whole calls.

    The loss of a call is the mean squared error between the policy outputs and
    the target actions over its steps. The batch loss is the sum over calls
    divided by normalizer (Default: batch size). Chunks of chunk_size calls
    are accumulated in batch order.

    Args:
        params: PolicyParams.
        batch: List of Trajectory objects or (observations, targets) pairs.
        loss_fn: Only mse is supported.
        normalizer: Divisor of the summed per-call losses.
        chunk_size: Calls per forward pass.
        batch_index: Reported in TrainingError.

    Returns:
        (loss, gradients)
    """
    if loss_fn != 'mse':
        raise ConfigurationError('loss function', loss_fn, ['mse'])
    normalizer = float(normalizer or max(len(batch), 1))
    grads = OrderedDict((n, np.zeros_like(v)) for n, v in params.tensors.items())
    total = 0.0
    for start in range(0, len(batch), chunk_size):
        chunk = [_unpack(s) for s in batch[start:start + chunk_size]]
        chunk = [(np.asarray(o), np.asarray(y, dtype=float)) for o, y in chunk
                 if len(o)]
        if not chunk:
            continue
        actions, _, cache = forward_batch(params, [o for o, _ in chunk])
        B, T = actions.shape
        targets = np.zeros((B, T))
        weights = np.zeros((B, T))
        for count, (o, y) in enumerate(chunk):
            targets[count, :len(y)] = y
            weights[count, :len(y)] = 1.0 / len(y)
        err = (actions - targets) * (weights > 0)
        total += float(np.sum(weights * err ** 2))
        part = backward_batch(params, cache, 2.0 * weights * err / normalizer)
        for n in grads:
            grads[n] += part[n]
    loss = total / normalizer
    if not math.isfinite(loss):
        raise TrainingError(loss, batch_index)
    return loss, grads


def predict_actions(params, observations):
    """Open-loop actions of one call on stored observations."""
    if not len(observations):
        return np.zeros(0)
    actions, _, _ = forward_sequence(params, observations)
    return actions
