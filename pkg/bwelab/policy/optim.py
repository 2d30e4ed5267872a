"""Adam optimizer with global-norm gradient clipping."""
from collections import OrderedDict
import math

import numpy as np


def global_norm(grads):
    return math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))


def clip_by_global_norm(grads, max_norm):
    """Scale gradients so their global norm is at most max_norm."""
    norm = global_norm(grads)
    if max_norm and norm > max_norm:
        scale = max_norm / norm
        return OrderedDict((n, g * scale) for n, g in grads.items()), norm
    return grads, norm


class Adam(object):
    """Adam (no weight decay).

    Args:
        lr: Learning rate.
        betas: Exponential decay rates of the moment estimates.
        eps: Denominator term.
        clip_norm: Global gradient norm limit. None or 0 disables clipping.

    Usage:

        optimizer = Adam(lr=0.001)
        optimizer.step(params, grads)
    """

    def __init__(self, lr=0.001, betas=(0.9, 0.999), eps=1e-8, clip_norm=5.0):
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.clip_norm = clip_norm
        self.t = 0
        self.m = OrderedDict()
        self.v = OrderedDict()

    def step(self, params, grads, names=None):
        """Update params in place. Returns the global gradient norm before clipping.

        Args:
            params: PolicyParams.
            grads: OrderedDict of gradients.
            names: Optional subset of tensors to update.
        """
        names = names or list(grads.keys())
        grads, norm = clip_by_global_norm(
            OrderedDict((n, grads[n]) for n in names), self.clip_norm)
        self.t += 1
        b1, b2 = self.betas
        for n in names:
            g = grads[n]
            m = self.m.get(n, np.zeros_like(g))
            v = self.v.get(n, np.zeros_like(g))
            m = b1 * m + (1.0 - b1) * g
            v = b2 * v + (1.0 - b2) * g * g
            self.m[n], self.v[n] = m, v
            m_hat = m / (1.0 - b1 ** self.t)
            v_hat = v / (1.0 - b2 ** self.t)
            params.tensors[n] = params.tensors[n] - \
                self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
        return norm

    def __repr__(self):
        return 'Adam::lr {}::step {}'.format(self.lr, self.t)
