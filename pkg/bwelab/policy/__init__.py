"""Learnable estimator: policy network, action codec, parameter files and Adam."""
from .codec import ActionCodec, encode_action, decode_action
from .network import PolicyParams, forward, forward_sequence, forward_batch, \
    backward, backward_batch, ARCHITECTURES
from .paramfile import save_params, load_params
from .optim import Adam

__all__ = ['ActionCodec', 'encode_action', 'decode_action', 'PolicyParams',
           'forward', 'forward_sequence', 'forward_batch', 'backward',
           'backward_batch', 'ARCHITECTURES', 'save_params', 'load_params', 'Adam']
