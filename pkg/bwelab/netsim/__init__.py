"""Discrete-time simulator of a single bottleneck link.

run_episode lives in bwelab.netsim.episode.
"""
from .packet import Packet, MEDIA_TYPES
from .lossmodel import LossModel, LossChannel
from .trace import NetworkTrace, TraceEnvironment, generate_trace, stable_trace, \
    PROFILES, TARGETS
from .link import SimState, step

__all__ = ['Packet', 'MEDIA_TYPES', 'LossModel', 'LossChannel', 'NetworkTrace',
           'TraceEnvironment', 'generate_trace', 'stable_trace', 'PROFILES',
           'TARGETS', 'SimState', 'step']
