# coding=utf-8
"""Estimate-driven sender of a videoconferencing call.

The sender turns the applied bandwidth estimate into packets for one 60 ms
step: constant-rate audio, video (and screen sharing) at the remaining budget,
and periodic probe bursts.
"""
import math

import numpy as np

from . import config
from ._frozen import frozen
from .datatype import Number, Tuple, Value
from .netsim.packet import Packet

CALL_KINDS = ('audio_only', 'audio_video', 'audio_video_screenshare')

AUDIO_FRAME_MS = 20


@frozen
class MediaConfig(object):
    """Sender configuration of a call.

    Attributes:
        call_kind: audio_only, audio_video or audio_video_screenshare.
        video_start_ms: Time when video (and screen sharing) starts.
        audio_rate_kbps: Constant audio rate.
        packet_mtu_bytes: Largest packet size.
        probe_interval_ms: Time between probe bursts.
        estimate_feedback_delay_ms: Delay before the sender uses a new
            estimate. None uses the propagation delay of the trace.
        probe_packets: Number of packets in a probe burst.
        probe_size_bytes: Size of a probe packet.
        screenshare_share: Share of the media budget for screen sharing.
    """

    call_kind = Value('call_kind', 'call kind', accepted_inputs=CALL_KINDS,
                      default_value='audio_video')
    video_start_ms = Number('video_start_ms', 'video start time', num_type=int,
                            check_positive=True, default_value=0)
    audio_rate_kbps = Number('audio_rate_kbps', 'audio rate', check_positive=True)
    packet_mtu_bytes = Number('packet_mtu_bytes', 'packet mtu', num_type=int,
                              valid_range=(100, 9000))
    probe_interval_ms = Number('probe_interval_ms', 'probe interval', num_type=int,
                               check_positive=True)
    estimate_feedback_delay_ms = Number('estimate_feedback_delay_ms',
                                        'estimate feedback delay', num_type=int,
                                        check_positive=True)
    probe_packets = Number('probe_packets', 'packets per probe burst', num_type=int,
                           check_positive=True)
    probe_size_bytes = Number('probe_size_bytes', 'probe packet size', num_type=int,
                              valid_range=(1, 9000))
    screenshare_share = Number('screenshare_share', 'screen sharing share',
                               valid_range=(0, 1))

    def __init__(self, call_kind='audio_video', video_start_ms=0,
                 audio_rate_kbps=None, packet_mtu_bytes=None, probe_interval_ms=None,
                 estimate_feedback_delay_ms=None, probe_packets=None,
                 probe_size_bytes=None, screenshare_share=None):
        s = config.settings.section('media')
        self.call_kind = call_kind
        self.video_start_ms = video_start_ms
        self.audio_rate_kbps = s['audio_rate_kbps'] if audio_rate_kbps is None \
            else audio_rate_kbps
        self.packet_mtu_bytes = packet_mtu_bytes or s['packet_mtu_bytes']
        self.probe_interval_ms = probe_interval_ms or s['probe_interval_ms']
        self.estimate_feedback_delay_ms = estimate_feedback_delay_ms
        self.probe_packets = s['probe_packets'] if probe_packets is None \
            else probe_packets
        self.probe_size_bytes = probe_size_bytes or s['probe_size_bytes']
        self.screenshare_share = s['screenshare_share'] if screenshare_share is None \
            else screenshare_share

    def feedback_delay_steps(self, prop_delay_ms):
        """Number of steps before an estimate reaches the sender."""
        delay = prop_delay_ms if self.estimate_feedback_delay_ms is None \
            else self.estimate_feedback_delay_ms
        return int(math.ceil(delay / float(config.step_ms)))

    @property
    def has_video(self):
        return self.call_kind != 'audio_only'

    @classmethod
    def from_json(cls, data):
        return cls(**data)

    def to_json(self):
        return {
            'call_kind': self.call_kind,
            'video_start_ms': self.video_start_ms,
            'audio_rate_kbps': self.audio_rate_kbps,
            'packet_mtu_bytes': self.packet_mtu_bytes,
            'probe_interval_ms': self.probe_interval_ms,
            'estimate_feedback_delay_ms': self.estimate_feedback_delay_ms,
            'probe_packets': self.probe_packets,
            'probe_size_bytes': self.probe_size_bytes,
            'screenshare_share': self.screenshare_share
        }

    def __eq__(self, other):
        return isinstance(other, MediaConfig) and self.to_json() == other.to_json()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'MediaConfig::{}::video@{}ms'.format(self.call_kind, self.video_start_ms)


def sample_call_config(seed):
    """Sample a call configuration.

    Call kinds are mixed with the media.call_kind_weights probabilities and the
    video start time is uniform in [0, media.video_start_max_ms].
    """
    s = config.settings.section('media')
    rng = np.random.default_rng(int(seed))
    weights = np.asarray(s['call_kind_weights'], dtype=float)
    kind = CALL_KINDS[int(rng.choice(len(CALL_KINDS), p=weights / weights.sum()))]
    video_start = int(rng.integers(0, s['video_start_max_ms'] + 1))
    return MediaConfig(kind, video_start)


def _packetize(budget, mtu, media, t_ms, dt_ms):
    """Split a byte budget into equal packets spread evenly over the step."""
    budget = int(budget)
    if budget <= 0:
        return []
    count = -(-budget // mtu)
    size, extra = divmod(budget, count)
    spacing = dt_ms / float(count)
    return [(t_ms + k * spacing, size + (1 if k < extra else 0), media)
            for k in range(count)]


def encode_step(cfg, estimate_kbps, t_ms, first_seq=0):
    """Packets the sender emits in the step that starts at t_ms.

    Args:
        cfg: MediaConfig.
        estimate_kbps: The applied bandwidth estimate. Clamped to [10, 8000].
        t_ms: Step start time.
        first_seq: Sequence number of the first packet.

    Returns:
        A list of packets ordered by send time with consecutive sequence numbers.
    """
    dt = config.step_ms
    estimate = min(max(float(estimate_kbps), config.min_kbps), config.max_kbps)
    items = []

    frame_bytes = int(round(cfg.audio_rate_kbps * AUDIO_FRAME_MS / 8.0))
    if frame_bytes > 0:
        tick = int(math.ceil(t_ms / float(AUDIO_FRAME_MS))) * AUDIO_FRAME_MS
        while tick < t_ms + dt:
            items.append((float(tick), frame_bytes, 'audio'))
            tick += AUDIO_FRAME_MS

    budget = int(math.floor(max(estimate - cfg.audio_rate_kbps, 0.0) * dt / 8.0))

    if cfg.probe_packets and t_ms % cfg.probe_interval_ms < dt:
        for k in range(cfg.probe_packets):
            items.append((float(t_ms) + k, cfg.probe_size_bytes, 'probe'))
        budget = max(budget - cfg.probe_packets * cfg.probe_size_bytes, 0)

    if cfg.has_video and t_ms >= cfg.video_start_ms:
        mtu = cfg.packet_mtu_bytes
        if cfg.call_kind == 'audio_video_screenshare':
            screen = int(budget * cfg.screenshare_share)
            items.extend(_packetize(screen, mtu, 'screenshare', t_ms, dt))
            budget -= screen
        items.extend(_packetize(budget, mtu, 'video', t_ms, dt))

    order = {'audio': 0, 'probe': 1, 'video': 2, 'screenshare': 3}
    items.sort(key=lambda x: (x[0], order[x[2]]))
    return [Packet(first_seq + count, size, media, ts)
            for count, (ts, size, media) in enumerate(items)]


def offered_kbps(packets, dt_ms=None):
    """Offered rate of a list of packets over dt_ms."""
    dt_ms = dt_ms or config.step_ms
    return sum(p.size_bytes for p in packets) * 8.0 / dt_ms
