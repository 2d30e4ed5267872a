"""Media packet."""

MEDIA_TYPES = ('video', 'audio', 'screenshare', 'probe')


class Packet(object):
    """A media packet that crosses the bottleneck link.

    Attributes:
        seq: Sequence number.
        size_bytes: Packet size in bytes (> 0).
        media: One of video, audio, screenshare or probe.
        send_ts_ms: Send time in milliseconds.
        arrive_ts_ms: Arrival time in milliseconds. None while the packet is in
            flight or if it is lost.
        queue_time_ms: Time spent at the bottleneck (waiting and draining).
    """

    __slots__ = ('seq', 'size_bytes', 'media', 'send_ts_ms', 'arrive_ts_ms',
                 'queue_time_ms', 'lost')

    def __init__(self, seq, size_bytes, media, send_ts_ms):
        assert size_bytes > 0, 'Packet size must be positive: {}'.format(size_bytes)
        assert media in MEDIA_TYPES, \
            '{} is not a valid media type. Use one of {}.'.format(media, MEDIA_TYPES)
        self.seq = int(seq)
        self.size_bytes = int(size_bytes)
        self.media = media
        self.send_ts_ms = float(send_ts_ms)
        self.arrive_ts_ms = None
        self.queue_time_ms = 0.0
        self.lost = False

    @property
    def delivered(self):
        """True if the packet has arrived at the receiver."""
        return self.arrive_ts_ms is not None

    @property
    def delay_ms(self):
        """One-way delay of a delivered packet."""
        if self.arrive_ts_ms is None:
            return None
        return self.arrive_ts_ms - self.send_ts_ms

    def mark_lost(self):
        self.lost = True
        self.arrive_ts_ms = None
        self.queue_time_ms = 0.0

    def to_json(self):
        return {'seq': self.seq, 'size': self.size_bytes, 'media': self.media,
                'send': self.send_ts_ms, 'arrive': self.arrive_ts_ms,
                'queue': self.queue_time_ms, 'lost': self.lost}

    def __repr__(self):
        state = 'LOST' if self.lost else self.arrive_ts_ms
        return 'Packet::{}::{}::{}B::{}->{}'.format(
            self.seq, self.media, self.size_bytes, self.send_ts_ms, state)
