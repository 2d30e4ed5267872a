import unittest

import pytest

from bwelab.media import CALL_KINDS, MediaConfig, encode_step, offered_kbps, \
    sample_call_config


class MediaTestCase(unittest.TestCase):
    """Test for (bwelab/media.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.video = MediaConfig('audio_video', 0)

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        pass

    def test_default_values(self):
        assert self.video.audio_rate_kbps == 24
        assert self.video.packet_mtu_bytes == 1200
        assert self.video.probe_interval_ms == 2000
        assert self.video.estimate_feedback_delay_ms is None
        assert MediaConfig.from_json(self.video.to_json()) == self.video

    def test_offered_rate(self):
        """Offered rate follows a steady estimate."""
        for k in range(40):
            packets = encode_step(self.video, 1000, k * 60)
            assert offered_kbps(packets) == pytest.approx(1000, rel=0.01)

    def test_step_packets(self):
        """Audio frames, probes and video in send order."""
        packets = encode_step(self.video, 1000, 0, first_seq=10)
        media = [p.media for p in packets]
        assert media.count('audio') == 3
        assert media.count('probe') == 3
        assert media.count('video') == 6
        assert [p.seq for p in packets] == list(range(10, 10 + len(packets)))
        times = [p.send_ts_ms for p in packets]
        assert times == sorted(times)
        assert all(0 <= t < 60 for t in times)
        assert max(p.size_bytes for p in packets) <= 1200

    def test_no_probe_between_bursts(self):
        packets = encode_step(self.video, 1000, 60)
        assert 'probe' not in [p.media for p in packets]
        assert [p.media for p in packets].count('video') == 7

    def test_audio_only(self):
        cfg = MediaConfig('audio_only')
        packets = encode_step(cfg, 5000, 60)
        assert set(p.media for p in packets) == {'audio'}
        assert offered_kbps(packets) == pytest.approx(24)

    def test_video_start(self):
        """No video before the video start time."""
        cfg = MediaConfig('audio_video', 3000)
        assert 'video' not in [p.media for p in encode_step(cfg, 1000, 2940)]
        assert 'video' in [p.media for p in encode_step(cfg, 1000, 3000)]

    def test_screenshare(self):
        """Screen sharing takes its share of the media budget."""
        cfg = MediaConfig('audio_video_screenshare', 0)
        packets = encode_step(cfg, 1000, 60)
        screen = sum(p.size_bytes for p in packets if p.media == 'screenshare')
        video = sum(p.size_bytes for p in packets if p.media == 'video')
        assert 2195 <= screen <= 2196
        assert screen + video == 7320

    def test_estimate_is_clamped(self):
        assert offered_kbps(encode_step(self.video, 1e9, 60)) <= 8000
        floor = encode_step(self.video, 0, 60)
        assert [p.media for p in floor] == ['audio'] * 3

    def test_feedback_delay_steps(self):
        assert self.video.feedback_delay_steps(0) == 0
        assert self.video.feedback_delay_steps(10) == 1
        assert self.video.feedback_delay_steps(100) == 2
        cfg = MediaConfig(estimate_feedback_delay_ms=180)
        assert cfg.feedback_delay_steps(10) == 3

    def test_sample_call_config(self):
        """Sampling is deterministic and covers every call kind."""
        assert sample_call_config(5) == sample_call_config(5)
        configs = [sample_call_config(seed) for seed in range(2000)]
        assert set(c.call_kind for c in configs) == set(CALL_KINDS)
        assert all(0 <= c.video_start_ms <= 10000 for c in configs)

    def test_assertions_exceptions(self):
        with pytest.raises(ValueError):
            MediaConfig('video_only')
        with pytest.raises(ValueError):
            MediaConfig(packet_mtu_bytes=50)
        with pytest.raises(AttributeError):
            self.video.bitrate = 10


if __name__ == "__main__":
    unittest.main()
