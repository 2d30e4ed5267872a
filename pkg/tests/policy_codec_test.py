import unittest

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from bwelab.policy.codec import ActionCodec, decode_action, encode_action


class ActionCodecTestCase(unittest.TestCase):
    """Test for (bwelab/policy/codec.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.codec = ActionCodec()

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        pass

    def test_endpoints(self):
        """10 kbps maps to 0 and 8000 kbps to 1 exactly."""
        assert self.codec.encode(10) == 0.0
        assert self.codec.encode(8000) == 1.0
        assert self.codec.decode(0.0) == pytest.approx(10.0, rel=1e-12)
        assert self.codec.decode(1.0) == pytest.approx(8000.0, rel=1e-12)
        assert self.codec.clamped == 0

    def test_midpoint(self):
        """The midpoint is the geometric mean of the bounds."""
        assert self.codec.decode(0.5) == pytest.approx(282.84271247461896)
        assert encode_action(self.codec, 282.84271247461896) == pytest.approx(0.5)
        assert decode_action(self.codec, 0.5) == self.codec.decode(0.5)

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        for kbps in np.exp(rng.uniform(np.log(10), np.log(8000), size=1000)):
            assert abs(self.codec.decode(self.codec.encode(kbps)) - kbps) <= \
                1e-9 * kbps
        actions = rng.uniform(size=100)
        assert np.allclose(self.codec.encode_array(self.codec.decode_array(actions)),
                           actions, rtol=0, atol=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(10.0, 8000.0), st.floats(10.0, 8000.0))
    def test_monotone(self, a, b):
        """Encoding keeps the order of estimates and stays in [0, 1]."""
        low, high = sorted((a, b))
        assert 0.0 <= self.codec.encode(low) <= self.codec.encode(high) <= 1.0
        assert self.codec.decode(self.codec.encode(high)) == pytest.approx(high)

    def test_clamp(self):
        """Out of range inputs are clamped and counted."""
        assert self.codec.encode(5) == 0.0
        assert self.codec.encode(1e5) == 1.0
        assert self.codec.decode(-0.5) == pytest.approx(10.0)
        assert self.codec.clamped == 3
        assert self.codec.encode_array([1, 1e6]).tolist() == pytest.approx([0.0, 1.0])

    def test_custom_bounds(self):
        codec = ActionCodec(100, 1000)
        assert codec.encode(316.22776601683796) == pytest.approx(0.5)
        assert ActionCodec.from_json(codec.to_json()) == codec
        assert codec != self.codec

    def test_assertions_exceptions(self):
        with pytest.raises(ValueError):
            ActionCodec(1000, 100)
        with pytest.raises(ValueError):
            ActionCodec(0, 100)


if __name__ == "__main__":
    unittest.main()
