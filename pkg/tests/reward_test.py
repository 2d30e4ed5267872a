import unittest

import numpy as np
import pytest

from bwelab.features import IntervalStats
from bwelab.reward import QoeReward, compute_reward
from bwelab.trajectory import EpisodeMetrics, Trajectory


class QoeRewardTestCase(unittest.TestCase):
    """Test for (bwelab/reward.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.reward = QoeReward()

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        pass

    def test_default_values(self):
        assert self.reward.weights == (0.6, 0.2, 0.2)
        assert self.reward.delay_norm_ms == 400
        assert self.reward.bounds == pytest.approx((-0.4, 0.6))

    def test_reward(self):
        """0.6 * 0.5 - 0.2 * 1 - 0.2 * 1."""
        assert self.reward(282.842712474619, 400, 1.0) == pytest.approx(-0.1)
        assert self.reward(8000, 0, 0) == pytest.approx(0.6)
        assert self.reward(0, 1e6, 2.0) == pytest.approx(-0.4)

    def test_components(self):
        assert self.reward.components(10, 200, 0.1) == \
            pytest.approx((0.0, 0.5, 0.1))
        assert self.reward.components(100, -10, -0.5) == \
            pytest.approx((np.log(10) / np.log(800), 0.0, 0.0))

    def test_compute_reward(self):
        stats = IntervalStats(recv_rate_kbps=8000, mean_delay_ms=200, loss_ratio=0)
        assert compute_reward(stats) == pytest.approx(0.5)
        assert compute_reward(stats, (1, 0, 0)) == pytest.approx(1.0)

    def test_json(self):
        reward = QoeReward((0.5, 0.3, 0.2), 300)
        assert QoeReward.from_json(reward.to_json()).to_json() == reward.to_json()

    def test_assertions_exceptions(self):
        with pytest.raises(ValueError):
            QoeReward((0.6, 0.4))
        with pytest.raises(ValueError):
            QoeReward((0.6, 0.2, -0.2))
        with pytest.raises(ValueError):
            QoeReward(delay_norm_ms=0.5)


class TrajectoryTestCase(unittest.TestCase):
    """Test for (bwelab/trajectory.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        rng = np.random.default_rng(0)
        self.trajectory = Trajectory(rng.uniform(size=(4, 64)), [10, 100, 1000, 8000],
                                     rewards=[[1, 0, 0], [0, 1, 0], [0, 0, 1],
                                              [0.5, 0.5, 0.5]])

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        pass

    def test_actions(self):
        """Labels are log normalized."""
        assert self.trajectory.actions[0] == pytest.approx(0.0)
        assert self.trajectory.actions[-1] == pytest.approx(1.0)
        assert np.array_equal(self.trajectory.estimates_kbps,
                              self.trajectory.actions_kbps)
        assert self.trajectory.observations.dtype == np.float32

    def test_qoe(self):
        assert self.trajectory.qoe() == pytest.approx(np.array([0.6, -0.2, -0.2, 0.1]))

    def test_relabel(self):
        relabeled = self.trajectory.relabel([1000] * 4)
        assert relabeled != self.trajectory
        assert np.array_equal(relabeled.estimates_kbps,
                              self.trajectory.estimates_kbps)
        assert np.all(relabeled.actions_kbps == 1000)

    def test_metrics_json(self):
        metrics = EpisodeMetrics(900.0, 0.01, 40.0, 0.3, steps=10)
        assert EpisodeMetrics.from_json(metrics.to_json()).to_json() == \
            metrics.to_json()
        with pytest.raises(AssertionError):
            EpisodeMetrics(float('nan'), 0, 0, 0)


if __name__ == "__main__":
    unittest.main()
