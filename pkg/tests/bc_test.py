import os
import shutil
import tempfile
import unittest

import numpy as np
import pytest

from bwelab.exception import EmptyDatasetError, LayoutMismatchError
from bwelab.policy.network import PolicyParams
from bwelab.training.bc import BcConfig, MseReport, TrainingCurve, evaluate_mse, \
    split, train


class BcTestCase(unittest.TestCase):
    """Test for (bwelab/training/bc.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.folder = tempfile.mkdtemp()
        rng = np.random.default_rng(4)
        self.samples = [(rng.uniform(size=(10, 64)), np.full(10, 0.8))
                        for _ in range(8)]
        self.cfg = BcConfig(batch_size=4, epochs=150, lr=0.01, seed=0,
                            holdout_fraction=0, architecture='lstm',
                            hidden_size=4, dense_size=3)

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        shutil.rmtree(self.folder, ignore_errors=True)

    def test_default_values(self):
        cfg = BcConfig()
        assert cfg.batch_size == 256
        assert cfg.epochs == 1000
        assert cfg.lr == 0.001
        assert cfg.holdout_fraction == 0.1
        assert len(cfg.feature_groups) == 5
        assert BcConfig.from_json(cfg.to_json()).to_json() == cfg.to_json()
        assert cfg.duplicate(epochs=3).epochs == 3

    def test_fit_constant(self):
        """A constant expert action is learned."""
        initial = PolicyParams.initialize('lstm', 4, 3, seed=9)
        before = evaluate_mse(initial, self.samples).mean
        params, curve = train(self.samples, self.cfg)
        after = evaluate_mse(params, self.samples).mean
        assert len(curve) == 150
        assert after < 0.01
        assert after < before
        assert curve.train_mse[-1] < curve.train_mse[0]
        assert params == params.rounded()
        assert not params.has_value_head

    def test_deterministic(self):
        cfg = self.cfg.duplicate(epochs=5)
        params1, curve1 = train(self.samples, cfg)
        params2, curve2 = train(self.samples, cfg)
        assert params1 == params2
        assert curve1.rows == curve2.rows
        params3, _ = train(self.samples, cfg.duplicate(seed=1))
        assert params3 != params1

    def test_feature_groups(self):
        """Inactive feature groups do not change training."""
        cfg = self.cfg.duplicate(epochs=5, feature_groups=['recv_rate', 'queue_delay'])
        rng = np.random.default_rng(7)
        noisy = []
        for obs, actions in self.samples:
            obs = obs.copy()
            obs[:, 20:] = rng.uniform(size=(10, 44))
            noisy.append((obs, actions))
        params1, _ = train(self.samples, cfg)
        params2, _ = train(noisy, cfg)
        assert params1 == params2
        assert params1.feature_groups == ['recv_rate', 'queue_delay']

    def test_resume(self):
        cfg = self.cfg.duplicate(epochs=2)
        params, _ = train(self.samples, cfg)
        resumed, curve = train(self.samples, cfg, params=params)
        assert len(curve) == 2
        assert resumed != params
        # a resumed run depends only on the checkpoint weights
        assert train(self.samples, cfg, params=params)[0] == resumed
        assert params == train(self.samples, cfg)[0]
        with pytest.raises(LayoutMismatchError):
            train(self.samples, cfg.duplicate(feature_groups=['recv_rate']),
                  params=params)

    def test_holdout(self):
        cfg = self.cfg.duplicate(epochs=3, holdout_fraction=0.25)
        path = os.path.join(self.folder, 'curve.csv')
        _, curve = train(self.samples, cfg, curve_path=path)
        assert np.all(np.isfinite(curve.holdout_mse))
        assert curve.best_epoch in (0, 1, 2)
        assert TrainingCurve.from_csv(path).rows == curve.rows

    def test_split(self):
        train_idx, hold_idx = split(list(range(10)), 0.3, 5)
        assert len(hold_idx) == 3
        assert sorted(train_idx + hold_idx) == list(range(10))
        assert split(list(range(10)), 0.3, 5) == (train_idx, hold_idx)
        assert split(list(range(10)), 0.01, 5)[1] != []
        assert split([0], 0.5, 5) == ([0], [])
        assert split(list(range(10)), 0, 5) == (list(range(10)), [])

    def test_evaluate_mse(self):
        path = os.path.join(self.folder, 'cdf.csv')
        targets = [(obs, np.full(10, 0.5)) for obs, _ in self.samples]
        report = evaluate_mse(PolicyParams.zeros(), targets, cdf_path=path)
        assert report.mean == 0
        assert report.cdf()[-1][1] == 1.0
        assert os.path.isfile(path)
        assert MseReport([0.1, 0.3]).median == pytest.approx(0.2)

    def test_zero_epochs(self):
        params, curve = train(self.samples, self.cfg.duplicate(epochs=0))
        assert len(curve) == 0
        assert curve.best_epoch is None
        assert params.is_finite()

    def test_assertions_exceptions(self):
        with pytest.raises(EmptyDatasetError):
            train([], self.cfg)
        with pytest.raises(LayoutMismatchError):
            train([(np.zeros((5, 63)), np.zeros(5))], self.cfg)
        with pytest.raises(LayoutMismatchError):
            train([(np.zeros((5, 64)), np.zeros(4))], self.cfg)
        with pytest.raises(ValueError):
            BcConfig(holdout_fraction=1.0)
        with pytest.raises(ValueError):
            BcConfig(architecture='gru')
        with pytest.raises(ValueError):
            BcConfig(lr=-1)


if __name__ == "__main__":
    unittest.main()
