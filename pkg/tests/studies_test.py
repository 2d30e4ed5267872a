import math
import os
import shutil
import tempfile
import unittest

import numpy as np
import pytest

from bwelab.demostore import DemoSet, collect
from bwelab.evaluation import studies
from bwelab.exception import ContractViolationError, EmptyDatasetError
from bwelab.netsim.trace import TraceEnvironment, stable_trace
from bwelab.policy.network import PolicyParams
from bwelab.trajectory import Trajectory
from bwelab.training.bc import BcConfig
from bwelab.training.ppo import PpoConfig


class StudiesTestCase(unittest.TestCase):
    """Test for (bwelab/evaluation/studies.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.folder = tempfile.mkdtemp()
        rng = np.random.default_rng(6)
        self.demos = DemoSet([
            Trajectory(rng.uniform(size=(10, 64)), rng.uniform(100, 3000, size=10))
            for _ in range(8)])
        self.cfg = BcConfig(batch_size=4, epochs=2, lr=0.01, holdout_fraction=0.25,
                            architecture='lstm', hidden_size=4, dense_size=3)
        self.traces = [stable_trace(1000, duration_ms=1200, seed=1)]

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        shutil.rmtree(self.folder, ignore_errors=True)

    def test_default_subsets(self):
        subsets = studies.default_subsets()
        assert len(subsets) == 7
        assert subsets[0] == ['recv_rate']
        assert subsets[-1] == ['recv_rate', 'queue_delay', 'loss_ratio', 'avg_lost',
                               'media_type']
        assert studies.subset_name(['recv_rate', 'media_type']) == \
            'recv_rate+media_type'

    def test_nested_subsets(self):
        """Smaller subsets are contained in the larger ones."""
        subsets = studies.nested_subsets(10, [2, 5, 10], seed=3)
        assert [len(s) for s in subsets] == [2, 5, 10]
        assert set(subsets[0]) <= set(subsets[1]) <= set(subsets[2])
        assert subsets[2] == list(range(10))
        assert studies.nested_subsets(10, [2, 5, 10], seed=3) == subsets
        for sizes in ([], [0, 2], [5, 2], [2, 11]):
            with pytest.raises(ContractViolationError):
                studies.nested_subsets(10, sizes)

    def test_ablate_features(self):
        reports = studies.ablate_features(self.demos, [['recv_rate']], self.cfg,
                                          report_dir=self.folder)
        assert list(reports) == \
            ['recv_rate', 'recv_rate+queue_delay+loss_ratio+avg_lost+media_type']
        for report in reports.values():
            assert len(report.values) == 2
            assert math.isfinite(report.mean)
        assert os.path.isfile(os.path.join(self.folder, 'cdf_recv_rate.csv'))
        assert os.path.isfile(os.path.join(self.folder, 'summary.json'))
        with pytest.raises(EmptyDatasetError):
            studies.ablate_features(DemoSet(), [['recv_rate']], self.cfg)

    def test_data_scaling(self):
        path = os.path.join(self.folder, 'scaling.csv')
        rows = studies.data_scaling_study(self.demos, [2, 4, 6], self.cfg, path)
        assert [size for size, _ in rows] == [2, 4, 6]
        assert all(math.isfinite(mse) for _, mse in rows)
        assert os.path.isfile(path)
        with pytest.raises(ContractViolationError):
            studies.data_scaling_study(self.demos, [7], self.cfg)

    def test_closed_loop_error(self):
        """A constant policy is far from the expert on a 1 Mbps link."""
        error = studies.closed_loop_error(PolicyParams.zeros(), self.traces)
        assert error > 0.1
        assert math.isnan(studies.closed_loop_error(PolicyParams.zeros(), []))

    def test_compare_architectures(self):
        result = studies.compare_architectures(self.demos, self.cfg, self.traces)
        assert list(result) == ['lstm', 'mlp']
        for entry in result.values():
            assert math.isfinite(entry['holdout_mse'])
            assert math.isfinite(entry['closed_loop_error'])
        result = studies.compare_architectures(self.demos, self.cfg,
                                               architectures=('mlp',))
        assert result['mlp']['closed_loop_error'] is None

    def test_dagger_study(self):
        """One round doubles the training calls."""
        demos = collect(4, ['low_bw', 'high_bw'], seed=1, duration_ms=1200)
        rows = studies.dagger_study(demos, self.cfg, rounds=1)
        assert [(r, n) for r, n, _ in rows] == [(0, 3), (1, 6)]
        assert all(math.isfinite(mse) for _, _, mse in rows)
        with pytest.raises(ContractViolationError):
            studies.dagger_study(demos, self.cfg, rounds=0)

    def test_personalization(self):
        env = TraceEnvironment(target='stable:1000', duration_ms=1200)
        pretrained = PolicyParams.initialize('lstm', 4, 3, seed=1)
        ppo_cfg = PpoConfig(episodes_per_update=1, epochs_per_update=1, kl_target=1.0)
        result = studies.personalization_study(
            pretrained, env, seeds=(0,), episodes=1, holdout=2, ppo_cfg=ppo_cfg,
            report_dir=self.folder)
        assert list(result) == ['ukf', 'pretrained', 'finetuned']
        for entry in result.values():
            assert math.isfinite(entry['qoe'])
            assert entry['mean_estimate_kbps'] > 0
        assert os.path.isfile(os.path.join(self.folder, 'personalization.json'))

    def test_offline_online(self):
        env = TraceEnvironment(target='stable:1000', duration_ms=1200)
        pretrained = PolicyParams.initialize('lstm', 4, 3, seed=1)
        ppo_cfg = PpoConfig(episodes_per_update=1, epochs_per_update=1, kl_target=1.0)
        result = studies.offline_online_study(
            pretrained, env, kl_penalties=(0.5,), finetune_episodes=1,
            scratch_episodes=2, holdout=2, ppo_cfg=ppo_cfg)
        assert list(result) == ['finetuned', 'scratch']
        for entry in result.values():
            assert len(entry['holdout_qoe']) == 1
            assert entry['max_qoe'] == entry['mean_qoe']
            assert entry['std_qoe'] == 0
        assert result['scratch']['episodes_to_95'] in (1, 2)


if __name__ == "__main__":
    unittest.main()
