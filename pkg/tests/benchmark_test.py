import json
import os
import shutil
import tempfile
import unittest

import pytest

from bwelab.estimator.base import FunctionEstimator
from bwelab.estimator.baselines import ConstantEstimator
from bwelab.evaluation.benchmark import benchmark_traces, run_benchmark
from bwelab.exception import ContractViolationError
from bwelab.netsim.trace import stable_trace


class BenchmarkTestCase(unittest.TestCase):
    """Test for (bwelab/evaluation/benchmark.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.folder = tempfile.mkdtemp()
        self.traces = [stable_trace(1000, duration_ms=3000, seed=s) for s in (1, 2, 3)]
        self.report = run_benchmark(
            [ConstantEstimator(300), ConstantEstimator(2000)], self.traces)

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        shutil.rmtree(self.folder, ignore_errors=True)

    def test_paired(self):
        """Every estimator sees the same traces and loss seeds."""
        assert len(self.report.episodes) == 6
        assert self.report.estimators == ['constant:300', 'constant:2000']
        for name in self.report.estimators:
            rows = [r for r in self.report.episodes if r['estimator'] == name]
            assert [r['trace_seed'] for r in rows] == [1, 2, 3]
            assert [r['loss_seed'] for r in rows] == [1, 2, 3]
            assert [r['episode'] for r in rows] == [0, 1, 2]

    def test_summary(self):
        """Undershooting a 1 Mbps link beats overshooting it."""
        summary = self.report.summary()
        assert summary['constant:300']['episodes'] == 3
        assert summary['constant:300']['faults'] == 0
        assert summary['constant:300']['mse_vs_expert'] is None
        assert self.report.mean('constant:300', 'qoe') > \
            self.report.mean('constant:2000', 'qoe')
        assert self.report.mean('constant:300', 'loss_rate') == 0
        p = self.report.p_value('constant:2000', 'constant:300', 'qoe')
        assert 0 <= p <= 1
        assert list(self.report.p_values()) == ['constant:300 vs constant:2000']

    def test_faults(self):
        """Faulted episodes are recorded and left out of the statistics."""
        broken = FunctionEstimator(lambda obs: float('nan'), 'broken')
        report = run_benchmark([ConstantEstimator(300), broken], self.traces)
        assert report.faults('broken') == 3
        assert report.summary()['broken']['qoe'] is None
        assert report.p_value('constant:300', 'broken', 'qoe') is None
        assert all(r['fault'] for r in report.episodes if r['estimator'] == 'broken')

    def test_unique_names(self):
        report = run_benchmark([ConstantEstimator(300), ConstantEstimator(300)],
                               self.traces[:1])
        assert report.estimators == ['constant:300', 'constant:300#2']

    def test_write(self):
        self.report.write(self.folder)
        with open(os.path.join(self.folder, 'summary.json')) as inf:
            data = json.load(inf)
        assert data['estimators'] == self.report.estimators
        assert data['manifest']['seeds'] == [1, 2, 3]
        with open(os.path.join(self.folder, 'episodes.csv')) as inf:
            assert len(inf.read().strip().split('\n')) == 7

    def test_benchmark_traces(self):
        traces = benchmark_traces(3, 'stable:800', seed=2)
        again = benchmark_traces(3, 'stable:800', seed=2)
        assert [t.to_json() for t in traces] == [t.to_json() for t in again]
        assert all(t.mean_capacity() == 800 for t in traces)
        assert len({t.seed for t in traces}) == 3

    def test_assertions_exceptions(self):
        with pytest.raises(ContractViolationError):
            run_benchmark([], self.traces)
        with pytest.raises(ContractViolationError):
            run_benchmark([ConstantEstimator(300)], [])
        with pytest.raises(ContractViolationError):
            run_benchmark([ConstantEstimator(300)], self.traces, seeds=[1])


if __name__ == "__main__":
    unittest.main()
