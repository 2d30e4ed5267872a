import os
import shutil
import tempfile
import unittest

import numpy as np
import pytest

from bwelab.estimator.base import Estimator, FunctionEstimator
from bwelab.estimator.baselines import ConstantEstimator, baseline_estimator
from bwelab.estimator.policy import PolicyEstimator
from bwelab.estimator.ukf import UkfEstimator
from bwelab.exception import ConfigurationError
from bwelab.features import Observation
from bwelab.policy.network import PolicyParams
from bwelab.policy.paramfile import save_params


class BaselineTestCase(unittest.TestCase):
    """Test for (bwelab/estimator/base.py) and (bwelab/estimator/baselines.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.obs = Observation(np.zeros(64))

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        pass

    def test_baselines(self):
        """Constant baselines bracket a 1 Mbps link."""
        assert baseline_estimator('overshoot')(self.obs) == 2000
        assert baseline_estimator('undershoot')(self.obs) == 300
        assert baseline_estimator('constant:450')(self.obs) == 450
        assert baseline_estimator('constant:450').name == 'constant:450'
        tracking = baseline_estimator('tracking_ukf')
        assert isinstance(tracking, UkfEstimator)
        assert tracking.name == 'tracking_ukf'

    def test_function_estimator(self):
        est = FunctionEstimator(lambda obs: 123.0, 'fixed')
        assert est(self.obs) == 123.0
        est.reset()
        assert repr(est) == 'Estimator::fixed'
        assert ConstantEstimator(80).name == 'constant:80'

    def test_abstract(self):
        with pytest.raises(TypeError):
            Estimator()

    def test_assertions_exceptions(self):
        for kind in ('magic', 'constant:abc', 'constant:1', 'constant:9000'):
            with pytest.raises(ConfigurationError):
                baseline_estimator(kind)


class PolicyEstimatorTestCase(unittest.TestCase):
    """Test for (bwelab/estimator/policy.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.folder = tempfile.mkdtemp()
        self.obs = Observation(np.full(64, 0.5))

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        shutil.rmtree(self.folder, ignore_errors=True)

    def test_deterministic(self):
        """Zero weights give the midpoint action at every step."""
        est = PolicyEstimator(PolicyParams.zeros())
        assert est(self.obs) == pytest.approx(282.84271247461896)
        assert est.hidden is not None
        assert est(self.obs) == pytest.approx(282.84271247461896)
        assert est.samples == []
        est.reset()
        assert est.hidden is None

    def test_hidden_state(self):
        """The recurrent state carries over between steps and resets per call."""
        est = PolicyEstimator(PolicyParams.initialize('lstm', 4, 3, seed=3))
        first = [est(self.obs) for _ in range(3)]
        est.reset()
        assert [est(self.obs) for _ in range(3)] == first

    def test_stochastic(self):
        """Sampled actions are clipped and the raw draws are recorded."""
        params = PolicyParams.zeros().with_value_head(log_std=0.0)
        est = PolicyEstimator(params, rng=np.random.default_rng(4))
        estimates = [est(self.obs) for _ in range(50)]
        assert len(est.samples) == 50
        assert all(mean == pytest.approx(0.5) for mean, _ in est.samples)
        assert any(raw < 0 or raw > 1 for _, raw in est.samples)
        assert min(estimates) >= 10 - 1e-9
        assert max(estimates) <= 8000 + 1e-9
        est.reset()
        assert est.samples == []

    def test_from_file(self):
        path = save_params(PolicyParams.zeros(), os.path.join(self.folder, 'p.bin'))
        est = PolicyEstimator.from_file(path)
        assert est.name == 'policy:{}'.format(path)
        assert est(self.obs) == pytest.approx(282.84271247461896)


if __name__ == "__main__":
    unittest.main()
