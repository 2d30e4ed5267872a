import math
import unittest

import numpy as np
import pytest
from scipy import stats

from bwelab.evaluation.stats import compare, mean_ci, welch_t_test
from bwelab.exception import DegenerateSampleError


def brute_force_welch(a, b):
    na, nb = float(len(a)), float(len(b))
    ma, mb = sum(a) / na, sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1)
    se2 = va / na + vb / nb
    t = (ma - mb) / math.sqrt(se2)
    dof = se2 ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    return t, dof


class WelchTestCase(unittest.TestCase):
    """Test for (bwelab/evaluation/stats.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.rng = np.random.default_rng(11)

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        pass

    def test_identical(self):
        result = welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert result.t == 0
        assert result.p == 1.0

    def test_symmetry(self):
        a = self.rng.normal(0, 1, 20)
        b = self.rng.normal(0.5, 2, 30)
        ab, ba = welch_t_test(a, b), welch_t_test(b, a)
        assert ab.t == pytest.approx(-ba.t)
        assert ab.dof == pytest.approx(ba.dof)
        assert ab.p == pytest.approx(ba.p)

    def test_reference(self):
        """Matches scipy and the textbook formula on random fixtures."""
        for _ in range(50):
            na, nb = self.rng.integers(2, 40, size=2)
            a = self.rng.normal(self.rng.uniform(-1, 1), self.rng.uniform(0.1, 3), na)
            b = self.rng.normal(self.rng.uniform(-1, 1), self.rng.uniform(0.1, 3), nb)
            result = welch_t_test(a, b)
            reference = stats.ttest_ind(a, b, equal_var=False)
            assert result.t == pytest.approx(reference.statistic, rel=1e-9)
            assert result.p == pytest.approx(reference.pvalue, rel=1e-9, abs=1e-12)
            t, dof = brute_force_welch(list(a), list(b))
            assert result.t == pytest.approx(t, rel=1e-9)
            assert result.dof == pytest.approx(dof, rel=1e-9)

    def test_separated(self):
        a = self.rng.normal(0, 1, 100)
        b = self.rng.normal(5, 1, 100)
        assert welch_t_test(a, b).p < 1e-6
        assert compare(a, b) < 1e-6

    def test_compare_constant(self):
        """Two constant samples give p = 1 when equal and p = 0 otherwise."""
        assert compare([2.0, 2.0], [2.0, 2.0, 2.0]) == 1.0
        assert compare([2.0, 2.0], [3.0, 3.0]) == 0.0
        with pytest.raises(DegenerateSampleError):
            welch_t_test([2.0, 2.0], [3.0, 3.0])

    def test_mean_ci(self):
        mean, half = mean_ci([1.0, 2.0, 3.0])
        assert mean == 2.0
        assert half == pytest.approx(stats.t.ppf(0.975, 2) / math.sqrt(3))
        assert mean_ci([5.0]) == (5.0, None)
        _, wide = mean_ci([1.0, 2.0, 3.0], level=0.99)
        assert wide > half

    def test_assertions_exceptions(self):
        with pytest.raises(DegenerateSampleError):
            welch_t_test([1.0], [1.0, 2.0])
        with pytest.raises(DegenerateSampleError):
            welch_t_test([1.0, float('nan')], [1.0, 2.0])
        with pytest.raises(DegenerateSampleError):
            compare([1.0], [1.0])
        with pytest.raises(DegenerateSampleError):
            mean_ci([])


if __name__ == "__main__":
    unittest.main()
