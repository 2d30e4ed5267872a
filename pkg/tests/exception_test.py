import unittest

import pytest

from bwelab.exception import ArchitectureMismatchError, BweError, \
    ConfigurationError, ContractViolationError, DataError, DivergenceError, \
    EstimatorFaultError, NumericalError, TruncatedFileError


class ExceptionTestCase(unittest.TestCase):
    """Test for (bwelab/exception.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        pass

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        pass

    def test_exit_codes(self):
        assert BweError.exit_code == 1
        assert ConfigurationError('profile', 'wifi').exit_code == 2
        assert ContractViolationError('bad').exit_code == 3
        assert TruncatedFileError('demos.jsonl', 120).exit_code == 3
        assert DivergenceError(1.0, 0.01, 3).exit_code == 4

    def test_hierarchy(self):
        """Configuration errors are also ValueErrors."""
        with pytest.raises(ValueError):
            raise ConfigurationError('profile', 'wifi', ['low_bw', 'lte'])
        assert issubclass(ArchitectureMismatchError, DataError)
        assert issubclass(EstimatorFaultError, NumericalError)

    def test_messages(self):
        error = ConfigurationError('profile', 'wifi', ['low_bw', 'lte'])
        assert str(error) == \
            'Invalid value for profile: wifi. Valid values are: low_bw, lte.'
        assert TruncatedFileError('demos.jsonl', 120).offset == 120

    def test_estimator_fault_episode(self):
        error = EstimatorFaultError(float('nan'), 4)
        named = error.with_episode(7)
        assert named.step == 4 and named.episode == 7
        assert str(named) == 'Estimator returned nan at step 4 of episode 7.'


if __name__ == "__main__":
    unittest.main()
