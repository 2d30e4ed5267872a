import os
import unittest
from unittest import mock

from bwelab.utilcol import derive_seed, dumps, parallel_map, resolve_seed


def square(x):
    return x * x


class UtilcolTestCase(unittest.TestCase):
    """Test for (bwelab/utilcol.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        pass

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        pass

    def test_derive_seed(self):
        """Derived seeds only depend on the parent seed and the tags."""
        assert derive_seed(1, 'trace', 12) == derive_seed(1, 'trace', 12)
        assert derive_seed(1, 'trace', 12) != derive_seed(1, 'trace', 13)
        assert derive_seed(1, 'trace', 12) != derive_seed(2, 'trace', 12)
        assert 0 <= derive_seed(0) < 2 ** 63

    def test_resolve_seed(self):
        with mock.patch.dict(os.environ, {'MERLIN_SEED': '7'}):
            assert resolve_seed() == 7
            assert resolve_seed(3) == 3
        with mock.patch.dict(os.environ, {'MERLIN_SEED': ' '}):
            assert resolve_seed() == 0
        with mock.patch.dict(os.environ, {}, clear=True):
            assert resolve_seed() == 0

    def test_dumps(self):
        assert dumps({'b': 1, 'a': [1, 2]}) == '{"a":[1,2],"b":1}'

    def test_parallel_map(self):
        """Workers keep the input order."""
        items = list(range(7))
        assert parallel_map(square, items) == [x * x for x in items]
        assert parallel_map(square, items, jobs=3) == [x * x for x in items]
        assert parallel_map(square, [], jobs=3) == []


if __name__ == "__main__":
    unittest.main()
