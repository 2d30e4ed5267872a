import json
import os
import shutil
import tempfile
import unittest

import numpy as np
import pytest

from bwelab.exception import ArchitectureMismatchError, MalformedRecordError, \
    TruncatedFileError, VersionMismatchError
from bwelab.policy.network import PolicyParams
from bwelab.policy.paramfile import header, load_params, save_params


class ParamFileTestCase(unittest.TestCase):
    """Test for (bwelab/policy/paramfile.py)."""

    # preparing to test
    def setUp(self):
        """Set up the test case by initiating the class."""
        self.folder = tempfile.mkdtemp()
        self.path = os.path.join(self.folder, 'policy.bin')
        self.params = PolicyParams.initialize('lstm', 6, 4, seed=5,
                                              feature_groups=['recv_rate',
                                                              'media_type'])

    # ending the test
    def tearDown(self):
        """Cleaning up after the test."""
        shutil.rmtree(self.folder, ignore_errors=True)

    def read(self):
        with open(self.path, 'rb') as inf:
            return inf.read()

    def write(self, raw):
        with open(self.path, 'wb') as outf:
            outf.write(raw)

    def test_round_trip(self):
        """Saved parameters load back bit for bit."""
        save_params(self.params, self.path)
        loaded = load_params(self.path)
        assert loaded == self.params
        assert loaded.feature_groups == ['recv_rate', 'media_type']

    def test_value_head_round_trip(self):
        params = PolicyParams.initialize('mlp', 5, 3, seed=1).with_value_head(
            seed=2, log_std=-0.5)
        save_params(params, self.path)
        loaded = load_params(self.path, 'mlp', 5, 3)
        assert loaded.has_value_head
        assert loaded == params
        assert loaded.log_std == -0.5

    def test_float32_rounding(self):
        """Values are stored as float32."""
        params = self.params.copy()
        params.tensors['b2'][0] = 0.1
        save_params(params, self.path)
        loaded = load_params(self.path)
        assert loaded['b2'][0] == float(np.float32(0.1))
        assert loaded == params.rounded()

    def test_layout(self):
        """One json header line then raw float32 values."""
        save_params(self.params, self.path)
        raw = self.read()
        head = json.loads(raw[:raw.index(b'\n')].decode('utf-8'))
        assert head == json.loads(json.dumps(header(self.params)))
        assert head['dtype'] == '<f4'
        assert len(raw) - raw.index(b'\n') - 1 == 4 * self.params.count()

    def test_truncated(self):
        save_params(self.params, self.path)
        raw = self.read()
        self.write(raw[:-6])
        with pytest.raises(TruncatedFileError):
            load_params(self.path)
        self.write(raw[:10])
        with pytest.raises(TruncatedFileError):
            load_params(self.path)

    def test_trailing_bytes(self):
        save_params(self.params, self.path)
        self.write(self.read() + b'\x00\x00\x00\x00')
        with pytest.raises(MalformedRecordError):
            load_params(self.path)

    def test_version(self):
        save_params(self.params, self.path)
        self.write(self.read().replace(b'"version": 1', b'"version": 2', 1))
        with pytest.raises(VersionMismatchError):
            load_params(self.path)

    def test_not_a_policy(self):
        self.write(b'{"format": "other"}\n')
        with pytest.raises(MalformedRecordError):
            load_params(self.path)
        self.write(b'not json\n')
        with pytest.raises(MalformedRecordError):
            load_params(self.path)

    def test_architecture_mismatch(self):
        save_params(self.params, self.path)
        with pytest.raises(ArchitectureMismatchError):
            load_params(self.path, architecture='mlp')
        with pytest.raises(ArchitectureMismatchError):
            load_params(self.path, hidden_size=128)
        assert load_params(self.path, 'lstm', 6, 4) == self.params

    def test_shape_mismatch(self):
        """Tensor shapes must follow the declared architecture."""
        save_params(self.params, self.path)
        raw = self.read()
        self.write(raw.replace(b'"hidden_size": 6', b'"hidden_size": 7', 1))
        with pytest.raises(ArchitectureMismatchError):
            load_params(self.path)


if __name__ == "__main__":
    unittest.main()
