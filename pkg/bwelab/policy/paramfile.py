"""Portable policy parameter files.

A file has one JSON header line followed by the raw little-endian float32
values of every tensor in declaration order:

    {"format": "bwelab-policy", "version": 1, "architecture": "lstm", ...}\\n
    <Wx><Wh><b><W1><b1><W2><b2>[<Vw><Vb><log_std>]
"""
from collections import OrderedDict
import json
import logging

import numpy as np

from ..exception import ArchitectureMismatchError, MalformedRecordError, \
    TruncatedFileError, VersionMismatchError
from ..futil import ensure_parent
from .codec import ActionCodec
from .network import PolicyParams, parameter_shapes, VALUE_HEAD

logger = logging.getLogger(__name__)

FORMAT = 'bwelab-policy'
VERSION = 1
DTYPE = '<f4'


def header(params):
    """Header dictionary of a parameter file."""
    return OrderedDict([
        ('format', FORMAT),
        ('version', VERSION),
        ('architecture', params.architecture),
        ('hidden_size', params.hidden_size),
        ('dense_size', params.dense_size),
        ('codec', params.codec.to_json()),
        ('feature_groups', params.feature_groups),
        ('dtype', DTYPE),
        ('tensors', [[name, list(v.shape)] for name, v in params.tensors.items()])
    ])


def save_params(params, file_path):
    """Write params to file_path. Values are stored as float32."""
    ensure_parent(file_path)
    with open(file_path, 'wb') as outf:
        outf.write(json.dumps(header(params)).encode('utf-8') + b'\n')
        for value in params.tensors.values():
            outf.write(np.ascontiguousarray(value, dtype=DTYPE).tobytes())
    logger.info('Saved %r to %s', params, file_path)
    return file_path


def load_params(file_path, architecture=None, hidden_size=None, dense_size=None):
    """Load params from file_path.

    Args:
        file_path: Path to a parameter file.
        architecture, hidden_size, dense_size: Optional expected values. A file
            that does not match raises ArchitectureMismatchError.
    """
    with open(file_path, 'rb') as inf:
        raw = inf.read()
    end = raw.find(b'\n')
    if end < 0:
        raise TruncatedFileError(file_path, len(raw))
    try:
        head = json.loads(raw[:end].decode('utf-8'))
    except ValueError as e:
        raise MalformedRecordError(file_path, 1, str(e))
    if not isinstance(head, dict) or head.get('format') != FORMAT:
        raise MalformedRecordError(file_path, 1, 'not a {} file'.format(FORMAT))
    if head.get('version') != VERSION:
        raise VersionMismatchError(file_path, head.get('version'), VERSION)

    for field, expected in (('architecture', architecture),
                            ('hidden_size', hidden_size),
                            ('dense_size', dense_size)):
        if expected is not None and head[field] != expected:
            raise ArchitectureMismatchError(field, head[field], expected)

    names = [name for name, _ in head['tensors']]
    value_head = all(n in names for n in VALUE_HEAD)
    expected_shapes = parameter_shapes(head['architecture'], head['hidden_size'],
                                       head['dense_size'], value_head)
    shapes = OrderedDict((name, tuple(shape)) for name, shape in head['tensors'])
    if shapes != expected_shapes:
        raise ArchitectureMismatchError(
            'tensor shapes', dict(shapes), dict(expected_shapes))

    offset = end + 1
    tensors = OrderedDict()
    for name, shape in shapes.items():
        size = int(np.prod(shape)) * 4
        if offset + size > len(raw):
            raise TruncatedFileError(file_path, len(raw))
        tensors[name] = np.frombuffer(raw, dtype=DTYPE, count=size // 4,
                                      offset=offset).reshape(shape).astype(float)
        offset += size
    if offset != len(raw):
        raise MalformedRecordError(
            file_path, 1, '{} unexpected bytes after the tensors'.format(
                len(raw) - offset))

    return PolicyParams(head['architecture'], head['hidden_size'], head['dense_size'],
                        tensors, ActionCodec.from_json(head['codec']),
                        head['feature_groups'])
