"""A collection of useful utilities for bwelab."""
import hashlib
import json
import multiprocessing
import os


def derive_seed(seed, *tags):
    """Derive an independent 63-bit seed from a parent seed and a list of tags.

    The result only depends on the inputs so episodes can be generated in any
    order or in parallel.

    Usage:
        trace_seed = derive_seed(1, 'trace', 12)
    """
    key = ':'.join(str(t) for t in (seed,) + tags).encode('utf-8')
    return int.from_bytes(hashlib.sha256(key).digest()[:8], 'little') >> 1


def resolve_seed(seed=None):
    """Return seed, or MERLIN_SEED from the environment, or 0."""
    if seed is not None:
        return int(seed)
    env = os.environ.get('MERLIN_SEED')
    if env is not None and env.strip():
        return int(env)
    return 0


def dumps(data):
    """Compact json with sorted keys for byte-identical output."""
    return json.dumps(data, sort_keys=True, separators=(',', ':'))


def parallel_map(func, items, jobs=1):
    """Map func over items with a process pool when jobs > 1.

    Results come back in input order so the output does not depend on jobs.
    func must be a module level function.
    """
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with multiprocessing.Pool(min(jobs, len(items))) as pool:
        return pool.map(func, items)
