"""Expert demonstration datasets.

A DemoSet is saved as JSON Lines. The first line is the manifest. Every
trajectory starts with a header line followed by one line per 60 ms step:

    {"format": "bwelab-demos", "version": 1, "manifest": {...}, "trajectories": 2}
    {"traj": 0, "steps": 1000, "trace": {...}, "call": {...}}
    {"traj": 0, "t": 0, "obs": [...64 values], "a": 0.59, "kbps": 1000.0, ...}
    ...

Files that end with .gz (or are saved with compress=True) are gzip compressed.
"""
from collections import OrderedDict
import gzip
import json
import logging

from . import __version__
from .estimator.policy import PolicyEstimator
from .estimator.ukf import UkfEstimator
from .exception import ConfigurationError, ContractViolationError, \
    EstimatorFaultError, MalformedRecordError, TruncatedFileError, \
    VersionMismatchError
from .futil import open_text
from .media import MediaConfig
from .netsim.episode import run_episode
from .netsim.trace import PROFILES, NetworkTrace, generate_trace
from .policy.network import PolicyParams
from .trajectory import Trajectory
from .utilcol import derive_seed, parallel_map

logger = logging.getLogger(__name__)

FORMAT = 'bwelab-demos'
VERSION = 1


class DemoSet(object):
    """Expert demonstrations.

    Args:
        trajectories: List of Trajectory objects.
        manifest: Dictionary with the generator version, the base seed, the
            profile mix, the call duration and one entry per trajectory
            (profile, trace seed and source). The entries are enough to
            regenerate the set.
    """

    __slots__ = ('trajectories', 'manifest')

    def __init__(self, trajectories=None, manifest=None):
        self.trajectories = list(trajectories or [])
        self.manifest = manifest or OrderedDict([
            ('generator', 'bwelab {}'.format(__version__)),
            ('seed', None), ('profiles', []), ('duration_ms', None), ('episodes', [])
        ])

    def __len__(self):
        return len(self.trajectories)

    def __iter__(self):
        return iter(self.trajectories)

    def __getitem__(self, index):
        return self.trajectories[index]

    @property
    def steps(self):
        """Total number of state-action pairs."""
        return sum(len(t) for t in self.trajectories)

    @property
    def episodes(self):
        return self.manifest.get('episodes', [])

    def profile_counts(self):
        counts = OrderedDict()
        for entry in self.episodes:
            counts[entry['profile']] = counts.get(entry['profile'], 0) + 1
        return counts

    def subset(self, indices):
        """A DemoSet with the trajectories at indices, in the given order."""
        indices = list(indices)
        manifest = OrderedDict(self.manifest)
        manifest['episodes'] = [self.episodes[i] for i in indices] \
            if len(self.episodes) == len(self) else []
        return DemoSet([self.trajectories[i] for i in indices], manifest)

    def __eq__(self, other):
        return isinstance(other, DemoSet) and \
            json.loads(json.dumps(self.manifest)) == \
            json.loads(json.dumps(other.manifest)) and \
            self.trajectories == other.trajectories

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'DemoSet::{} trajectories::{} steps'.format(len(self), self.steps)


def _collect_one(args):
    """Run one expert episode. Module level so it can run in a worker process."""
    index, profile, trace_seed, duration_ms = args
    trace = generate_trace(profile, trace_seed, duration_ms)
    trajectory, _ = run_episode(trace, UkfEstimator(), episode=index)
    return trajectory


def _rollout_one(args):
    """Roll out a learner with the expert shadowing it."""
    index, profile, trace_seed, duration_ms, learner = args
    if isinstance(learner, PolicyParams):
        learner = PolicyEstimator(learner)
    trace = generate_trace(profile, trace_seed, duration_ms)
    trajectory, _ = run_episode(trace, learner, expert=UkfEstimator(), episode=index)
    return trajectory


def _episode_entries(profiles, seed, start, count, source):
    entries = []
    for index in range(start, start + count):
        entries.append(OrderedDict([
            ('index', index),
            ('profile', profiles[index % len(profiles)]),
            ('seed', derive_seed(seed, source, index)),
            ('source', source)
        ]))
    return entries


def _run(func, args, jobs):
    try:
        return parallel_map(func, args, jobs)
    except EstimatorFaultError as e:
        logger.error('%s', e)
        raise


def collect(n, profile_mix=None, seed=0, duration_ms=None, jobs=1):
    """Collect n expert demonstrations.

    Profiles are assigned round-robin over profile_mix, so every tag appears as
    soon as n reaches the number of tags. Each episode has its own derived seed,
    which makes the result independent of jobs.

    Args:
        n: Number of calls (>= 1).
        profile_mix: List of profile tags (Default: all five).
        seed: Base seed.
        duration_ms: Call duration (Default: netsim.duration_ms).
        jobs: Number of worker processes.

    Returns:
        DemoSet
    """
    if n < 1:
        raise ContractViolationError(
            'collect needs at least one episode: got {}.'.format(n))
    profiles = list(profile_mix or PROFILES)
    for p in profiles:
        if p not in PROFILES:
            raise ConfigurationError('profile', p, PROFILES)
    manifest = OrderedDict([
        ('generator', 'bwelab {}'.format(__version__)),
        ('seed', int(seed)),
        ('profiles', profiles),
        ('duration_ms', duration_ms),
        ('episodes', _episode_entries(profiles, seed, 0, n, 'expert'))
    ])
    logger.info('Collecting %d expert demonstrations over %s.', n, ', '.join(profiles))
    args = [(e['index'], e['profile'], e['seed'], duration_ms)
            for e in manifest['episodes']]
    trajectories = _run(_collect_one, args, jobs)
    demos = DemoSet(trajectories, manifest)
    logger.info('Collected %r', demos)
    return demos


def regenerate(manifest, learner=None, jobs=1):
    """Rebuild a DemoSet from its manifest.

    Args:
        manifest: DemoSet manifest.
        learner: Learner used for the DAGGER entries, if there are any.
    """
    duration_ms = manifest.get('duration_ms')
    trajectories = []
    expert = [e for e in manifest['episodes'] if e['source'] == 'expert']
    dagger = [e for e in manifest['episodes'] if e['source'] == 'dagger']
    if dagger and learner is None:
        raise ContractViolationError(
            'The manifest has {} DAGGER entries and no learner was given.'.format(
                len(dagger)))
    trajectories.extend(_run(
        _collect_one, [(e['index'], e['profile'], e['seed'], duration_ms)
                       for e in expert], jobs))
    trajectories.extend(_run(
        _rollout_one, [(e['index'], e['profile'], e['seed'], duration_ms, learner)
                       for e in dagger], jobs))
    return DemoSet(trajectories, OrderedDict(manifest))


def dagger_augment(demos, learner, expert=None, n_rollouts=0, jobs=1):
    """Roll out the learner, relabel the visited states with the expert and append.

    Args:
        demos: DemoSet to augment. It is not modified.
        learner: PolicyParams or an estimator that drives the rollouts.
        expert: Shadow expert (Default: UkfEstimator). A custom expert runs in
            this process.
        n_rollouts: Number of learner calls to add.
        jobs: Number of worker processes.

    Returns:
        A new DemoSet with len(demos) + n_rollouts trajectories.
    """
    if n_rollouts < 0:
        raise ContractViolationError(
            'n_rollouts must be >= 0: got {}.'.format(n_rollouts))
    if n_rollouts == 0:
        return DemoSet(list(demos.trajectories), OrderedDict(demos.manifest))

    manifest = OrderedDict(demos.manifest)
    profiles = list(manifest.get('profiles') or PROFILES)
    seed = manifest.get('seed') or 0
    duration_ms = manifest.get('duration_ms')
    entries = _episode_entries(profiles, seed, len(demos), n_rollouts, 'dagger')
    logger.info('Adding %d DAGGER rollouts to %r.', n_rollouts, demos)

    if expert is None:
        args = [(e['index'], e['profile'], e['seed'], duration_ms, learner)
                for e in entries]
        added = _run(_rollout_one, args, jobs)
    else:
        if isinstance(learner, PolicyParams):
            learner = PolicyEstimator(learner)
        added = []
        for e in entries:
            trace = generate_trace(e['profile'], e['seed'], duration_ms)
            trajectory, _ = run_episode(trace, learner, expert=expert,
                                        episode=e['index'])
            added.append(trajectory)

    manifest['episodes'] = list(demos.episodes) + entries
    return DemoSet(list(demos.trajectories) + added, manifest)


def _step_records(index, trajectory):
    yield OrderedDict([
        ('traj', index),
        ('steps', len(trajectory)),
        ('trace', trajectory.trace_ref),
        ('call', trajectory.call_config)
    ])
    for k in range(len(trajectory)):
        yield OrderedDict([
            ('traj', index),
            ('t', k),
            ('obs', trajectory.observations[k].tolist()),
            ('a', float(trajectory.actions[k])),
            ('kbps', float(trajectory.actions_kbps[k])),
            ('est', float(trajectory.estimates_kbps[k])),
            ('applied', float(trajectory.applied_kbps[k])),
            ('r', trajectory.rewards[k].tolist())
        ])


def save(demos, file_path, compress=None):
    """Write a DemoSet to a JSON Lines file.

    Trajectories are written in order by a single writer, so the bytes only
    depend on the set.

    Args:
        demos: DemoSet.
        file_path: Output path.
        compress: gzip the output. If None, paths ending with .gz are compressed.
    """
    head = OrderedDict([
        ('format', FORMAT),
        ('version', VERSION),
        ('manifest', demos.manifest),
        ('trajectories', len(demos))
    ])
    with open_text(file_path, 'w', compress) as outf:
        outf.write(json.dumps(head, separators=(',', ':')) + '\n')
        for index, trajectory in enumerate(demos.trajectories):
            for record in _step_records(index, trajectory):
                outf.write(json.dumps(record, separators=(',', ':')) + '\n')
    logger.info('Saved %r to %s', demos, file_path)
    return file_path


def _read_bytes(file_path):
    with open(file_path, 'rb') as inf:
        raw = inf.read()
    if raw[:2] == b'\x1f\x8b':
        try:
            raw = gzip.decompress(raw)
        except (EOFError, OSError) as e:
            logger.debug('gzip stream of %s is incomplete: %s', file_path, e)
            raise TruncatedFileError(file_path, len(raw))
    return raw


def _parse(file_path, line_number, line):
    try:
        record = json.loads(line, object_pairs_hook=OrderedDict)
    except ValueError as e:
        raise MalformedRecordError(file_path, line_number, str(e))
    if not isinstance(record, dict):
        raise MalformedRecordError(file_path, line_number, 'record is not an object')
    return record


def _finish(file_path, line_number, header, steps):
    if len(steps) != header['steps']:
        return None
    try:
        return Trajectory(
            [s['obs'] for s in steps], [s['kbps'] for s in steps],
            [s['est'] for s in steps], [s['applied'] for s in steps],
            [s['r'] for s in steps], header['trace'], header['call'],
            actions=[s['a'] for s in steps])
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedRecordError(file_path, line_number, str(e))


def load(file_path):
    """Load a DemoSet saved with save.

    Raises:
        VersionMismatchError: The file was written by another format version.
        TruncatedFileError: The file ends in the middle of a record or misses
            trajectories. The error names the byte offset where data ends.
        MalformedRecordError: A line is not a valid record.
    """
    raw = _read_bytes(file_path)
    if not raw.endswith(b'\n'):
        raise TruncatedFileError(file_path, len(raw))
    lines = raw.decode('utf-8').split('\n')[:-1]

    head = _parse(file_path, 1, lines[0]) if lines else {}
    if head.get('format') != FORMAT:
        raise MalformedRecordError(file_path, 1, 'missing {} header'.format(FORMAT))
    if head.get('version') != VERSION:
        raise VersionMismatchError(file_path, head.get('version'), VERSION)

    trajectories = []
    header, steps = None, []
    for count, line in enumerate(lines[1:]):
        line_number = count + 2
        record = _parse(file_path, line_number, line)
        if 't' not in record:
            if header is not None:
                trajectory = _finish(file_path, line_number, header, steps)
                if trajectory is None:
                    raise MalformedRecordError(
                        file_path, line_number,
                        'trajectory {} has {} of {} steps'.format(
                            header['traj'], len(steps), header['steps']))
                trajectories.append(trajectory)
            if record.get('traj') != len(trajectories) or 'steps' not in record:
                raise MalformedRecordError(file_path, line_number,
                                           'unexpected trajectory header')
            header, steps = record, []
            continue
        if header is None or record.get('traj') != header['traj'] or \
                record.get('t') != len(steps):
            raise MalformedRecordError(file_path, line_number, 'step out of order')
        steps.append(record)

    if header is not None:
        trajectory = _finish(file_path, len(lines), header, steps)
        if trajectory is None:
            raise TruncatedFileError(file_path, len(raw))
        trajectories.append(trajectory)
    if len(trajectories) != head.get('trajectories'):
        raise TruncatedFileError(file_path, len(raw))

    demos = DemoSet(trajectories, head['manifest'])
    logger.info('Loaded %r from %s', demos, file_path)
    return demos


def call_config(trajectory):
    """MediaConfig of a stored trajectory."""
    return MediaConfig.from_json(trajectory.call_config)


def trace_of(trajectory):
    """NetworkTrace of a stored trajectory."""
    return NetworkTrace.from_json(trajectory.trace_ref)
