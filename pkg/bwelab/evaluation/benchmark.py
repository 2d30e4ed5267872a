# coding=utf-8
"""Paired closed-loop benchmark of bandwidth estimators."""
from collections import OrderedDict
import itertools
import logging
import os

from .. import __version__
from ..exception import ContractViolationError, EstimatorFaultError
from ..futil import preparedir, write_csv, write_json
from ..netsim.episode import run_episode
from ..netsim.trace import TraceEnvironment
from ..reward import QoeReward
from ..trajectory import EpisodeMetrics
from ..utilcol import derive_seed, parallel_map
from .stats import compare, mean_ci

logger = logging.getLogger(__name__)

METRICS = ('recv_rate_kbps', 'loss_rate', 'delay_ms', 'qoe', 'mse_vs_expert',
           'estimate_error')
"""Metrics that are summarized and compared in a report."""

EPISODE_HEADER = ('estimator', 'episode', 'profile', 'trace_seed', 'loss_seed',
                  'fault') + EpisodeMetrics.FIELDS


def benchmark_traces(count, env=None, seed=0):
    """count traces drawn from env with derived seeds.

    Args:
        count: Number of traces.
        env: TraceEnvironment, a target or profile string (Default: all profiles).
        seed: Base seed.
    """
    if env is None:
        env = TraceEnvironment()
    elif isinstance(env, str):
        env = TraceEnvironment.from_string(env)
    return [env(derive_seed(seed, 'eval', i)) for i in range(count)]


def _unique_names(estimators):
    names, seen = [], {}
    for est in estimators:
        name = getattr(est, 'name', None) or type(est).__name__
        seen[name] = seen.get(name, 0) + 1
        names.append(name if seen[name] == 1 else '{}#{}'.format(name, seen[name]))
    return names


def _episode(args):
    """Run one (estimator, trace) pair. Faults are returned, not raised."""
    name, estimator, trace, loss_seed, index, expert, reward = args
    try:
        _, metrics = run_episode(trace, estimator, expert=expert, reward=reward,
                                 seed=loss_seed, episode=index)
    except EstimatorFaultError as e:
        logger.warning('%s: %s', name, e)
        return None, str(e)
    return metrics, None


class ComparisonReport(object):
    """Result of a benchmark.

    Attributes:
        estimators: Estimator names in benchmark order.
        episodes: One OrderedDict per (estimator, trace) pair in sorted episode
            order. Faulted episodes have a fault message and no metrics.
        manifest: Everything needed to rerun the benchmark.
    """

    def __init__(self, estimators, episodes, manifest):
        self.estimators = list(estimators)
        self.episodes = list(episodes)
        self.manifest = manifest

    def samples(self, estimator, metric):
        """Per-episode values of a metric for an estimator. Faults are excluded."""
        return [row[metric] for row in self.episodes
                if row['estimator'] == estimator and not row['fault'] and
                row[metric] is not None]

    def faults(self, estimator):
        return sum(1 for row in self.episodes
                   if row['estimator'] == estimator and row['fault'])

    def summary(self):
        """Mean and 95% confidence half width per estimator and metric."""
        summary = OrderedDict()
        for name in self.estimators:
            entry = OrderedDict([('faults', self.faults(name))])
            entry['episodes'] = len(self.samples(name, 'qoe'))
            for metric in METRICS:
                values = self.samples(name, metric)
                if not values:
                    entry[metric] = None
                    continue
                mean, half = mean_ci(values)
                entry[metric] = OrderedDict([('mean', mean), ('ci95', half)])
            summary[name] = entry
        return summary

    def p_values(self):
        """Welch p-values per estimator pair and metric."""
        result = OrderedDict()
        for a, b in itertools.combinations(self.estimators, 2):
            pair = OrderedDict()
            for metric in METRICS:
                sa, sb = self.samples(a, metric), self.samples(b, metric)
                pair[metric] = compare(sa, sb) if len(sa) >= 2 and len(sb) >= 2 \
                    else None
            result['{} vs {}'.format(a, b)] = pair
        return result

    def p_value(self, a, b, metric):
        pairs = self.p_values()
        key = '{} vs {}'.format(a, b)
        if key not in pairs:
            key = '{} vs {}'.format(b, a)
        return pairs[key][metric]

    def mean(self, estimator, metric):
        entry = self.summary()[estimator][metric]
        return None if entry is None else entry['mean']

    def to_json(self):
        return OrderedDict([
            ('estimators', self.estimators),
            ('summary', self.summary()),
            ('p_values', self.p_values()),
            ('manifest', self.manifest)
        ])

    def write(self, report_dir):
        """Write summary.json and episodes.csv to report_dir."""
        preparedir(report_dir)
        rows = [[row[h] if row[h] is not None else '' for h in EPISODE_HEADER]
                for row in self.episodes]
        write_csv(os.path.join(report_dir, 'episodes.csv'), EPISODE_HEADER, rows)
        write_json(os.path.join(report_dir, 'summary.json'), self.to_json())
        logger.info('Report written to %s', report_dir)
        return report_dir

    def __repr__(self):
        return 'ComparisonReport::{}::{} episodes'.format(
            ','.join(self.estimators), len(self.episodes))


def run_benchmark(estimators, traces, seeds=None, expert=None, reward=None,
                  report_dir=None, jobs=1):
    """Run every estimator on the same calls.

    Each estimator sees identical (trace, media config, loss seed) tuples. An
    episode whose estimator faults is recorded with its message and left out of
    the statistics.

    Args:
        estimators: List of estimators. Names are made unique.
        traces: List of NetworkTrace.
        seeds: Loss process seed per trace (Default: the trace seeds).
        expert: Optional shadow expert for mse_vs_expert and estimate_error.
        reward: QoeReward.
        report_dir: Optional folder for summary.json and episodes.csv.
        jobs: Worker processes.

    Returns:
        ComparisonReport
    """
    if not estimators:
        raise ContractViolationError('A benchmark needs at least one estimator.')
    if not traces:
        raise ContractViolationError('A benchmark needs at least one trace.')
    seeds = [t.seed for t in traces] if seeds is None else list(seeds)
    if len(seeds) != len(traces):
        raise ContractViolationError(
            'Got {} seeds for {} traces.'.format(len(seeds), len(traces)))
    reward = reward or QoeReward()
    names = _unique_names(estimators)
    logger.info('Benchmarking %s on %d traces.', ', '.join(names), len(traces))

    args = [(name, est, trace, seed, index, expert, reward)
            for name, est in zip(names, estimators)
            for index, (trace, seed) in enumerate(zip(traces, seeds))]
    results = parallel_map(_episode, args, jobs)

    episodes = []
    for (name, _, trace, seed, index, _, _), (metrics, fault) in zip(args, results):
        row = OrderedDict([
            ('estimator', name), ('episode', index), ('profile', trace.profile_tag),
            ('trace_seed', trace.seed), ('loss_seed', seed), ('fault', fault or '')
        ])
        data = metrics.to_json() if metrics is not None else {}
        for field in EpisodeMetrics.FIELDS:
            row[field] = data.get(field)
        episodes.append(row)

    manifest = OrderedDict([
        ('generator', 'bwelab {}'.format(__version__)),
        ('estimators', names),
        ('expert', getattr(expert, 'name', None)),
        ('reward', reward.to_json()),
        ('traces', [trace.header() for trace in traces]),
        ('seeds', seeds)
    ])
    report = ComparisonReport(names, episodes, manifest)
    if report_dir:
        report.write(report_dir)
    return report
