# coding=utf-8
"""Ablations and comparisons built on training and the benchmark."""
from collections import OrderedDict
import logging
import os

import numpy as np

from ..demostore import dagger_augment
from ..estimator.policy import PolicyEstimator
from ..estimator.ukf import UkfEstimator
from ..exception import ContractViolationError, EmptyDatasetError
from ..features import FEATURE_GROUPS, mask_groups, feature_mask
from ..futil import preparedir, write_csv, write_json
from ..netsim.episode import run_episode
from ..netsim.trace import TraceEnvironment
from ..training.bc import BcConfig, evaluate_mse, split, train
from ..training.ppo import KL_PENALTIES, PpoConfig, finetune, train_from_scratch
from ..utilcol import derive_seed
from .benchmark import benchmark_traces, run_benchmark

logger = logging.getLogger(__name__)


def subset_name(groups):
    return '+'.join(groups)


def default_subsets():
    """Every single group, recv_rate with media_type, and the full set."""
    subsets = [[g] for g in FEATURE_GROUPS]
    subsets.append(['recv_rate', 'media_type'])
    subsets.append(list(FEATURE_GROUPS))
    return subsets


def _split_demos(demos, cfg):
    train_idx, hold_idx = split(demos, cfg.holdout_fraction, cfg.seed)
    return demos.subset(train_idx), demos.subset(hold_idx)


def _holdout(train_set, hold_set):
    """Evaluation set: the holdout, or the training set when there is none."""
    return hold_set if len(hold_set) else train_set


def ablate_features(demos, subsets=None, cfg=None, report_dir=None):
    """Retrain on feature subsets and report holdout MSE per subset.

    The full feature set is always part of the run. Every subset uses the same
    split and seed.

    Args:
        demos: DemoSet.
        subsets: List of feature group lists (Default: default_subsets()).
        cfg: BcConfig. Its feature groups are replaced per subset.
        report_dir: Optional folder for one CDF CSV per subset and summary.json.

    Returns:
        OrderedDict from subset name to MseReport.
    """
    cfg = cfg or BcConfig()
    subsets = [mask_groups(feature_mask(s)) for s in (subsets or default_subsets())]
    if not subsets:
        raise ContractViolationError('At least one feature subset is required.')
    full = list(FEATURE_GROUPS)
    if full not in subsets:
        subsets.append(full)
    if not len(demos):
        raise EmptyDatasetError('demonstration set')

    train_set, hold_set = _split_demos(demos, cfg)
    reports = OrderedDict()
    for groups in subsets:
        name = subset_name(groups)
        logger.info('Feature ablation: training on %s', name)
        params, _ = train(demos, cfg.duplicate(feature_groups=groups))
        reports[name] = evaluate_mse(params, _holdout(train_set, hold_set))

    if report_dir:
        preparedir(report_dir)
        for name, report in reports.items():
            report.write_cdf(os.path.join(report_dir, 'cdf_{}.csv'.format(name)))
        write_json(os.path.join(report_dir, 'summary.json'),
                   OrderedDict((n, r.to_json()) for n, r in reports.items()))
    return reports


def nested_subsets(count, sizes, seed=0):
    """Index lists for the given sizes where every smaller list is a prefix of
    the larger ones."""
    sizes = list(sizes)
    if not sizes:
        raise ContractViolationError('At least one dataset size is required.')
    if any(s < 1 for s in sizes):
        raise ContractViolationError(
            'Dataset sizes must be >= 1: got {}.'.format(sizes))
    if sizes != sorted(sizes):
        raise ContractViolationError(
            'Dataset sizes must be ascending: {}.'.format(sizes))
    if sizes[-1] > count:
        raise ContractViolationError(
            'Largest size {} exceeds the {} training calls.'.format(sizes[-1], count))
    order = np.random.default_rng(derive_seed(seed, 'scaling')).permutation(count)
    return [sorted(int(i) for i in order[:s]) for s in sizes]


def data_scaling_study(demos, sizes, cfg=None, report_path=None):
    """Holdout MSE of policies trained on nested subsets of increasing size.

    The holdout is split off once; training subsets are drawn from the rest.

    Returns:
        List of (size, holdout_mse) tuples.
    """
    cfg = cfg or BcConfig()
    train_set, hold_set = _split_demos(demos, cfg)
    indices = nested_subsets(len(train_set), sizes, cfg.seed)
    evaluation = _holdout(train_set, hold_set)
    rows = []
    for size, subset in zip(sizes, indices):
        logger.info('Data scaling: training on %d calls', size)
        params, _ = train(train_set.subset(subset), cfg.duplicate(holdout_fraction=0))
        rows.append((size, evaluate_mse(params, evaluation).mean))
    if report_path:
        write_csv(report_path, ('size', 'holdout_mse'),
                  [(s, repr(m)) for s, m in rows])
    return rows


def closed_loop_error(policy, traces, expert=None):
    """Mean |policy - expert| / expert when the policy drives the calls.

    Args:
        policy: PolicyParams or an estimator.
        traces: List of NetworkTrace.
        expert: Shadow expert (Default: UkfEstimator).
    """
    if not hasattr(policy, 'estimate'):
        policy = PolicyEstimator(policy)
    expert = expert or UkfEstimator()
    errors = []
    for index, trace in enumerate(traces):
        _, metrics = run_episode(trace, policy, expert=expert, episode=index)
        errors.append(metrics.estimate_error)
    return float(np.mean(errors)) if errors else float('nan')


def compare_architectures(demos, cfg=None, traces=None,
                          architectures=('lstm', 'mlp')):
    """Train each architecture on the same split.

    Returns:
        OrderedDict from architecture to holdout_mse and closed_loop_error
        (None without traces).
    """
    cfg = cfg or BcConfig()
    train_set, hold_set = _split_demos(demos, cfg)
    result = OrderedDict()
    for arch in architectures:
        params, _ = train(demos, cfg.duplicate(architecture=arch))
        result[arch] = OrderedDict([
            ('holdout_mse', evaluate_mse(params, _holdout(train_set, hold_set)).mean),
            ('closed_loop_error',
             closed_loop_error(params, traces) if traces else None)
        ])
        logger.info('%s: %s', arch, dict(result[arch]))
    return result


def dagger_study(demos, cfg=None, rounds=1, jobs=1):
    """Alternate training and DAGGER aggregation until the training set doubled.

    Returns:
        List of (round, training calls, holdout_mse). Round 0 is plain
        behavioral cloning.
    """
    cfg = cfg or BcConfig()
    if rounds < 1:
        raise ContractViolationError('rounds must be >= 1: got {}.'.format(rounds))
    train_set, hold_set = _split_demos(demos, cfg)
    evaluation = _holdout(train_set, hold_set)
    no_split = cfg.duplicate(holdout_fraction=0)
    target = 2 * len(train_set)
    per_round = int(np.ceil(len(train_set) / float(rounds)))

    params, _ = train(train_set, no_split)
    rows = [(0, len(train_set), evaluate_mse(params, evaluation).mean)]
    current = train_set
    for count in range(1, rounds + 1):
        added = min(per_round, target - len(current))
        current = dagger_augment(current, params, n_rollouts=added, jobs=jobs)
        params, _ = train(current, no_split)
        rows.append((count, len(current), evaluate_mse(params, evaluation).mean))
        logger.info('DAGGER round %d: %d calls, holdout mse %.6f', *rows[-1])
    return rows


def _holdout_traces(env, count, seed):
    return benchmark_traces(count, env, derive_seed(seed, 'holdout'))


def personalization_study(pretrained, target, seeds=(0, 1, 2, 3, 4), episodes=None,
                          holdout=30, ppo_cfg=None, report_dir=None, jobs=1):
    """UKF, the pretrained policy and finetuned policies on a target distribution.

    Every seed finetunes a copy of the pretrained policy and evaluates the three
    estimators on the same holdout traces.

    Returns:
        OrderedDict from estimator (ukf, pretrained, finetuned) to the mean over
        seeds of recv_rate_kbps, loss_rate, delay_ms, qoe and mean_estimate_kbps.
    """
    env = TraceEnvironment.from_string(target) if isinstance(target, str) else target
    ppo_cfg = ppo_cfg or PpoConfig()
    if episodes is not None:
        ppo_cfg = ppo_cfg.duplicate(episodes=episodes)
    traces = _holdout_traces(env, holdout, 0)
    metrics = ('recv_rate_kbps', 'loss_rate', 'delay_ms', 'qoe')
    collected = OrderedDict((n, []) for n in ('ukf', 'pretrained', 'finetuned'))
    estimates = OrderedDict((n, []) for n in collected)
    for seed in seeds:
        finetuned, _ = finetune(pretrained, env, ppo_cfg.duplicate(seed=seed),
                                jobs=jobs)
        estimators = [UkfEstimator(), PolicyEstimator(pretrained, name='pretrained'),
                      PolicyEstimator(finetuned, name='finetuned')]
        report = run_benchmark(estimators, traces, jobs=jobs)
        for name in collected:
            collected[name].append([report.mean(name, m) for m in metrics])
            estimates[name].append(np.mean(report.samples(name, 'mean_estimate_kbps')))

    result = OrderedDict()
    for name, rows in collected.items():
        means = np.mean(rows, axis=0)
        result[name] = OrderedDict(zip(metrics, (float(v) for v in means)))
        result[name]['mean_estimate_kbps'] = float(np.mean(estimates[name]))
    if report_dir:
        write_json(os.path.join(report_dir, 'personalization.json'), result)
    return result


def offline_online_study(pretrained, env, kl_penalties=KL_PENALTIES,
                         finetune_episodes=75, scratch_episodes=375, holdout=30,
                         ppo_cfg=None, report_dir=None, jobs=1):
    """Finetuned versus from-scratch PPO over a sweep of initial KL penalties.

    For every mode the holdout QoE of each penalty is measured. The report has
    the maximum and the mean +- std over penalties, and the episodes each mode
    needs before its trailing training QoE reaches 95% of the best scratch
    final QoE.
    """
    env = TraceEnvironment.from_string(env) if isinstance(env, str) else env
    ppo_cfg = ppo_cfg or PpoConfig()
    traces = _holdout_traces(env, holdout, 1)
    runs = OrderedDict([('finetuned', []), ('scratch', [])])
    for kl in kl_penalties:
        cfg = ppo_cfg.duplicate(initial_kl_penalty=kl)
        runs['finetuned'].append(finetune(
            pretrained, env, cfg.duplicate(episodes=finetune_episodes), jobs=jobs))
        runs['scratch'].append(train_from_scratch(
            cfg.duplicate(episodes=scratch_episodes), env,
            pretrained.architecture, pretrained.hidden_size, pretrained.dense_size,
            jobs=jobs))

    qoe = OrderedDict()
    for mode, results in runs.items():
        estimators = [PolicyEstimator(p, name='{}:{}'.format(mode, kl))
                      for (p, _), kl in zip(results, kl_penalties)]
        report = run_benchmark(estimators, traces, jobs=jobs)
        qoe[mode] = [report.mean(e.name, 'qoe') for e in estimators]

    best_scratch = max(np.mean(c.qoe[-5:]) for _, c in runs['scratch'])
    level = 0.95 * best_scratch if best_scratch > 0 else 1.05 * best_scratch
    result = OrderedDict()
    for mode, results in runs.items():
        values = np.array(qoe[mode])
        reached = [c.episodes_to_reach(level) for _, c in results]
        reached = [r for r in reached if r is not None]
        result[mode] = OrderedDict([
            ('kl_penalties', list(kl_penalties)),
            ('holdout_qoe', values.tolist()),
            ('max_qoe', float(values.max())),
            ('mean_qoe', float(values.mean())),
            ('std_qoe', float(values.std())),
            ('episodes_to_95', min(reached) if reached else None)
        ])
    if report_dir:
        write_json(os.path.join(report_dir, 'offline_online.json'), result)
    return result

