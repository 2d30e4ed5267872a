# coding=utf-8
"""Command line interface of bwelab.

Every command writes a RunManifest next to its output. ``bwelab replay`` runs a
command again from its manifest.

Usage:

    bwelab collect --n 1000 --seed 1 --out demos.jsonl.gz
    bwelab train-bc --demos demos.jsonl.gz --epochs 100 --out policy.bin
    bwelab finetune --policy policy.bin --target low_bw --out low.bin
    bwelab eval --estimators ukf,undershoot,policy:low.bin --report-dir report
"""
import argparse
from collections import OrderedDict
import datetime
import logging
import os
import sys
import time

import filterpy
import numpy as np
import scipy

from . import __version__, config
from .demostore import collect, dagger_augment, load, save
from .estimator.baselines import BASELINES, baseline_estimator
from .estimator.policy import PolicyEstimator
from .estimator.ukf import UkfEstimator
from .evaluation.benchmark import benchmark_traces, run_benchmark
from .evaluation.studies import ablate_features, data_scaling_study, dagger_study, \
    offline_online_study, personalization_study
from .exception import BweError, ConfigurationError
from .features import parse_groups
from .futil import read_json, write_csv, write_json
from .netsim.trace import PROFILES, TraceEnvironment
from .policy.paramfile import load_params, save_params
from .training.bc import BcConfig, train
from .training.ppo import KL_PENALTIES, PpoConfig, finetune
from .utilcol import resolve_seed

logger = logging.getLogger(__name__)

ESTIMATORS = tuple(BASELINES) + ('ukf', 'policy:<path>')


class RunManifest(object):
    """Record of one command run.

    Attributes:
        command: Subcommand name.
        argv: Full argument list. ``bwelab replay`` passes it to main again.
        flags: Resolved flag values.
        seed: Resolved global seed.
        versions: Versions of bwelab and its numerical dependencies.
        outputs: Paths written by the command.
        started: UTC start time.
        seconds: Wall-clock duration.
    """

    def __init__(self, command, argv, flags, seed):
        self.command = command
        self.argv = list(argv)
        self.flags = flags
        self.seed = seed
        self.versions = OrderedDict([
            ('bwelab', __version__), ('numpy', np.__version__),
            ('scipy', scipy.__version__), ('filterpy', filterpy.__version__),
            ('python', sys.version.split()[0])
        ])
        self.outputs = []
        self.started = datetime.datetime.now(datetime.timezone.utc).isoformat()
        self._t0 = time.time()
        self.seconds = None

    def add_output(self, path):
        self.outputs.append(str(path))

    def to_json(self):
        return OrderedDict([
            ('command', self.command), ('argv', self.argv), ('flags', self.flags),
            ('seed', self.seed), ('versions', self.versions),
            ('outputs', self.outputs), ('started', self.started),
            ('seconds', self.seconds)
        ])

    def write(self, file_path):
        self.seconds = round(time.time() - self._t0, 3)
        write_json(file_path, self.to_json())
        return file_path


def _manifest_path(out):
    """Manifest next to an output file or inside an output folder."""
    if os.path.isdir(out) or not os.path.splitext(out)[1]:
        return os.path.join(out, 'manifest.json')
    return out + '.manifest.json'


def _bc_config(args):
    groups = parse_groups(args.mask) if args.mask else None
    return BcConfig(batch_size=args.batch, epochs=args.epochs, lr=args.lr,
                    seed=args.seed, holdout_fraction=args.holdout,
                    feature_groups=groups, architecture=args.architecture,
                    hidden_size=args.hidden, dense_size=args.dense)


def _env(value, duration_s=None):
    duration_ms = int(duration_s * 1000) if duration_s else None
    return TraceEnvironment.from_string(value, duration_ms) if value else \
        TraceEnvironment(duration_ms=duration_ms)


def make_estimator(name):
    """Estimator from a command line name."""
    if name.startswith('policy:'):
        path = name.split(':', 1)[1]
        if not os.path.isfile(path):
            raise ConfigurationError('policy file', path)
        return PolicyEstimator(load_params(path), name=name)
    try:
        return baseline_estimator(name)
    except ConfigurationError:
        raise ConfigurationError('estimator', name, ESTIMATORS)


def _cmd_collect(args, manifest):
    duration_ms = int(args.duration_s * 1000) if args.duration_s else None
    profiles = [p.strip() for p in args.profiles.split(',')] if args.profiles \
        else list(PROFILES)
    demos = collect(args.n, profiles, args.seed, duration_ms, args.jobs)
    save(demos, args.out, compress=True if args.gzip else None)
    manifest.add_output(args.out)
    return args.out


def _cmd_train_bc(args, manifest):
    demos = load(args.demos)
    start = load_params(args.resume) if args.resume else None
    cfg = _bc_config(args)
    manifest.flags['bc_config'] = cfg.to_json()
    curve_path = args.curve or args.out + '.curve.csv'
    params, _ = train(demos, cfg, start, curve_path)
    save_params(params, args.out)
    manifest.add_output(args.out)
    manifest.add_output(curve_path)
    return args.out


def _ppo_config(args):
    return PpoConfig(initial_kl_penalty=args.kl, episodes=args.episodes,
                     seed=args.seed)


def _cmd_finetune(args, manifest):
    params = load_params(args.policy)
    curve_path = args.curve or args.out + '.curve.csv'
    cfg = _ppo_config(args)
    manifest.flags['ppo_config'] = cfg.to_json()
    tuned, _ = finetune(params, _env(args.target), cfg,
                        curve_path=curve_path, jobs=args.jobs)
    save_params(tuned, args.out)
    manifest.add_output(args.out)
    manifest.add_output(curve_path)
    return args.out


def _cmd_eval(args, manifest):
    names = [n.strip() for n in args.estimators.split(',') if n.strip()]
    estimators = [make_estimator(n) for n in names]
    expert = UkfEstimator() if args.expert or \
        any(n.startswith('policy:') for n in names) else None
    traces = benchmark_traces(args.traces, _env(args.env, args.duration_s),
                              args.seed)
    run_benchmark(estimators, traces, expert=expert, report_dir=args.report_dir,
                  jobs=args.jobs)
    manifest.add_output(os.path.join(args.report_dir, 'summary.json'))
    manifest.add_output(os.path.join(args.report_dir, 'episodes.csv'))
    return args.report_dir


def _cmd_ablate(args, manifest):
    subsets = [parse_groups(s) for s in args.subsets.split(';')] if args.subsets \
        else None
    ablate_features(load(args.demos), subsets, _bc_config(args), args.report_dir)
    manifest.add_output(args.report_dir)
    return args.report_dir


def _cmd_scaling(args, manifest):
    sizes = [int(s) for s in args.sizes.split(',')]
    data_scaling_study(load(args.demos), sizes, _bc_config(args), args.out)
    manifest.add_output(args.out)
    return args.out


def _cmd_dagger(args, manifest):
    demos = load(args.demos)
    if args.policy:
        augmented = dagger_augment(demos, load_params(args.policy),
                                   n_rollouts=args.rollouts or len(demos),
                                   jobs=args.jobs)
        save(augmented, args.out)
    else:
        rows = dagger_study(demos, _bc_config(args), args.rounds, args.jobs)
        write_csv(args.out, ('round', 'calls', 'holdout_mse'),
                  [(r, n, repr(m)) for r, n, m in rows])
    manifest.add_output(args.out)
    return args.out


def _cmd_compare(args, manifest):
    kls = [float(k) for k in args.kl_sweep.split(',')]
    offline_online_study(load_params(args.policy), _env(args.target), kls,
                         args.finetune_episodes, args.scratch_episodes,
                         args.holdout, PpoConfig(seed=args.seed), args.report_dir,
                         args.jobs)
    manifest.add_output(os.path.join(args.report_dir, 'offline_online.json'))
    return args.report_dir


def _cmd_personalize(args, manifest):
    seeds = list(range(args.seed, args.seed + args.runs))
    personalization_study(load_params(args.policy), args.target, seeds,
                          args.episodes, args.holdout, report_dir=args.report_dir,
                          jobs=args.jobs)
    manifest.add_output(os.path.join(args.report_dir, 'personalization.json'))
    return args.report_dir


def replay_argv(data):
    """Arguments that rerun a manifest.

    The recorded seed is passed explicitly when the original run took it from
    MERLIN_SEED or the default.
    """
    argv = list(data['argv'])
    if not any(a == '--seed' or a.startswith('--seed=') for a in argv):
        argv += ['--seed', str(data['seed'])]
    return argv


def _cmd_replay(args, manifest):
    argv = replay_argv(read_json(args.manifest))
    logger.info('Replaying %s', ' '.join(argv))
    code = main(argv)
    if code:
        raise BweError('Replay of {} failed with exit code {}.'.format(
            args.manifest, code))
    return None


def _common():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='key-value or json config file')
    common.add_argument('--seed', type=int, default=None,
                        help='global seed (Default: MERLIN_SEED or 0)')
    common.add_argument('--jobs', type=int, default=1,
                        help='worker processes for episode parallelism')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('-q', '--quiet', action='store_true')
    return common


def _bc_flags(parser):
    parser.add_argument('--demos', required=True, help='demonstration file')
    parser.add_argument('--epochs', type=int, default=None)
    parser.add_argument('--batch', type=int, default=None)
    parser.add_argument('--lr', type=float, default=None)
    parser.add_argument('--holdout', type=float, default=None)
    parser.add_argument('--mask', default=None,
                        help='comma-separated feature groups to keep')
    parser.add_argument('--architecture', choices=('lstm', 'mlp'), default=None)
    parser.add_argument('--hidden', type=int, default=None)
    parser.add_argument('--dense', type=int, default=None)


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(
        prog='bwelab', description='bandwidth estimation imitation lab')
    parser.add_argument('--version', action='version',
                        version='bwelab {}'.format(__version__))
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    p = sub.add_parser('collect', parents=[common], help='collect expert demos')
    p.add_argument('--n', type=int, default=1000)
    p.add_argument('--profiles', default=None,
                   help='comma-separated profile tags (Default: all five)')
    p.add_argument('--duration-s', type=float, default=None)
    p.add_argument('--gzip', action='store_true')
    p.add_argument('--out', required=True)
    p.set_defaults(func=_cmd_collect)

    p = sub.add_parser('train-bc', parents=[common], help='behavioral cloning')
    _bc_flags(p)
    p.add_argument('--from', dest='resume', default=None,
                   help='resume from a parameter file')
    p.add_argument('--curve', default=None)
    p.add_argument('--out', required=True)
    p.set_defaults(func=_cmd_train_bc)

    p = sub.add_parser('finetune', parents=[common], help='online PPO finetuning')
    p.add_argument('--policy', required=True)
    p.add_argument('--target', default='low_bw',
                   help='low_bw, high_bw or stable:<kbps>')
    p.add_argument('--episodes', type=int, default=None)
    p.add_argument('--kl', type=float, default=None, help='initial KL penalty')
    p.add_argument('--curve', default=None)
    p.add_argument('--out', required=True)
    p.set_defaults(func=_cmd_finetune)

    p = sub.add_parser('eval', parents=[common], help='closed-loop benchmark')
    p.add_argument('--estimators', required=True,
                   help='comma-separated: {}'.format(', '.join(ESTIMATORS)))
    p.add_argument('--traces', type=int,
                   default=config.settings.get('eval.episodes'))
    p.add_argument('--env', default=None,
                   help='target or comma-separated profiles (Default: all)')
    p.add_argument('--duration-s', type=float, default=None)
    p.add_argument('--expert', action='store_true',
                   help='co-run the UKF expert for mse_vs_expert')
    p.add_argument('--report-dir', required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser('ablate', parents=[common], help='feature group ablation')
    _bc_flags(p)
    p.add_argument('--subsets', default=None,
                   help='semicolon-separated subsets of comma-separated groups')
    p.add_argument('--report-dir', required=True)
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser('scaling', parents=[common], help='data quantity study')
    _bc_flags(p)
    p.add_argument('--sizes', required=True, help='ascending comma-separated sizes')
    p.add_argument('--out', required=True)
    p.set_defaults(func=_cmd_scaling)

    p = sub.add_parser('dagger', parents=[common], help='DAGGER augmentation')
    _bc_flags(p)
    p.add_argument('--policy', default=None,
                   help='augment once with this learner instead of the study')
    p.add_argument('--rollouts', type=int, default=None)
    p.add_argument('--rounds', type=int, default=1)
    p.add_argument('--out', required=True)
    p.set_defaults(func=_cmd_dagger)

    p = sub.add_parser('compare', parents=[common],
                       help='offline-to-online versus online PPO')
    p.add_argument('--policy', required=True)
    p.add_argument('--target', default='low_bw')
    p.add_argument('--kl-sweep', default=','.join(str(k) for k in KL_PENALTIES))
    p.add_argument('--finetune-episodes', type=int, default=75)
    p.add_argument('--scratch-episodes', type=int, default=375)
    p.add_argument('--holdout', type=int, default=30)
    p.add_argument('--report-dir', required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser('personalize', parents=[common],
                       help='UKF, pretrained and finetuned on a target')
    p.add_argument('--policy', required=True)
    p.add_argument('--target', default='low_bw')
    p.add_argument('--runs', type=int, default=5, help='finetuning seeds')
    p.add_argument('--episodes', type=int, default=None)
    p.add_argument('--holdout', type=int, default=30)
    p.add_argument('--report-dir', required=True)
    p.set_defaults(func=_cmd_personalize)

    p = sub.add_parser('replay', parents=[common], help='rerun a manifest')
    p.add_argument('manifest')
    p.set_defaults(func=_cmd_replay)
    return parser


def _configure_logging(args):
    level = logging.DEBUG if args.verbose else \
        logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def main(argv=None):
    """Run a command and return its exit code.

    0 success, 2 usage or configuration error, 3 data error or unreadable file,
    4 numerical failure.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    _configure_logging(args)
    try:
        if args.config:
            config.settings.load_from_file(args.config)
        args.seed = resolve_seed(args.seed)
        flags = OrderedDict(sorted(
            (k, v) for k, v in vars(args).items() if k != 'func'))
        manifest = RunManifest(args.command, argv, flags, args.seed)
        out = args.func(args, manifest)
        if out is not None:
            path = manifest.write(_manifest_path(out))
            print(path)
    except BweError as e:
        logger.error('%s', e)
        return e.exit_code
    except ValueError as e:
        logger.error('%s', e)
        return 2
    except (IOError, OSError) as e:
        logger.error('%s', e)
        return 3
    return 0


if __name__ == '__main__':
    sys.exit(main())
