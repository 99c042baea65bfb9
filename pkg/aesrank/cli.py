"""The aesrank command line: theory, census, distinguish, rank and selftest.

Exit codes: 0 on success, 1 when a self-test fails, the verdict is 'not
distinguished' or a run fails, 2 on usage and configuration errors."""

import os
import sys
import argparse

from . import util, errors, gf2, stats, distinguisher, selftest, main as mainmodule

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2
USAGE_ERRORS = errors.UsageError, errors.ConfigError, errors.KeyLengthError, errors.RoundError, errors.WindowError, errors.StatisticsError


def parse_windows(s):
    s = s.strip().lower()
    if s == 'all':
        return s
    try:
        value = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError("windows must be a positive number or 'all', got '{0}'".format(s))
    if value < 1:
        raise argparse.ArgumentTypeError('windows must be at least 1, got {0}'.format(value))
    return str(value)


def build_parser():
    parser = argparse.ArgumentParser(prog='aesrank', description='rank-based distinguisher of AES encryption samples')
    subparsers = parser.add_subparsers(dest='subcommand', metavar='COMMAND')

    theory = subparsers.add_parser('theory', help='rank distribution of uniform square matrices and expected census')
    theory.add_argument('--n', type=int, default=stats.RANK_DIMENSION, help='matrix dimension (default: %(default)s)')
    theory.add_argument('--windows', type=int, default=distinguisher.WINDOWS, help='number of windows (default: %(default)s)')
    theory.add_argument('--bins', help="'2', '3' or explicit ranges such as '31745,31744,:31743' (default: the experiment bins of --config, else 3)")
    util.argparse_common_arguments(theory, 'out', 'config')
    theory.set_defaults(func=cmd_theory)

    census = subparsers.add_parser('census', help='rank census of the plain set, an encrypted set or a random set')
    source = census.add_mutually_exclusive_group()
    source.add_argument('--plain', action='store_true', help='the chosen-plaintext set itself')
    source.add_argument('--rounds', help="AES rounds applied to the chosen-plaintext set, or 'full'")
    source.add_argument('--random', action='store_true', help='pseudorandom ordered sets')
    census.add_argument('--last-round', choices=distinguisher.LAST_ROUNDS,
                        help="final round of a reduced cipher: 'atypical' without MixColumns (default) or 'typical' with it")
    census.add_argument('--key', help='hex key used for key number 0')
    census.add_argument('--tau', type=int, help='number of keys or random sets (default: 1)')
    census.add_argument('--keysize', type=int, choices=(128, 192, 256))
    census.add_argument('--convention', choices=distinguisher.CONVENTIONS, help='byte order of the chosen-plaintext pair')
    census.add_argument('--shared-prefix', action='store_true', help='rank consecutive windows from their shared rows')
    util.argparse_common_arguments(census, 'seed', 'threads', 'out', 'config', 'threshold')
    census.add_argument('--windows', type=parse_windows, metavar='COUNT', help="number of evenly strided windows per set, or 'all'")
    census.set_defaults(func=cmd_census)

    distinguish = subparsers.add_parser('distinguish', help='random-key-sample experiment: tau keys against tau random sets')
    distinguish.add_argument('--tau', type=int, help='number of keys and of random sets (default: 2)')
    distinguish.add_argument('--rounds', help="AES rounds, or 'full' (default)")
    distinguish.add_argument('--last-round', choices=distinguisher.LAST_ROUNDS,
                             help="final round of a reduced cipher: 'atypical' without MixColumns (default) or 'typical' with it")
    distinguish.add_argument('--bins', help="'2' (default), '3' or explicit ranges")
    distinguish.add_argument('--alpha', type=float, help='significance threshold (default: 0.05)')
    distinguish.add_argument('--full-scale', action='store_true', help='tau = 70 with every window')
    distinguish.add_argument('--i-know-this-costs-2pow48', dest='acknowledge', action='store_true', help='required for full-scale runs')
    distinguish.add_argument('--per-key', action='store_true', help='chi-square p-value of every single sample instead of a verdict')
    util.argparse_common_arguments(distinguish, 'seed', 'threads', 'out', 'config', 'threshold')
    distinguish.add_argument('--windows', type=parse_windows, metavar='COUNT', help="number of evenly strided windows per set, or 'all'")
    distinguish.set_defaults(func=cmd_distinguish)

    rank = subparsers.add_parser('rank', help='rank of a GF2M matrix file')
    rank.add_argument('filename', help='matrix in GF2M format')
    util.argparse_common_arguments(rank, 'threshold', 'out')
    rank.set_defaults(func=cmd_rank)

    test = subparsers.add_parser('selftest', help='known-answer checks of the installation')
    test.add_argument('--quick', action='store_true', help='skip the full-size window check')
    test.set_defaults(func=cmd_selftest)
    return parser


def load_config(args, command):
    """Configuration file, then -c overrides; explicit flags are applied by the caller"""
    if getattr(args, 'config', None):
        return util.ConfigFile.fromtxtfile(args.config, command=command, overrides=args.c)
    config = util.ConfigFile('command line', command=command)
    for section, option, value in getattr(args, 'c', []):
        config.update(section, {option: value})
    return config


def apply_common(config, args):
    config.update('experiment', dict(seed=args.seed, windows=args.windows, threshold=args.threshold))
    if args.threads is not None:
        config.update('dispatcher', dict(ncores=args.threads))


def cmd_theory(args, command):
    config = load_config(args, command)
    spec = args.bins or config.experiment.get('bins', '3')
    bins = stats.parse_bins(spec, args.n) if args.n >= 2 else None
    table = stats.theory_table(args.n, args.windows, bins)
    util.statusnl('n = {0}'.format(table['n']))
    util.statusnl('P(rank = n)      = {0:.7f}'.format(table['full']))
    util.statusnl('P(rank = n - 1)  = {0:.7f}'.format(table['corank_one']))
    util.statusnl('P(rank <= n - 2) = {0:.7f}'.format(table['tail']))
    for label, expected in zip(table['bins'], table['expected']):
        util.statusnl('expected {0:>10}: {1:.1f}'.format(label, expected))
    if args.out:
        util.dump_json(table, args.out)
        manifest = mainmodule.RunManifest(command, config)
        manifest.add_output(args.out)
        manifest.tofile(mainmodule.manifest_filename(args.out))
    return EXIT_OK


def cmd_census(args, command):
    config = load_config(args, command)
    apply_common(config, args)
    arm = 'plain' if args.plain else 'random' if args.random else 'aes'
    tau = args.tau if args.tau is not None else config.experiment.get('tau', 1)
    config.update('experiment', dict(rounds=args.rounds, key=args.key, tau=tau, keysize=args.keysize, convention=args.convention,
                                     last_round=args.last_round,
                                     shared_prefix='true' if args.shared_prefix else None))
    if args.out:
        config.update('dispatcher', dict(destination=args.out, overwrite='true'))

    main = mainmodule.Main(config, ['census', arm])
    censuses = main.run()
    for census in censuses:
        ranks = ', '.join('{0}: {1}'.format(rank, census.counts[rank]) for rank in sorted(census.counts, reverse=True))
        util.statusnl('{0} #{1} ({2} windows): {3}'.format(census.arm, census.key_index, census.total, ranks))
    for filename in main.outputs:
        main.write_manifest(mainmodule.manifest_filename(filename))
        util.statusnl('census written to {0}'.format(filename))
    return EXIT_OK


def cmd_distinguish(args, command):
    config = load_config(args, command)
    apply_common(config, args)
    tau = args.tau
    if args.full_scale:
        if not args.acknowledge:
            raise errors.UsageError('--full-scale requires --i-know-this-costs-2pow48')
        tau = tau if tau is not None else distinguisher.FULL_SCALE_TAU
        config.update('experiment', dict(windows='all'))
    config.update('experiment', dict(tau=tau, rounds=args.rounds, last_round=args.last_round, bins=args.bins, alpha=args.alpha,
                                     full_scale='true' if args.acknowledge else None))
    out = args.out or 'report.json'

    main = mainmodule.Main(config, ['distinguish', out])
    if args.per_key:
        rows = distinguisher.single_key_experiment(main.experiment, main.dispatcher)
        for row in rows:
            util.statusnl('{0:>6} #{1:<3} chi2 = {2:10.4f}  p = {3:.4g}'.format(row['arm'], row['key_index'], row['chi2'], row['p_value']))
        filename = '{0}.perkey.json'.format(os.path.splitext(out)[0])
        util.dump_json(rows, filename)
        main.outputs.append(filename)
        main.write_manifest(mainmodule.manifest_filename(filename))
        return EXIT_OK

    report = main.run()
    for arm in ('aes', 'random'):
        result = report.results[arm]
        util.statusnl('{0:>6}: observed {1}, expected {2}, chi2 = {3:.4f}, p = {4:.4g}'.format(
            arm, report.observed[arm].tolist(), ['{0:.1f}'.format(e) for e in report.expected[arm]], result.statistic, result.p_value))
    util.statusnl('verdict: {0}'.format('distinguished' if report.distinguished else 'not distinguished'))
    main.write_manifest(mainmodule.manifest_filename(out))
    return EXIT_OK if report.distinguished else EXIT_FAILURE


def cmd_rank(args, command):
    if not os.path.exists(args.filename):
        raise errors.FileError('matrix file {0} does not exist'.format(args.filename))
    matrix = gf2.BitMatrix.fromfile(args.filename)
    threshold = args.threshold if args.threshold is not None else gf2.DEFAULT_THRESHOLD
    rank = gf2.rank(matrix, threshold)
    util.statusnl('{0}x{1} matrix, rank {2}'.format(matrix.nrows, matrix.ncols, rank))
    if args.out:
        util.dump_json(dict(filename=os.path.basename(args.filename), nrows=matrix.nrows, ncols=matrix.ncols, rank=rank,
                            threshold=threshold), args.out)
        manifest = mainmodule.RunManifest(command, util.ConfigFile('command line', command=command))
        manifest.add_output(args.out)
        manifest.tofile(mainmodule.manifest_filename(args.out))
    return EXIT_OK


def cmd_selftest(args, command):
    results = selftest.run(quick=args.quick)
    return EXIT_OK if selftest.passed(results) else EXIT_FAILURE


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.subcommand:
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args, ['aesrank'] + list(argv))
    except USAGE_ERRORS as e:
        sys.stderr.write('error: {0}\n'.format(e))
        return EXIT_USAGE
    except errors.ExceptionBase as e:
        sys.stderr.write('error: {0}\n'.format(e))
        return EXIT_FAILURE
    except ValueError as e:
        sys.stderr.write('error: {0}\n'.format(e))
        return EXIT_USAGE
