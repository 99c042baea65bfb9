import os
import csv
import argparse

from . import backend, dispatcher, distinguisher, stats, util, errors


def parse_args(args):
    parser = argparse.ArgumentParser(prog='aesrank run')
    parser.add_argument('-c', metavar='SECTION:OPTION=VALUE', action='append', type=util.parse_commandline_config_option, default=[], help='additional configuration option in the form section:option=value')
    parser.add_argument('configfile', help='configuration file')
    parser.add_argument('command', nargs='*', default=[], help="'census ARM' or 'distinguish [REPORT]'")
    return parser.parse_args(args)


def version():
    from . import __version__
    return __version__


def split_output(filename):
    """Report filename -> (plot csv, census file) beside it"""
    base = os.path.splitext(filename)[0]
    return '{0}.plot.csv'.format(base), '{0}.censuses.json'.format(base)


def manifest_filename(filename):
    return '{0}.manifest.json'.format(filename)


def write_csv(rows, filename, fields):
    with util.atomic_write(filename) as tmpname:
        with open(tmpname, 'w', newline='') as fp:
            writer = csv.DictWriter(fp, fields, lineterminator='\n', extrasaction='ignore')
            writer.writeheader()
            for row in rows:
                writer.writerow(row)


PLOT_FIELDS = 'arm', 'position', 'key_index', 'low_rank', 'windows', 'expected'


class RunManifest(object):
    """What produced a set of output files: command, configuration, seed,
    software version, timings and the sha256 of every output"""

    def __init__(self, command, config, seed=None, timings=None):
        self.command = list(command)
        self.config = config
        self.seed = seed
        self.version = version()
        self.timings = dict(timings or {})
        self.outputs = {}

    def add_output(self, filename):
        self.outputs[os.path.basename(filename)] = util.file_digest(filename)

    def todict(self):
        config = self.config.todict() if isinstance(self.config, util.ConfigFile) else dict(self.config or {})
        return dict(command=self.command, config=config, seed=self.seed, version=self.version,
                    timings=dict((k, round(v, 3)) for k, v in self.timings.items()),
                    outputs=dict(self.outputs))

    def tofile(self, filename):
        util.dump_json(self.todict(), filename)

    def __repr__(self):
        return '{0.__class__.__name__}({1}, {2} outputs)'.format(self, ' '.join(self.command), len(self.outputs))


class Main(object):
    def __init__(self, config, command=()):
        if isinstance(config, util.ConfigFile):
            self.config = config.copy()
        else:
            raise ValueError('Configfile is the wrong type')
        self.command = list(command)
        self.timer = util.Timer()
        self.outputs = []
        self.result = self.report = None

        self.dispatcher = backend.get_dispatcher(self.config.dispatcher, default='local')
        with self.timer('setup'):
            self.experiment = distinguisher.ExperimentConfig(self.config.experiment).config

    @classmethod
    def from_args(cls, args):
        args = parse_args(args)
        if not os.path.exists(args.configfile):
            raise errors.FileError("configuration file '{0}' does not exist".format(args.configfile))
        configobj = util.ConfigFile.fromtxtfile(args.configfile, command=args.command, overrides=args.c)
        main = cls(configobj, args.command)
        main.run()
        return main

    def run(self, command=None):
        command = self.command if command is None else list(command)
        if not command:
            raise errors.UsageError("no command given, expected 'census ARM' or 'distinguish [REPORT]'")
        action, rest = command[0], command[1:]
        if action == 'census':
            return self.census(rest[0] if rest else 'aes')
        if action == 'distinguish':
            return self.distinguish(rest[0] if rest else None)
        raise errors.UsageError("unknown command '{0}'".format(action))

    def census(self, arm_name):
        """Rank censuses of one arm, stored at the dispatcher destination"""
        arm = backend.get_arm(arm_name, self.experiment)
        with self.timer('census'):
            self.result = distinguisher.collect([arm], self.dispatcher)
        self.store(dict(arm=arm.name, seed=self.experiment.seed, rounds=arm.rounds_label() or 'none'))
        return self.result

    def distinguish(self, report=None):
        """Both arms of the experiment, the verdict and the figure data.

        With a report filename the verdict is written as JSON, the figure data
        as CSV and the censuses as JSON beside it; otherwise the censuses go
        to the dispatcher destination."""
        with self.timer('experiment'):
            aes_censuses, random_censuses = distinguisher.run_experiment(self.experiment, self.dispatcher)
        self.result = aes_censuses + random_censuses
        if report:
            plotfile, censusfile = split_output(report)
            self.dispatcher.config.destination = dispatcher.default_destination(censusfile)
        self.store(dict(arm='distinguish', seed=self.experiment.seed,
                        rounds=aes_censuses[0].rounds if aes_censuses else 'none'))

        with self.timer('statistics'):
            self.report = stats.verdict(aes_censuses, random_censuses, self.experiment.bins, self.experiment.alpha)
        if report:
            data = self.report.todict()
            data.update(tau=self.experiment.tau, windows=self.experiment.windows or distinguisher.WINDOWS,
                        rounds=aes_censuses[0].rounds, seed=self.experiment.seed)
            util.dump_json(data, report)
            self.outputs.append(report)
            write_csv(stats.plot_rows(aes_censuses, random_censuses, self.experiment.bins.n), plotfile, PLOT_FIELDS)
            self.outputs.append(plotfile)
        return self.report

    def store(self, opts):
        destination = self.dispatcher.config.destination
        destination.set_final_options(opts)
        destination.set_config(self.config)
        filename = destination.store(self.result)
        if filename:
            self.outputs.append(filename)
        return filename

    def manifest(self):
        manifest = RunManifest(self.command, self.config, self.experiment.seed, self.timer.timings)
        for filename in self.outputs:
            manifest.add_output(filename)
        return manifest

    def write_manifest(self, filename):
        self.manifest().tofile(filename)
        return filename
