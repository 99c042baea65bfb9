from . import util, errors, dispatcher


class Job(object):
    weight = 1.  # estimate of job difficulty (number of windows)

    def __init__(self, **kwargs):
        self.__dict__.update(kwargs)

    def __repr__(self):
        return '{0.__class__.__name__}({0.arm_name} #{0.key_index}, {1} windows)'.format(self, len(self.starts))


class ArmBase(util.ConfigurableObject):
    """One input of the distinguisher: generates and processes Job()s.

    Arms are built from the parsed experiment section, so there is no
    guarantee that generate_jobs() and process_job() run on the same
    instance, not even in the same process."""

    name = None

    def samples(self):
        """Key or baseline indices handled by this arm"""
        return range(self.config.tau)

    def ordered_set(self, index):
        """The ordered set of blocks for sample index, shape (2**16, 16)"""
        raise NotImplementedError

    def rounds_label(self):
        return None

    def window_starts(self):
        raise NotImplementedError

    def generate_jobs(self):
        starts = self.window_starts()
        for index in self.samples():
            for chunk in util.grouper(starts, self.config.windows_per_job):
                job = Job(experiment=self.config, arm_name=self.name, key_index=index, starts=chunk)
                job.weight = len(chunk)
                yield job

    def process_job(self, job):
        """Receives a Job() instance, returns a RankCensus over its windows"""
        raise NotImplementedError


def process_job(job):
    """Top level entry point for worker processes"""
    return get_arm(job.arm_name, job.experiment).process_job(job)


def get_dispatcher(config, default=None):
    return _get_backend(config, 'dispatcher', dispatcher.DispatcherBase, default=default)


def get_arm(name, experiment):
    """Arm by name ('plain', 'aes' or 'random') on a parsed experiment section"""
    from . import distinguisher
    clsname = '{0}arm'.format(name.strip().lower())
    names = dict((n.lower(), n) for n in dir(distinguisher))
    if clsname not in names:
        raise errors.ConfigError("unknown arm '{0}'".format(name))
    cls = getattr(distinguisher, names[clsname])
    if not issubclass(cls, ArmBase):
        raise errors.ConfigError("'{0}' is not an arm".format(name))
    return cls(experiment)


def _get_backend(config, section, basecls, default=None, args=[], kwargs={}):
    if isinstance(config, util.ConfigSection):
        return config.class_(config, *args, **kwargs)
    config = dict(config)
    typename = config.pop('type', default)
    if typename is None:
        raise errors.ConfigError("required option 'type' not given in section '{0}'".format(section))
    clsname = typename.strip().lower()
    names = dict((name.lower(), name) for name in dir(dispatcher))
    if clsname in names:
        cls = getattr(dispatcher, names[clsname])
        if isinstance(cls, type) and issubclass(cls, basecls):
            return cls(config, *args, **kwargs)
        raise errors.ConfigError("type '{0}' not compatible in section '{1}': expected class derived from '{2}'".format(typename, section, basecls.__name__))
    raise errors.ConfigError("invalid type '{0}' in section '{1}'".format(typename, section))
