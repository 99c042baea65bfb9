import time
import multiprocessing

from . import util, errors, census


class Destination(object):
    type = filename = overwrite = config = None
    opts = {}

    def set_final_filename(self, filename, overwrite):
        self.type = 'final'
        self.filename = filename
        self.overwrite = overwrite

    def set_final_options(self, opts):
        if opts is not False:
            self.opts = opts

    def set_config(self, conf):
        self.config = conf

    def store(self, censuses):
        if not censuses:
            raise ValueError('Empty output, no census was produced')
        if self.type == 'final':
            for c in censuses:
                if self.config is not None:
                    c.config = self.config
            fn = self.final_filename()
            census.save(censuses, fn)
            return fn

    def final_filename(self):
        fn = self.filename.format(**self.opts)
        if not self.overwrite:
            fn = util.find_unused_filename(fn)
        return fn


class DispatcherBase(util.ConfigurableObject):
    def parse_config(self, config):
        super(DispatcherBase, self).parse_config(config)
        self.config.destination = Destination()
        destination = config.pop('destination', 'census_{arm}_{seed}.json')  # optional, formatted with arm, rounds and seed
        overwrite = util.parse_bool(config.pop('overwrite', 'false'))  # by default: numbered files in the form census_aes_0_2.json
        self.config.destination.set_final_filename(destination, overwrite)
        self.config.quiet = util.parse_bool(config.pop('quiet', 'false'))  # suppress the status line

    def process_jobs(self, jobs):
        raise NotImplementedError

    def sum(self, results):
        return census.chunked_sum(self.progress(results))

    def progress(self, results):
        start = time.time()
        for count, result in enumerate(results, 1):
            if not self.config.quiet:
                util.status('{0}: {1} jobs done, {2:.1f}s elapsed'.format(time.ctime(), count, time.time() - start))
            yield result
        if not self.config.quiet:
            util.statuseol()


# The simplest possible dispatcher. Does the work all by itself on a single
# thread/core/node. 'Local' will most likely suit your needs better.
class SingleCore(DispatcherBase):
    def process_jobs(self, jobs):
        from . import backend
        for job in jobs:
            yield backend.process_job(job)


# Dispatch multiple worker processes locally, while doing the summation in the main process
class Local(DispatcherBase):
    def parse_config(self, config):
        super(Local, self).parse_config(config)
        self.config.ncores = int(config.pop('ncores', 0))  # optionally, specify number of cores (autodetect by default)
        if self.config.ncores < 0:
            raise errors.ConfigError('ncores must be non-negative, got {0}'.format(self.config.ncores))
        if self.config.ncores == 0:
            self.config.ncores = multiprocessing.cpu_count()

    def process_jobs(self, jobs):
        from . import backend
        if self.config.ncores == 1:
            for job in jobs:
                yield backend.process_job(job)
            return
        pool = multiprocessing.Pool(self.config.ncores)
        try:
            # ordered imap keeps merged results independent of scheduling
            for result in pool.imap(backend.process_job, jobs):
                yield result
        except Exception as e:
            pool.terminate()
            raise errors.SubprocessError('worker process failed: {0!r}'.format(e))
        else:
            pool.close()
        finally:
            pool.join()


def default_destination(filename):
    """Destination writing to filename as-is, overwriting"""
    destination = Destination()
    destination.set_final_filename(filename, True)
    return destination
