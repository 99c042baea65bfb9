"""Chosen-plaintext sets, the sliding-window rank census and the
random-key-sample experiment.

Window k (1-based) of an ordered set holds the embeddings of elements
k .. k + window_size - 1; with 2^16 elements and windows of 31745 rows
there are 33792 windows."""

import warnings

import numpy as np

from . import util, errors, gf2, aes, prng, embedding, census, stats, backend, dispatcher

SET_SIZE = 1 << 16
SPAN = stats.RANK_DIMENSION
WINDOWS = SET_SIZE - SPAN + 1
CONVENTIONS = 'primary', 'swapped'
LAST_ROUNDS = 'atypical', 'typical'
FULL_SCALE_TAU = 70

_AES_PARAMS = []


def aes_params():
    """EmbeddingParams.aes(), built once per process"""
    if not _AES_PARAMS:
        _AES_PARAMS.append(embedding.EmbeddingParams.aes())
    return _AES_PARAMS[0]


### SETS

def build_sbar(convention='primary'):
    """All 2^16 blocks that are zero outside the last two bytes, in
    lexicographic order of the pair; the primary convention makes byte 14
    (0-based) the dominant coordinate, the swapped one byte 15"""
    if convention not in CONVENTIONS:
        raise errors.ConfigError("unknown byte convention '{0}', expected one of {1}".format(convention, ', '.join(CONVENTIONS)))
    index = np.arange(SET_SIZE)
    high, low = (14, 15) if convention == 'primary' else (15, 14)
    blocks = np.zeros((SET_SIZE, aes.BLOCKSIZE), dtype=np.uint8)
    blocks[:, high] = index >> 8
    blocks[:, low] = index & 0xff
    return blocks


def encrypt_set(S, key, spec=aes.FULL, sbox=aes.SBOX):
    return aes.encrypt_blocks(key, S, spec, sbox)


def random_sample_set(seed, index=0):
    """2^16 distinct pseudorandom blocks, baseline number index of the experiment"""
    return prng.baseline_blocks(seed, index, SET_SIZE)


def window_count(set_size=SET_SIZE, window_size=SPAN):
    return set_size - window_size + 1


def strided_starts(count=None, total=WINDOWS):
    """count evenly spread 1-based window starts including the first and the last
    one; None (or a count of at least total) means every window"""
    if count is None or count >= total:
        return list(range(1, total + 1))
    if count < 1:
        raise errors.WindowError('at least one window is required, got {0}'.format(count))
    if count == 1:
        return [1]
    # floor(x + 1/2) is monotone, so starts spaced at least 1 apart stay distinct
    return np.floor(np.linspace(1, total, count) + 0.5).astype(np.int64).tolist()


def validate_starts(starts, total):
    for start in starts:
        if not 1 <= start <= total:
            raise errors.WindowError('window start {0} outside 1..{1}'.format(start, total))


### ALGORITHM B

def algorithm_b(S, window_starts=None, params=None, window_size=None, threshold=gf2.DEFAULT_THRESHOLD, shared_prefix=False,
                arm='custom', key_index=0, seed=None, rounds=None):
    """Rank census of the windows of S starting at window_starts (1-based, all by default).

    Only the rows covered by the requested windows are embedded. With
    shared_prefix, two consecutive windows are ranked from one decomposition
    of the rows they share plus a membership test for the remaining row."""
    S = aes.as_blocks(S)
    if params is None:
        params = aes_params()
    if window_size is None:
        window_size = embedding.dimension_bound(params)
    total = window_count(len(S), window_size)
    if total < 1:
        raise errors.WindowError('a set of {0} elements has no window of {1} rows'.format(len(S), window_size))
    starts = list(range(1, total + 1)) if window_starts is None else sorted(int(s) for s in window_starts)
    validate_starts(starts, total)

    result = census.RankCensus(arm, key_index, seed, rounds)
    for run in _overlapping_runs(starts, window_size):
        _rank_run(result, S, run, params, window_size, threshold, shared_prefix)
    return result


def _overlapping_runs(starts, window_size):
    """Split sorted starts into groups whose windows overlap, so that every
    group is embedded once"""
    run = []
    for start in starts:
        if run and start > run[-1] + window_size - 1:
            yield run
            run = []
        run.append(start)
    if run:
        yield run


def _rank_run(result, S, starts, params, window_size, threshold, shared_prefix):
    offset = starts[0] - 1
    rows = embedding.embed_blocks(S[offset:starts[-1] - 1 + window_size], params)

    def window(a, size):
        return gf2.BitMatrix(size, rows.ncols, rows.data[a - offset:a - offset + size])

    pending = set(starts)
    for start in starts:
        if start not in pending:
            continue
        pending.discard(start)
        a = start - 1
        if shared_prefix and start + 1 in pending and window_size > 1:
            pending.discard(start + 1)
            shared = gf2.pluq_decompose(window(a + 1, window_size - 1), threshold)
            first = shared.rank + (0 if gf2.in_span(shared, rows.data[a - offset]) else 1)
            second = shared.rank + (0 if gf2.in_span(shared, rows.data[a + window_size - offset]) else 1)
            result.add(start, first)
            result.add(start + 1, second)
        else:
            result.add(start, gf2.rank(window(a, window_size), threshold))


def set_span_dimension(S, params=None, threshold=gf2.DEFAULT_THRESHOLD):
    """Dimension of the span of the embeddings of every element of S"""
    if params is None:
        params = aes_params()
    return gf2.rank(embedding.embed_blocks(S, params), threshold)


### EXPERIMENT

class ExperimentConfig(util.ConfigurableObject):
    def parse_config(self, config):
        super(ExperimentConfig, self).parse_config(config)
        self.config.tau = int(config.pop('tau', 2))  # number of keys and of random baselines
        if self.config.tau < 1:
            raise errors.UsageError('tau must be at least 1, got {0}'.format(self.config.tau))
        self.config.rounds = util.parse_optional_int(config.pop('rounds', 'full'))  # 'full' or 0..N
        aes.RoundSpec(self.config.rounds)
        self.config.keysize = int(config.pop('keysize', 128))
        if self.config.keysize not in (128, 192, 256):
            raise errors.ConfigError('keysize must be 128, 192 or 256, got {0}'.format(self.config.keysize))
        if self.config.rounds is not None and self.config.rounds > aes.ROUNDS[self.config.keysize // 8]:
            raise errors.RoundError('AES-{0} has {1} rounds, {2} requested'.format(
                self.config.keysize, aes.ROUNDS[self.config.keysize // 8], self.config.rounds))
        key = config.pop('key', None)  # optional hex key, replaces key number 0
        self.config.last_round = config.pop('last_round', 'atypical').strip().lower()  # final reduced round without (atypical) or with MixColumns
        if self.config.last_round not in LAST_ROUNDS:
            raise errors.ConfigError("last_round must be one of {0}, got '{1}'".format(', '.join(LAST_ROUNDS), self.config.last_round))
        self.config.key = key.strip().lower() if key and key.strip() else None
        if self.config.key is not None:
            aes.CipherKey(self.config.key)
        self.config.seed = int(config.pop('seed', 0))
        if not 0 <= self.config.seed < prng.SEED_LIMIT:
            raise errors.ConfigError('seed must be a 64-bit unsigned integer, got {0}'.format(self.config.seed))
        windows = str(config.pop('windows', 512)).strip().lower()  # windows per sample, or 'all'
        self.config.windows = None if windows == 'all' else int(windows)
        if self.config.windows is not None and self.config.windows < 1:
            raise errors.UsageError('windows must be at least 1, got {0}'.format(self.config.windows))
        self.config.window_size = util.parse_optional_int(config.pop('window_size', None))  # rows per window, the span bound by default
        self.config.threshold = util.parse_optional_int(config.pop('threshold', gf2.DEFAULT_THRESHOLD))  # cache block threshold in columns, 'none' for whole matrices
        self.config.shared_prefix = util.parse_bool(config.pop('shared_prefix', 'false'))
        self.config.convention = config.pop('convention', 'primary').strip().lower()
        if self.config.convention not in CONVENTIONS:
            raise errors.ConfigError("convention must be one of {0}, got '{1}'".format(', '.join(CONVENTIONS), self.config.convention))
        self.config.windows_per_job = int(config.pop('windows_per_job', 64))
        if self.config.windows_per_job < 1:
            raise errors.ConfigError('windows_per_job must be at least 1')
        self.config.alpha = float(config.pop('alpha', stats.DEFAULT_THRESHOLD))  # verdict threshold
        if not 0 < self.config.alpha < 1:
            raise errors.ConfigError('alpha must lie strictly between 0 and 1, got {0}'.format(self.config.alpha))
        self.config.bins = stats.parse_bins(config.pop('bins', '2'))
        self.config.full_scale = util.parse_bool(config.pop('full_scale', 'false'))  # acknowledges the cost of tau >= 70 or all windows


def round_spec(experiment):
    """RoundSpec of an experiment. A typical last round keeps MixColumns in the
    final round of a reduced cipher; the full cipher is standard AES either way."""
    if experiment.last_round == 'atypical':
        return aes.RoundSpec(experiment.rounds, atypical_last=True)
    return aes.RoundSpec(experiment.rounds)


def experiment_config(cfg):
    """ExperimentConfig section from a dict, an ExperimentConfig or a parsed section"""
    if isinstance(cfg, ExperimentConfig):
        return cfg.config
    if isinstance(cfg, util.ConfigFile):
        cfg = cfg.experiment
    return ExperimentConfig(cfg).config


def check_cost(experiment):
    if experiment.tau >= FULL_SCALE_TAU or experiment.windows is None:
        if not experiment.full_scale:
            raise errors.UsageError('tau = {0} with {1} windows per sample is a full-scale run costing about 2^48 encryptions; '
                                    'set full_scale = true to proceed'.format(experiment.tau, experiment.windows or 'all'))
        warnings.warn('full-scale run: tau = {0}, {1} windows per sample, expect weeks of computation'.format(
            experiment.tau, experiment.windows or 'all'))


class _WindowArm(backend.ArmBase):
    def window_size(self):
        return self.config.window_size or SPAN

    def window_starts(self):
        return strided_starts(self.config.windows, window_count(SET_SIZE, self.window_size()))

    def process_job(self, job):
        S = self.ordered_set(job.key_index)
        return algorithm_b(S, job.starts, window_size=self.window_size(), threshold=self.config.threshold,
                           shared_prefix=self.config.shared_prefix, arm=self.name, key_index=job.key_index,
                           seed=self.config.seed, rounds=self.rounds_label())


class PlainArm(_WindowArm):
    name = 'plain'

    def samples(self):
        return range(1)

    def ordered_set(self, index):
        return build_sbar(self.config.convention)


class AesArm(_WindowArm):
    name = 'aes'

    def key(self, index):
        if index == 0 and self.config.key is not None:
            return aes.CipherKey(self.config.key)
        return prng.experiment_key(self.config.seed, index, self.config.keysize)

    def ordered_set(self, index):
        return encrypt_set(build_sbar(self.config.convention), self.key(index), round_spec(self.config))

    def rounds_label(self):
        label = round_spec(self.config).label()
        rounds = self.config.rounds
        if self.config.last_round == 'typical' and rounds is not None and 0 < rounds < aes.ROUNDS[self.config.keysize // 8]:
            label += '-typical'
        return label


class RandomArm(_WindowArm):
    name = 'random'

    def ordered_set(self, index):
        return random_sample_set(self.config.seed, index)


def default_dispatcher():
    return dispatcher.SingleCore(dict(quiet='true'))


def collect(arms, dispatch=None):
    """Merged censuses of every job of every arm, sorted by arm and key index"""
    if dispatch is None:
        dispatch = default_dispatcher()

    def jobs():
        for arm in arms:
            for job in arm.generate_jobs():
                yield job
    return dispatch.sum(dispatch.process_jobs(jobs()))


def run_experiment(cfg, dispatch=None):
    """tau AES censuses and tau random censuses; pooling and testing is left to stats.verdict"""
    experiment = experiment_config(cfg)
    check_cost(experiment)
    results = collect([AesArm(experiment), RandomArm(experiment)], dispatch)
    return [c for c in results if c.arm == 'aes'], [c for c in results if c.arm == 'random']


def single_key_experiment(cfg, dispatch=None):
    """Chi-square p-value of every individual sample against theory.

    This only documents how unreliable a single key is; it never produces a
    verdict."""
    experiment = experiment_config(cfg)
    aes_censuses, random_censuses = run_experiment(experiment, dispatch)
    distribution = stats.square_rank_distribution(experiment.bins.n)
    rows = []
    for c in aes_censuses + random_censuses:
        observed = experiment.bins.tally(c.counts)
        result = stats.chi_square(observed, stats.expected_census(c.total, experiment.bins, distribution), experiment.alpha)
        rows.append(dict(arm=c.arm, key_index=c.key_index, windows=c.total, observed=observed.tolist(),
                         chi2=result.statistic, p_value=result.p_value))
    return rows
