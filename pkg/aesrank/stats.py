"""Rank statistics of uniform GF(2) matrices and the chi-square distinguisher."""

import math

import numpy as np
import scipy.special

from . import errors

DEFAULT_THRESHOLD = 0.05
RANK_DIMENSION = 31745
# ranks below n - STORED_DEFICIENCY have probability below 2**-4096
STORED_DEFICIENCY = 64


### THEORETICAL DISTRIBUTION

def _log2_survival_prefix(n):
    """L[k] = sum over j = 1..k of log2(1 - 2**-j), for k = 0..n"""
    j = np.arange(1, n + 1, dtype=np.float64)
    terms = np.log1p(-np.exp2(-j)) / math.log(2)
    return np.concatenate([[0.0], np.cumsum(terms)])


class RankDistribution(object):
    """Probability that a uniform n x n GF(2) matrix has rank r.

    Only ranks n - STORED_DEFICIENCY .. n are stored for large n, the rest
    carry no mass at double precision."""

    def __init__(self, n, ranks, log2p):
        self.n = n
        self.ranks = ranks
        self.log2p = log2p
        self.probabilities = np.exp2(log2p)

    def probability(self, r):
        if r < self.ranks[0] or r > self.n:
            return 0.0
        return float(self.probabilities[r - self.ranks[0]])

    def mass(self, low, high):
        """P(low <= rank <= high)"""
        low = max(low, int(self.ranks[0]))
        high = min(high, self.n)
        if high < low:
            return 0.0
        return float(self.probabilities[low - self.ranks[0]:high - self.ranks[0] + 1].sum())

    @property
    def full(self):
        return self.probability(self.n)

    @property
    def corank_one(self):
        return self.probability(self.n - 1)

    @property
    def tail(self):
        """P(rank <= n - 2)"""
        return self.mass(0, self.n - 2)

    def total(self):
        return float(self.probabilities.sum())

    def todict(self):
        return dict(n=self.n, full=self.full, corank_one=self.corank_one, tail=self.tail,
                    probabilities=dict((int(r), float(p)) for r, p in zip(self.ranks, self.probabilities)))

    def __repr__(self):
        return '{0.__class__.__name__}(n={0.n}, full={0.full:.7f}, n-1={0.corank_one:.7f}, tail={0.tail:.7f})'.format(self)


def square_rank_distribution(n):
    if n < 1:
        raise errors.StatisticsError('matrix dimension must be positive, got {0}'.format(n))
    L = _log2_survival_prefix(n)
    ranks = np.arange(max(0, n - STORED_DEFICIENCY), n + 1)
    deficiency = n - ranks
    log2p = -(deficiency.astype(np.float64) ** 2) + 2 * (L[n] - L[deficiency]) - L[ranks]
    return RankDistribution(n, ranks, log2p)


def rank_counts(n):
    """Exact number of n x n GF(2) matrices of every rank 0..n"""
    counts = []
    for r in range(n + 1):
        numerator, denominator = 1, 1
        for i in range(r):
            numerator *= (2**n - 2**i) ** 2
            denominator *= 2**r - 2**i
        counts.append(numerator // denominator)
    return counts


def _insert(basis, v):
    """Canonical reduced basis of span(basis, v); basis is a sorted tuple"""
    for w in sorted(basis, reverse=True):
        if v & (1 << (w.bit_length() - 1)):
            v ^= w
    if not v:
        return basis
    lead = 1 << (v.bit_length() - 1)
    reduced = [w ^ v if w & lead else w for w in basis]
    return tuple(sorted(reduced + [v]))


def enumerate_rank_counts(n):
    """Rank counts of all n x n matrices, found by growing every row span one
    row at a time; all 2**n choices of each row are visited per span"""
    if n > 6:
        raise ValueError('exhaustive enumeration is limited to n <= 6')
    spans = {(): 1}
    transitions = {}
    for _ in range(n):
        grown = {}
        for basis, count in spans.items():
            if basis not in transitions:
                successors = {}
                for v in range(1 << n):
                    key = _insert(basis, v)
                    successors[key] = successors.get(key, 0) + 1
                transitions[basis] = successors
            for key, multiplicity in transitions[basis].items():
                grown[key] = grown.get(key, 0) + count * multiplicity
        spans = grown
    counts = [0] * (n + 1)
    for basis, count in spans.items():
        counts[len(basis)] += count
    return counts


### BINS

class Binning(object):
    """A partition of the ranks 0..n into inclusive ranges, highest first"""

    def __init__(self, n, ranges):
        self.n = n
        self.ranges = sorted(((int(lo), int(hi)) for lo, hi in ranges), reverse=True)
        expected_high = n
        for lo, hi in self.ranges:
            if lo > hi or hi != expected_high:
                raise errors.StatisticsError('bins {0} do not partition the ranks 0..{1}'.format(self.ranges, n))
            expected_high = lo - 1
        if expected_high != -1:
            raise errors.StatisticsError('bins {0} do not partition the ranks 0..{1}'.format(self.ranges, n))
        if len(self.ranges) < 2:
            raise errors.StatisticsError('at least two bins are required')

    def __len__(self):
        return len(self.ranges)

    @property
    def labels(self):
        labels = []
        for lo, hi in self.ranges:
            if lo == hi:
                labels.append(str(lo))
            elif hi == self.n:
                labels.append('>{0}'.format(lo - 1))
            elif lo == 0:
                labels.append('<={0}'.format(hi))
            else:
                labels.append('{0}-{1}'.format(lo, hi))
        return labels

    def tally(self, counts):
        """Bin a {rank: count} mapping"""
        out = np.zeros(len(self.ranges), dtype=np.int64)
        for rank, count in counts.items():
            rank = int(rank)
            if not 0 <= rank <= self.n:
                raise errors.StatisticsError('rank {0} outside 0..{1}'.format(rank, self.n))
            for i, (lo, hi) in enumerate(self.ranges):
                if lo <= rank <= hi:
                    out[i] += count
                    break
        return out

    def probabilities(self, distribution):
        return np.array([distribution.mass(lo, hi) for lo, hi in self.ranges])

    def __repr__(self):
        return '{0.__class__.__name__}({1})'.format(self, ', '.join(self.labels))


def default_bins(n=RANK_DIMENSION, count=2):
    if count == 2:
        return Binning(n, [(n - 1, n), (0, n - 2)])
    if count == 3:
        return Binning(n, [(n, n), (n - 1, n - 1), (0, n - 2)])
    raise errors.StatisticsError('default binning exists for 2 or 3 bins, not {0}'.format(count))


def parse_bins(spec, n=RANK_DIMENSION):
    """'2', '3' or a comma separated list of ranks and ranges: 'a', 'a-b', ':b', 'a:'"""
    spec = str(spec).strip()
    if spec in ('2', '3'):
        return default_bins(n, int(spec))
    ranges = []
    for item in spec.split(','):
        item = item.strip()
        try:
            if item.startswith(':'):
                ranges.append((0, int(item[1:])))
            elif item.endswith(':'):
                ranges.append((int(item[:-1]), n))
            elif '-' in item:
                lo, hi = item.split('-')
                ranges.append((int(lo), int(hi)))
            else:
                ranges.append((int(item), int(item)))
        except ValueError:
            raise errors.StatisticsError("invalid bin '{0}' in '{1}'".format(item, spec))
    return Binning(n, ranges)


def expected_census(n_windows, bins, distribution=None):
    if distribution is None:
        distribution = square_rank_distribution(bins.n)
    return n_windows * bins.probabilities(distribution)


### CHI SQUARE

def chi2_upper_tail(x, df):
    if x < 0:
        raise errors.StatisticsError('chi-square statistic must be non-negative, got {0}'.format(x))
    if df < 1:
        raise errors.StatisticsError('degrees of freedom must be positive, got {0}'.format(df))
    if x == 0:
        return 1.0
    if df == 2:
        return math.exp(-x / 2.0)
    if df == 1:
        return float(scipy.special.erfc(math.sqrt(x / 2.0)))
    return float(scipy.special.gammaincc(df / 2.0, x / 2.0))


class ChiSquareResult(object):
    def __init__(self, statistic, df, p_value, threshold=DEFAULT_THRESHOLD):
        self.statistic = statistic
        self.df = df
        self.p_value = p_value
        self.threshold = threshold

    @property
    def distinguishable(self):
        return self.p_value < self.threshold

    @property
    def verdict(self):
        return 'distinguishable' if self.distinguishable else 'indistinguishable'

    def todict(self):
        return dict(statistic=self.statistic, df=self.df, p_value=self.p_value, threshold=self.threshold, verdict=self.verdict)

    def __repr__(self):
        return '{0.__class__.__name__}(chi2={0.statistic:.4f}, df={0.df}, p={0.p_value:.4g})'.format(self)


def chi_square(observed, expected, threshold=DEFAULT_THRESHOLD):
    observed = np.asarray(observed, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    if observed.shape != expected.shape or observed.ndim != 1:
        raise errors.StatisticsError('observed {0} and expected {1} bins do not match'.format(observed.shape, expected.shape))
    if observed.size < 2:
        raise errors.StatisticsError('chi-square needs at least two bins')
    if not (expected > 0).all():
        raise errors.StatisticsError('expected counts must be positive, got {0}'.format(expected.tolist()))
    statistic = float(((observed - expected) ** 2 / expected).sum())
    df = observed.size - 1
    return ChiSquareResult(statistic, df, chi2_upper_tail(statistic, df), threshold)


def multinomial_band(observed, n_windows, probabilities, sigmas=3.0):
    """Per bin (observed, expected, sigma, within band) and whether all bins pass"""
    rows = []
    for o, p in zip(observed, probabilities):
        e = n_windows * p
        sigma = math.sqrt(n_windows * p * (1 - p))
        rows.append((int(o), e, sigma, abs(o - e) <= sigmas * sigma))
    return rows, all(row[3] for row in rows)


### VERDICT

def pool(censuses):
    counts = {}
    for census in censuses:
        for rank, count in census.counts.items():
            counts[int(rank)] = counts.get(int(rank), 0) + count
    return counts


class VerdictReport(object):
    def __init__(self, bins, observed, expected, results, threshold):
        self.bins = bins
        self.observed = observed
        self.expected = expected
        self.results = results
        self.threshold = threshold

    @property
    def p_aes(self):
        return self.results['aes'].p_value

    @property
    def p_random(self):
        return self.results['random'].p_value

    @property
    def ratio(self):
        """p_random / p_aes"""
        if self.p_aes == 0:
            return float('inf')
        return self.p_random / self.p_aes

    @property
    def distinguished(self):
        return self.p_aes < self.threshold and self.p_random >= self.threshold

    def deviation(self, arm):
        """Signed observed - expected per bin"""
        return (np.asarray(self.observed[arm]) - np.asarray(self.expected[arm])).tolist()

    def todict(self):
        arms = sorted(self.results)
        return dict(
            bins=self.bins.labels,
            observed=dict((arm, [int(o) for o in self.observed[arm]]) for arm in arms),
            expected=dict((arm, [float(e) for e in self.expected[arm]]) for arm in arms),
            deviation=dict((arm, self.deviation(arm)) for arm in arms),
            chi2=dict((arm, self.results[arm].statistic) for arm in arms),
            df=self.results[arms[0]].df,
            p_value=dict((arm, self.results[arm].p_value) for arm in arms),
            ratio=self.ratio if math.isfinite(self.ratio) else None,
            verdict='distinguished' if self.distinguished else 'not distinguished',
            threshold=self.threshold,
        )


def verdict(aes_censuses, random_censuses, bins=None, threshold=DEFAULT_THRESHOLD, distribution=None):
    """Pool each arm, test it against theory and decide.

    Distinguished means the AES arm is below the threshold while the random
    arm is not; per-key results never enter the decision."""
    if not aes_censuses or not random_censuses:
        raise errors.StatisticsError('both arms need at least one census')
    if bins is None:
        bins = default_bins()
    if distribution is None:
        distribution = square_rank_distribution(bins.n)
    observed, expected, results = {}, {}, {}
    for arm, censuses in (('aes', aes_censuses), ('random', random_censuses)):
        pooled = pool(censuses)
        observed[arm] = bins.tally(pooled)
        expected[arm] = expected_census(int(observed[arm].sum()), bins, distribution)
        results[arm] = chi_square(observed[arm], expected[arm], threshold)
    return VerdictReport(bins, observed, expected, results, threshold)


def plot_rows(aes_censuses, random_censuses, n=RANK_DIMENSION, distribution=None):
    """Figure data: per-sample counts of rank <= n - 2, sorted ascending per arm,
    with the expected count as reference"""
    if distribution is None:
        distribution = square_rank_distribution(n)
    rows = []
    for arm, censuses in (('aes', aes_censuses), ('random', random_censuses)):
        samples = []
        for census in censuses:
            low = sum(count for rank, count in census.counts.items() if int(rank) <= n - 2)
            samples.append((low, census.key_index, census.total))
        samples.sort()
        for position, (low, key_index, total) in enumerate(samples):
            rows.append(dict(arm=arm, position=position, key_index=key_index, low_rank=low,
                             windows=total, expected=total * distribution.tail))
    return rows


def theory_table(n, n_windows=None, bins=None):
    distribution = square_rank_distribution(n)
    table = dict(n=n, full=distribution.full, corank_one=distribution.corank_one, tail=distribution.tail,
                 total=distribution.total())
    if n <= STORED_DEFICIENCY:
        table['probabilities'] = [distribution.probability(r) for r in range(n + 1)]
    if n_windows is not None:
        if bins is None:
            bins = default_bins(n, 3) if n >= 2 else Binning(n, [(1, 1), (0, 0)])
        table['windows'] = n_windows
        table['bins'] = bins.labels
        table['expected'] = expected_census(n_windows, bins, distribution).tolist()
    return table
