import os
import csv
import bisect
import json

import numpy as np

from . import util, errors

ARMS = 'plain', 'aes', 'random'


class EmptyCensus(object):
    """Convenience object for sum() and friends. Treated as zero for addition."""

    def __add__(self, other):
        if not isinstance(other, (RankCensus, EmptyCensus)):
            return NotImplemented
        return other

    __radd__ = __iadd__ = __add__

    def __repr__(self):
        return '{0.__class__.__name__}'.format(self)


class RankCensus(object):
    """Number of windows per rank for one arm and key index.

    Important attributes:
        arm              'plain', 'aes' or 'random'
        key_index        index of the key (aes) or baseline set (random)
        seed             experiment seed
        rounds           round label ('full', a number, or None for plain and random)
        window_starts    sorted 1-based starts of the windows counted so far
        counts           dict rank -> number of windows"""

    def __init__(self, arm, key_index=0, seed=None, rounds=None, window_starts=(), counts=None, config=None):
        self.arm = arm
        self.key_index = int(key_index)
        self.seed = seed
        self.rounds = rounds
        self.window_starts = sorted(int(s) for s in window_starts)
        self.counts = dict((int(r), int(c)) for r, c in (counts or {}).items())
        self.config = config

    @property
    def config(self):
        """util.ConfigFile instance describing the configuration that produced this census"""
        return self._config

    @config.setter
    def config(self, conf):
        if isinstance(conf, util.ConfigFile):
            self._config = conf
        elif not conf:
            self._config = util.ConfigFile()
        else:
            raise TypeError("'{0!r}' is not a util.ConfigFile".format(conf))

    @property
    def key(self):
        return self.arm, self.key_index

    @property
    def total(self):
        return int(np.sum(list(self.counts.values()), dtype=np.int64))

    def add(self, start, rank):
        bisect.insort(self.window_starts, int(start))
        self.counts[int(rank)] = self.counts.get(int(rank), 0) + 1

    def copy(self):
        return self.__class__(self.arm, self.key_index, self.seed, self.rounds, self.window_starts, self.counts, self.config)

    def __add__(self, other):
        if isinstance(other, EmptyCensus):
            return self.copy()
        if not isinstance(other, RankCensus):
            return NotImplemented
        new = self.copy()
        new += other
        return new

    def __iadd__(self, other):
        if isinstance(other, EmptyCensus):
            return self
        if not isinstance(other, RankCensus):
            return NotImplemented
        if self.key != other.key:
            raise ValueError('cannot add censuses of {0} and {1}'.format(self.key, other.key))
        overlap = set(self.window_starts) & set(other.window_starts)
        if overlap:
            raise ValueError('windows {0} counted twice for {1}'.format(sorted(overlap)[:5], self.key))
        self.window_starts = sorted(self.window_starts + other.window_starts)
        for rank, count in other.counts.items():
            self.counts[rank] = self.counts.get(rank, 0) + count
        return self

    def __eq__(self, other):
        if not isinstance(other, RankCensus):
            return NotImplemented
        return self.todict() == other.todict()

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __repr__(self):
        ranks = ', '.join('{0}: {1}'.format(r, self.counts[r]) for r in sorted(self.counts, reverse=True)[:4])
        return '{0.__class__.__name__}({0.arm} #{0.key_index}, {0.total} windows, {{{1}}})'.format(self, ranks)

    ### SERIALISATION

    def todict(self):
        return dict(arm=self.arm, key_index=self.key_index, seed=self.seed, rounds=self.rounds,
                    window_starts=list(self.window_starts),
                    counts=dict((str(r), self.counts[r]) for r in sorted(self.counts)))

    @classmethod
    def fromdict(cls, d, config=None):
        try:
            return cls(d['arm'], d['key_index'], d.get('seed'), d.get('rounds'), d.get('window_starts', ()), d['counts'], config)
        except KeyError as e:
            raise errors.FileError('census record is missing field {0}'.format(e))

    def csv_rows(self):
        return [(self.arm, self.key_index, rank, self.counts[rank]) for rank in sorted(self.counts)]

    def tofile(self, filename):
        save([self], filename)

    @classmethod
    def fromfile(cls, filename):
        censuses = load(filename)
        if len(censuses) != 1:
            raise errors.FileError('{0} holds {1} censuses, expected one'.format(filename, len(censuses)))
        return censuses[0]


def sort_key(census):
    arm = ARMS.index(census.arm) if census.arm in ARMS else len(ARMS)
    return arm, census.arm, census.key_index


def sum(censuses):
    """Merge censuses per (arm, key index); the result is sorted by arm and key index"""
    merged = {}
    for census in censuses:
        if isinstance(census, EmptyCensus):
            continue
        if census.key in merged:
            merged[census.key] += census
        else:
            merged[census.key] = census.copy()
    return sorted(merged.values(), key=sort_key)


def chunked_sum(censuses, chunksize=10):
    """Merge an iterable of census lists without holding all partial results

    censuses   iterable of RankCensus instances or lists of them
    chunksize  number of items in each intermediate sum"""
    result = []
    for chunk in util.grouper(censuses, chunksize):
        flat = []
        for item in chunk:
            flat.extend(item if isinstance(item, (list, tuple)) else [item])
        result = sum(result + flat)
    return result


### FILES

def _format(filename):
    ext = os.path.splitext(filename)[-1].lower()
    if ext == '.json':
        return 'json'
    if ext == '.csv':
        return 'csv'
    if ext in ('.hdf5', '.h5'):
        return 'hdf5'
    raise errors.FileError("unknown census format '{0}', use .json, .csv or .hdf5".format(ext))


def save(censuses, filename):
    censuses = list(censuses)
    fmt = _format(filename)
    if fmt == 'json':
        if len(censuses) == 1:
            util.dump_json(censuses[0].todict(), filename)
        else:
            util.dump_json([c.todict() for c in censuses], filename)
    elif fmt == 'csv':
        with util.atomic_write(filename) as tmpname:
            with open(tmpname, 'w', newline='') as fp:
                writer = csv.writer(fp, lineterminator='\n')
                writer.writerow(('arm', 'key_index', 'rank', 'count'))
                for census in censuses:
                    writer.writerows(census.csv_rows())
    else:
        with util.atomic_write(filename) as tmpname:
            with util.open_h5py(tmpname, 'w') as fp:
                fp.attrs['type'] = 'Census'
                if censuses:
                    censuses[0].config.tofile(fp)
                for index, census in enumerate(censuses):
                    group = fp.create_group('census_{0}'.format(index))
                    group.attrs['arm'] = census.arm
                    group.attrs['key_index'] = census.key_index
                    group.attrs['seed'] = json.dumps(census.seed)
                    group.attrs['rounds'] = json.dumps(census.rounds)
                    ranks = sorted(census.counts)
                    group.create_dataset('window_starts', data=np.array(census.window_starts, dtype=np.int64))
                    group.create_dataset('ranks', data=np.array(ranks, dtype=np.int64))
                    group.create_dataset('counts', data=np.array([census.counts[r] for r in ranks], dtype=np.int64))


def _attr(value):
    if isinstance(value, bytes):
        return value.decode('utf8')
    return value


def load(filename):
    fmt = _format(filename)
    if not os.path.exists(filename):
        raise errors.FileError('census file {0} does not exist'.format(filename))
    if fmt == 'json':
        with open(filename) as fp:
            try:
                data = json.load(fp)
            except ValueError as e:
                raise errors.FileError('unable to parse {0}: {1}'.format(filename, e))
        if isinstance(data, dict):
            data = [data]
        return [RankCensus.fromdict(d) for d in data]
    if fmt == 'csv':
        merged = {}
        with open(filename, newline='') as fp:
            for row in csv.DictReader(fp):
                key = row['arm'], int(row['key_index'])
                census = merged.setdefault(key, RankCensus(*key))
                census.counts[int(row['rank'])] = int(row['count'])
        return sorted(merged.values(), key=sort_key)
    try:
        with util.open_h5py(filename, 'r') as fp:
            if _attr(fp.attrs.get('type')) != 'Census':
                raise errors.HDF5FileError('{0} is not a census file'.format(filename))
            config = util.ConfigFile.fromfile(fp)
            censuses = []
            for label in sorted((l for l in fp if l.startswith('census_')), key=lambda l: int(l.split('_')[1])):
                group = fp[label]
                ranks = group['ranks'][()]
                counts = group['counts'][()]
                censuses.append(RankCensus(_attr(group.attrs['arm']), int(group.attrs['key_index']),
                                           json.loads(_attr(group.attrs['seed'])), json.loads(_attr(group.attrs['rounds'])),
                                           group['window_starts'][()].tolist(),
                                           dict(zip(ranks.tolist(), counts.tolist())), config))
            return censuses
    except (IOError, KeyError) as e:
        raise errors.HDF5FileError('unable to load census from HDF5 file {0} (original error: {1!r})'.format(filename, e))
