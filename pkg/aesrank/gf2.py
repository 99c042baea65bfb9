"""Dense GF(2) linear algebra on bit-packed rows.

Rows are stored as little-endian uint64 words: column j lives in bit
(j % 64) of word j // 64. Ranks are computed with a column-recursive PLUQ
decomposition whose Schur complement updates use the Method of Four Russians.
"""

import struct

import numpy as np

from . import util, errors

WORDSIZE = 64
DEFAULT_THRESHOLD = 1024
MAX_TABLE_BITS = 8

GF2M_MAGIC = b'GF2M'
GF2M_VERSION = 1
_GF2M_HEADER = struct.Struct('<4sIQQ')

_ONE = np.uint64(1)
_FULLWORD = (1 << WORDSIZE) - 1
_CHUNK_WORDS = 1 << 20  # upper bound on temporary words per table lookup


def words_per_row(ncols):
    return (int(ncols) + WORDSIZE - 1) // WORDSIZE


def table_bits(ncols):
    """Four Russians table size: ceil(log2(ncols)) capped at MAX_TABLE_BITS"""
    return min(MAX_TABLE_BITS, max(1, int(np.ceil(np.log2(max(int(ncols), 2))))))


class BitMatrix(object):
    def __init__(self, nrows, ncols, data=None):
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        if self.nrows < 0 or self.ncols < 0:
            raise errors.DimensionError('negative matrix shape {0}x{1}'.format(nrows, ncols))
        nwords = words_per_row(self.ncols)
        if data is None:
            data = np.zeros((self.nrows, nwords), dtype=np.uint64)
        else:
            data = np.ascontiguousarray(data, dtype=np.uint64)
            if data.shape != (self.nrows, nwords):
                raise errors.DimensionError('packed data of shape {0} does not fit a {1}x{2} matrix'.format(data.shape, self.nrows, self.ncols))
        self.data = data

    @property
    def nwords(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.nrows, self.ncols

    def clear_padding(self):
        tail = self.ncols % WORDSIZE
        if tail and self.nrows:
            self.data[:, -1] &= np.uint64((1 << tail) - 1)
        return self

    ### CONSTRUCTORS

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        matrix = cls(n, n)
        idx = np.arange(n)
        matrix.data[idx, idx // WORDSIZE] = _ONE << (idx % WORDSIZE).astype(np.uint64)
        return matrix

    @classmethod
    def random(cls, nrows, ncols, rng=None):
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        data = rng.integers(0, _FULLWORD, size=(nrows, words_per_row(ncols)), dtype=np.uint64, endpoint=True)
        return cls(nrows, ncols, data).clear_padding()

    @classmethod
    def from_dense(cls, array):
        bits = np.asarray(array)
        if bits.ndim != 2:
            raise errors.DimensionError('expected a 2-dimensional bit array, got {0} dimensions'.format(bits.ndim))
        nrows, ncols = bits.shape
        nwords = words_per_row(ncols)
        padded = np.zeros((nrows, nwords * WORDSIZE), dtype=np.uint8)
        padded[:, :ncols] = bits != 0
        packed = np.packbits(padded, axis=1, bitorder='little')
        return cls(nrows, ncols, packed.view('<u8').astype(np.uint64))

    @classmethod
    def from_rows(cls, rows, ncols):
        rows = [np.asarray(row).ravel() for row in rows]
        for i, row in enumerate(rows):
            if row.size != ncols:
                raise errors.DimensionError('row {0} has length {1}, expected {2}'.format(i, row.size, ncols))
        if not rows:
            return cls(0, ncols)
        return cls.from_dense(np.vstack(rows))

    def to_dense(self):
        octets = self.data.astype('<u8').view(np.uint8)
        return np.unpackbits(octets, axis=1, bitorder='little')[:, :self.ncols]

    ### ELEMENT ACCESS

    def _check_index(self, i, j):
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError('index ({0}, {1}) out of range for {2}x{3} matrix'.format(i, j, self.nrows, self.ncols))

    def get(self, i, j):
        self._check_index(i, j)
        return int((self.data[i, j // WORDSIZE] >> np.uint64(j % WORDSIZE)) & _ONE)

    def set(self, i, j, value):
        self._check_index(i, j)
        bit = _ONE << np.uint64(j % WORDSIZE)
        if value:
            self.data[i, j // WORDSIZE] |= bit
        else:
            self.data[i, j // WORDSIZE] &= ~bit

    def __getitem__(self, key):
        i, j = key
        return self.get(i, j)

    def __setitem__(self, key, value):
        i, j = key
        self.set(i, j, value)

    def row_weight(self, i=None):
        """Number of set bits of row i, or of every row when i is None"""
        octets = self.data.astype('<u8').view(np.uint8)
        weights = np.unpackbits(octets, axis=1).sum(axis=1, dtype=np.int64)
        if i is None:
            return weights
        return int(weights[i])

    def rows(self, start, stop):
        return BitMatrix(stop - start, self.ncols, self.data[start:stop])

    def copy(self):
        return BitMatrix(self.nrows, self.ncols, self.data.copy())

    def transpose(self):
        return BitMatrix.from_dense(self.to_dense().T)

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __repr__(self):
        return '{0.__class__.__name__}({0.nrows}x{0.ncols})'.format(self)

    ### PERSISTENCE

    def tofile(self, filename):
        with util.atomic_write(filename) as tmpfile:
            with open(tmpfile, 'wb') as fp:
                fp.write(_GF2M_HEADER.pack(GF2M_MAGIC, GF2M_VERSION, self.nrows, self.ncols))
                fp.write(self.data.astype('<u8').tobytes())

    @classmethod
    def fromfile(cls, filename):
        try:
            with open(filename, 'rb') as fp:
                raw = fp.read()
        except IOError as e:
            raise errors.MatrixFileError('unable to open matrix file {0}: {1}'.format(filename, e))
        if len(raw) < _GF2M_HEADER.size:
            raise errors.MatrixFileError('{0} is too short to be a GF2M matrix file'.format(filename))
        magic, version, nrows, ncols = _GF2M_HEADER.unpack_from(raw)
        if magic != GF2M_MAGIC:
            raise errors.MatrixFileError('{0} is not a GF2M matrix file (magic {1!r})'.format(filename, magic))
        if version != GF2M_VERSION:
            raise errors.MatrixFileError('unsupported GF2M version {0} in {1}'.format(version, filename))
        nwords = words_per_row(ncols)
        payload = raw[_GF2M_HEADER.size:]
        if len(payload) != nrows * nwords * 8:
            raise errors.MatrixFileError('{0}: expected {1} payload bytes for a {2}x{3} matrix, found {4}'.format(filename, nrows * nwords * 8, nrows, ncols, len(payload)))
        data = np.frombuffer(payload, dtype='<u8').astype(np.uint64).reshape(nrows, nwords)
        matrix = cls(nrows, ncols, data)
        if not np.array_equal(matrix.copy().clear_padding().data, data):
            raise errors.MatrixFileError('{0}: padding bits beyond column {1} are not zero'.format(filename, ncols))
        return matrix


def from_rows(rows, ncols):
    return BitMatrix.from_rows(rows, ncols)


### FOUR RUSSIANS

def _combination_table(rows):
    """All 2**k linear combinations of k packed rows; entry index bit j selects row j"""
    k = rows.shape[0]
    table = np.zeros((1 << k, rows.shape[1]), dtype=np.uint64)
    for j in range(k):
        h = 1 << j
        np.bitwise_xor(table[:h], rows[j], out=table[h:2 * h])
    return table


def _extract_bits(packed, start, count):
    word, offset = divmod(start, WORDSIZE)
    value = packed[:, word] >> np.uint64(offset)
    if offset + count > WORDSIZE:
        value = value | (packed[:, word + 1] << np.uint64(WORDSIZE - offset))
    return (value & np.uint64((1 << count) - 1)).astype(np.intp)


def _addmul(out, a, inner, b, k=MAX_TABLE_BITS):
    """out ^= a . b where a packs 'inner' columns per row and b has 'inner' rows"""
    if inner == 0 or out.shape[0] == 0 or out.shape[1] == 0:
        return out
    k = max(1, min(k, inner))
    chunk = max(1, _CHUNK_WORDS // out.shape[1])
    for start in range(0, inner, k):
        count = min(k, inner - start)
        table = _combination_table(b[start:start + count])
        index = _extract_bits(a, start, count)
        for sl in util.chunk_slicer(out.shape[0], chunk):
            out[sl] ^= table[index[sl]]
    return out


def m4rm_multiply(A, B, k=None):
    """C = A.B over GF(2) using Four Russians tables over groups of k rows of B"""
    if A.ncols != B.nrows:
        raise errors.DimensionError('cannot multiply {0}x{1} by {2}x{3}'.format(A.nrows, A.ncols, B.nrows, B.ncols))
    if k is None:
        k = table_bits(B.ncols)
    C = BitMatrix(A.nrows, B.ncols)
    _addmul(C.data, A.data, A.ncols, B.data, k)
    return C


def multiply_naive(A, B):
    """Schoolbook product: row i of A.B is the sum of the rows of B selected by row i of A"""
    if A.ncols != B.nrows:
        raise errors.DimensionError('cannot multiply {0}x{1} by {2}x{3}'.format(A.nrows, A.ncols, B.nrows, B.ncols))
    C = BitMatrix(A.nrows, B.ncols)
    dense = A.to_dense()
    for i in range(A.nrows):
        selected = np.flatnonzero(dense[i])
        if selected.size:
            C.data[i] = np.bitwise_xor.reduce(B.data[selected], axis=0)
    return C


def rank_naive(A):
    """Rank by inserting every row into a basis keyed on leading bit"""
    basis = {}
    for row in A.data:
        v = int.from_bytes(row.astype('<u8').tobytes(), 'little')
        while v:
            lead = v.bit_length() - 1
            if lead in basis:
                v ^= basis[lead]
            else:
                basis[lead] = v
                break
    return len(basis)


### PLUQ DECOMPOSITION

class PluqResult(object):
    """rank, row_perm (position -> original row), col_perm (pivot columns first),
    pivots [(row position, column)] and the echelon form (rows beyond rank are zero)"""
    def __init__(self, rank, row_perm, col_perm, pivots, echelon):
        self.rank = rank
        self.row_perm = row_perm
        self.col_perm = col_perm
        self.pivots = pivots
        self.echelon = echelon

    def __repr__(self):
        return '{0.__class__.__name__}(rank={0.rank}, shape={1})'.format(self, self.echelon.shape)


def _range_masks(start, stop):
    """Word range and per-word masks covering columns [start, stop)"""
    wa = start // WORDSIZE
    wb = words_per_row(stop)
    masks = [_FULLWORD] * (wb - wa)
    if masks:
        masks[0] &= (_FULLWORD << (start % WORDSIZE)) & _FULLWORD
        if stop % WORDSIZE:
            masks[-1] &= (1 << (stop % WORDSIZE)) - 1
    return wa, wb, np.array(masks, dtype=np.uint64)


def _invert_small(rows, p):
    """Inverse of a nonsingular p x p matrix given as p-bit integers (bit j = column j)"""
    rows = list(rows)
    inverse = [1 << i for i in range(p)]
    for col in range(p):
        pivot = next(i for i in range(col, p) if (rows[i] >> col) & 1)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inverse[col], inverse[pivot] = inverse[pivot], inverse[col]
        for i in range(p):
            if i != col and (rows[i] >> col) & 1:
                rows[i] ^= rows[col]
                inverse[i] ^= inverse[col]
    return inverse


def _gather_bits(words, bits):
    out = np.zeros(words.shape, dtype=np.uint64)
    for j, b in enumerate(bits):
        out |= ((words >> np.uint64(b)) & _ONE) << np.uint64(j)
    return out


class _StripStep(object):
    """One elimination step over at most one word of columns.

    Applied to a column range it moves the pivot rows to positions
    row..row+p, reduces them with F and clears the pivot columns of the rows
    below with C."""
    def __init__(self, row, p, positions, order, F, nonzero, C, k):
        self.row = row
        self.p = p
        self.positions = positions
        self.order = order
        self.F = F
        self.nonzero = nonzero
        self.C = C
        self.k = k

    def apply(self, W, start, stop):
        wa, wb, mask = _range_masks(start, stop)
        if wb <= wa:
            return
        block = W[:, wa:wb]
        keep = ~mask
        if self.positions.size:
            block[self.positions] = (block[self.positions] & keep) | (block[self.order] & mask)
        top = block[self.row:self.row + self.p] & mask
        newtop = _addmul(np.zeros_like(top), self.F, self.p, top, self.k)
        block[self.row:self.row + self.p] = (block[self.row:self.row + self.p] & keep) | newtop
        if self.nonzero.size:
            below = self.row + self.p + self.nonzero
            block[below] ^= _addmul(np.zeros((below.size, wb - wa), dtype=np.uint64), self.C, self.p, newtop, self.k)


def _split(c0, c1):
    if c1 - c0 > WORDSIZE:
        mid = ((c0 + c1) // 2 + WORDSIZE // 2) // WORDSIZE * WORDSIZE
        return min(max(mid, (c0 // WORDSIZE + 1) * WORDSIZE), (c1 - 1) // WORDSIZE * WORDSIZE)
    return (c0 + c1) // 2


class _Elimination(object):
    def __init__(self, W, ncols, threshold):
        self.W = W
        self.nrows = W.shape[0]
        self.ncols = ncols
        self.threshold = threshold
        self.k = table_bits(ncols)
        self.row = 0
        self.perm = np.arange(self.nrows)
        self.pivots = []

    def block(self, c0, c1, keep):
        """Eliminate columns [c0, c1) of the remaining rows.

        Returns the steps taken when keep is set, so the caller can bring the
        columns right of c1 up to date (the Schur complement update)."""
        if self.row >= self.nrows or c0 >= c1:
            return []
        if self.threshold is None or c1 - c0 <= self.threshold:
            return self.base(c0, c1, keep)
        mid = _split(c0, c1)
        left = self.block(c0, mid, True)
        for step in left:
            step.apply(self.W, mid, c1)
        right = self.block(mid, c1, keep)
        if keep:
            return left + right
        return []

    def base(self, c0, c1, keep):
        steps = []
        s0 = c0
        while s0 < c1 and self.row < self.nrows:
            s1 = min(c1, (s0 // WORDSIZE + 1) * WORDSIZE)
            step = self.strip(s0, s1)
            if step is not None:
                step.apply(self.W, s0, c1)
                self.row += step.p
                if keep:
                    steps.append(step)
            s0 = s1
        return steps

    def strip(self, s0, s1):
        """Find the pivots of columns [s0, s1), all inside one word"""
        r = self.row
        word = s0 // WORDSIZE
        lo, hi = s0 - word * WORDSIZE, s1 - word * WORDSIZE
        mask = np.uint64(((1 << (hi - lo)) - 1) << lo)
        column = self.W[r:, word] & mask
        candidates = np.flatnonzero(column)
        if candidates.size == 0:
            return None

        reduced = column[candidates]
        free = np.ones(candidates.size, dtype=bool)
        pivrows, pivbits = [], []
        for b in range(lo, hi):
            has = (reduced & (_ONE << np.uint64(b))) != 0
            available = np.flatnonzero(has & free)
            if available.size == 0:
                continue
            c = available[0]
            free[c] = False
            has[c] = False
            reduced[has] ^= reduced[c]
            pivrows.append(r + candidates[c])
            pivbits.append(b)
            if not free.any():
                break
        p = len(pivrows)

        src = np.array(pivrows, dtype=np.intp)
        tgt = np.arange(r, r + p, dtype=np.intp)
        displaced = tgt[~np.isin(tgt, src)]
        vacated = np.sort(src[~np.isin(src, tgt)])
        positions = np.concatenate([tgt, vacated])
        order = np.concatenate([src, displaced])
        if np.array_equal(positions, order):
            positions = order = np.zeros(0, dtype=np.intp)

        T = _gather_bits(self.W[src, word], pivbits)
        F = np.array(_invert_small([int(t) for t in T], p), dtype=np.uint64)[:, None]

        # rows below the pivot block, read after the permutation
        below = self.W[r:, word].copy()
        if positions.size:
            below[positions - r] = below[order - r]
        C = _gather_bits(below[p:], pivbits)
        nonzero = np.flatnonzero(C)

        if positions.size:
            self.perm[positions] = self.perm[order]
        base = word * WORDSIZE
        self.pivots.extend((r + t, base + b) for t, b in enumerate(pivbits))
        return _StripStep(r, p, positions, order, F, nonzero, C[nonzero][:, None], self.k)


def pluq_decompose(A, cache_block_threshold=DEFAULT_THRESHOLD):
    """Rank-revealing PLUQ decomposition of A.

    Column blocks wider than cache_block_threshold are split in two; the left
    half is eliminated first, its steps are replayed on the right half and the
    right half is eliminated on the remaining rows. A threshold of None
    eliminates the whole matrix as one block."""
    if cache_block_threshold is not None and cache_block_threshold < 1:
        raise ValueError('cache block threshold must be at least 1 column, got {0}'.format(cache_block_threshold))
    W = A.data.copy()
    elimination = _Elimination(W, A.ncols, cache_block_threshold)
    elimination.block(0, A.ncols, False)

    pivots = elimination.pivots
    pivcols = np.array([col for _, col in pivots], dtype=np.intp)
    col_perm = np.concatenate([pivcols, np.setdiff1d(np.arange(A.ncols), pivcols)]).astype(np.intp)
    return PluqResult(len(pivots), elimination.perm, col_perm, pivots, BitMatrix(A.nrows, A.ncols, W))


def rank(A, cache_block_threshold=DEFAULT_THRESHOLD):
    return pluq_decompose(A, cache_block_threshold).rank


def in_span(result, row):
    """True when the packed row lies in the row space described by a PluqResult"""
    echelon = result.echelon
    if isinstance(row, BitMatrix):
        v = row.data[0].copy()
    else:
        v = np.array(row, dtype=np.uint64).ravel()
    if v.size != echelon.nwords:
        raise errors.DimensionError('row has {0} words, echelon form has {1}'.format(v.size, echelon.nwords))
    E = echelon.data
    for i, col in result.pivots:
        w = col // WORDSIZE
        if (v[w] >> np.uint64(col % WORDSIZE)) & _ONE:
            v[w:] ^= E[i, w:]
    return not v.any()
