"""One-hot space embedding of cipher states.

A state v of b field elements of m bits each is sent to the concatenation of
the one-hot encodings of v, Mv, ..., M^(t-1)v, a vector of 2^m * b * t bits
of weight b * t. Chunk j (power M^j) occupies bits [j*2^m*b, (j+1)*2^m*b);
element i of a chunk occupies bits [i*2^m, (i+1)*2^m).
"""

import numpy as np

from . import gf2, aes, prng, errors

DEFAULT_POLYNOMIALS = {2: 0x7, 3: 0xb, 4: 0x13, 5: 0x25, 8: 0x11b}
MAX_ORDER = 1024


### FINITE FIELDS

def gf_multiply(a, b, m, poly):
    result = 0
    a, b = int(a), int(b)
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return result


def field_order(x, m, poly):
    """Multiplicative order of a nonzero field element"""
    if x == 0:
        raise ValueError('zero has no multiplicative order')
    y, order = x, 1
    while y != 1:
        y = gf_multiply(y, x, m, poly)
        order += 1
        if order > (1 << m):
            raise ValueError('polynomial {0:#x} does not define a field of 2^{1} elements'.format(poly, m))
    return order


def is_primitive(eta, m, poly):
    return eta != 0 and field_order(eta, m, poly) == (1 << m) - 1


def smallest_primitive(m, poly):
    for x in range(2, 1 << m):
        if is_primitive(x, m, poly):
            return x
    if m == 1:
        return 1
    raise ValueError('no primitive element for polynomial {0:#x}'.format(poly))


def discrete_log_table(eta, m, poly):
    """Position of every field element in the one-hot encoding.

    0 sits at position 0 and eta^i at position i for 1 <= i <= 2^m - 1, so 1
    itself sits at position 2^m - 1."""
    size = 1 << m
    table = np.zeros(size, dtype=np.intp)
    y = 1
    for i in range(1, size):
        y = gf_multiply(y, eta, m, poly)
        table[y] = i
    if len(set(table[1:].tolist())) != size - 1:
        raise ValueError('{0:#x} is not a primitive element'.format(eta))
    return table


### MATRICES

def field_matrix_to_bits(F, m, poly):
    """GF(2) matrix of the map v -> F.v for a b x b matrix F over GF(2^m)"""
    F = np.asarray(F, dtype=np.int64)
    b = F.shape[0]
    bits = np.zeros((m * b, m * b), dtype=np.uint8)
    for i in range(b):
        for k in range(b):
            for l in range(m):
                product = gf_multiply(int(F[i, k]), 1 << l, m, poly)
                for r in range(m):
                    bits[i * m + r, k * m + l] = (product >> r) & 1
    return gf2.BitMatrix.from_dense(bits)


def _dense_mul(A, B):
    return (A.astype(np.int64) @ B.astype(np.int64) % 2).astype(np.uint8)


def matrix_order(M, limit=MAX_ORDER):
    dense = M.to_dense()
    identity = np.eye(M.nrows, dtype=np.uint8)
    power = dense.copy()
    for order in range(1, limit + 1):
        if np.array_equal(power, identity):
            return order
        power = _dense_mul(power, dense)
    raise ValueError('matrix order exceeds {0}'.format(limit))


class EmbeddingParams(object):
    """m bits per element, b elements per block, mixing matrix M of order t and
    primitive element eta of GF(2^m) under the given polynomial"""

    def __init__(self, m, b, M, t=None, eta=None, poly=None):
        self.m = int(m)
        self.b = int(b)
        self.poly = DEFAULT_POLYNOMIALS[self.m] if poly is None else int(poly)
        if not isinstance(M, gf2.BitMatrix):
            M = gf2.BitMatrix.from_dense(M)
        n = self.m * self.b
        if M.shape != (n, n):
            raise errors.DimensionError('mixing matrix must be {0}x{0}, got {1}x{2}'.format(n, M.nrows, M.ncols))
        order = matrix_order(M)
        if t is not None and int(t) != order:
            raise ValueError('mixing matrix has order {0}, not {1}'.format(order, t))
        self.t = order
        self.M = M
        self.eta = smallest_primitive(self.m, self.poly) if eta is None else int(eta)
        if not is_primitive(self.eta, self.m, self.poly):
            raise ValueError('{0:#x} is not a primitive element of GF(2^{1})'.format(self.eta, self.m))
        self.log_table = discrete_log_table(self.eta, self.m, self.poly)

        dense = M.to_dense()
        powers = [np.eye(n, dtype=np.uint8)]
        for _ in range(1, self.t):
            powers.append(_dense_mul(dense, powers[-1]))
        self.powers = powers
        # row-vector form: bits(M^j v) = bits(v) . (M^j)^T
        self._powers_t = [p.T.astype(np.float32) for p in powers]

    @classmethod
    def aes(cls):
        return cls(8, 16, aes.lambda_matrix(), t=8, eta=0x03, poly=0x11b)

    @classmethod
    def toy(cls, m, b, field_matrix, eta=None, poly=None):
        """Parameters whose mixing matrix is given over GF(2^m), i.e. byte oriented"""
        poly = DEFAULT_POLYNOMIALS[m] if poly is None else poly
        return cls(m, b, field_matrix_to_bits(field_matrix, m, poly), eta=eta, poly=poly)

    @property
    def vector_bits(self):
        return self.m * self.b

    @property
    def chunk_bits(self):
        return (1 << self.m) * self.b

    @property
    def dimension(self):
        return (1 << self.m) * self.b * self.t

    def __repr__(self):
        return '{0.__class__.__name__}(m={0.m}, b={0.b}, t={0.t}, eta={0.eta:#x})'.format(self)


### EMBEDDING

def epsilon_prime(x, params):
    out = np.zeros(1 << params.m, dtype=np.uint8)
    out[params.log_table[int(x)]] = 1
    return out


def _element_values(bits, params):
    weights = (1 << np.arange(params.m)).astype(np.int64)
    return (bits.reshape(bits.shape[0], params.b, params.m).astype(np.int64) * weights).sum(axis=-1)


def embed_rows(vectors, params):
    """BitMatrix whose row i is the embedding of the bit-vector vectors[i]"""
    vectors = np.asarray(vectors, dtype=np.uint8)
    if vectors.ndim == 1:
        vectors = vectors[None, :]
    if vectors.shape[1] != params.vector_bits:
        raise errors.DimensionError('vectors have {0} bits, parameters expect {1}'.format(vectors.shape[1], params.vector_bits))
    n = vectors.shape[0]
    result = gf2.BitMatrix(n, params.dimension)
    rows = np.repeat(np.arange(n), params.b)
    offsets = np.arange(params.b) * (1 << params.m)
    source = vectors.astype(np.float32)
    for j, power_t in enumerate(params._powers_t):
        image = (source @ power_t).astype(np.int64) % 2
        positions = params.log_table[_element_values(image, params)]
        index = (j * params.chunk_bits + offsets + positions).ravel()
        words = index // gf2.WORDSIZE
        bits = np.left_shift(np.uint64(1), (index % gf2.WORDSIZE).astype(np.uint64))
        if (1 << params.m) >= gf2.WORDSIZE:
            result.data[rows, words] |= bits
        else:
            np.bitwise_or.at(result.data, (rows, words), bits)
    return result


def embed_blocks(blocks, params):
    return embed_rows(aes.block_to_bits(aes.as_blocks(blocks))[:, :params.vector_bits], params)


def alpha(v, params):
    """Embedding of a single bit-vector of m*b bits, as a dense bit-vector"""
    return embed_rows(np.asarray(v, dtype=np.uint8).ravel()[None, :], params).to_dense()[0]


def dimension_bound(params):
    m, b, t = params.m, params.b, params.t
    return (1 << m) * b * t - (b * t - 1) - m * b * (t - 1)


### SPAN SAMPLING

def exhaustive_sampler(params):
    """Every vector of m*b bits in counting order"""
    nbits = params.vector_bits
    def sampler(count):
        values = np.arange(min(count, 1 << nbits), dtype=np.int64)
        return ((values[:, None] >> np.arange(nbits)) & 1).astype(np.uint8)
    return sampler


def random_sampler(params, seed=0):
    """Pseudorandom vectors from the span-sampling counter stream"""
    if params.vector_bits > 8 * aes.BLOCKSIZE:
        raise errors.DimensionError('random sampling supports at most {0} bits per vector'.format(8 * aes.BLOCKSIZE))
    def sampler(count):
        return aes.block_to_bits(prng.span_samples(seed, count))[:, :params.vector_bits]
    return sampler


def span_dimension(params, sampler, max_samples, cache_block_threshold=gf2.DEFAULT_THRESHOLD):
    """Rank of the embeddings of the first max_samples vectors drawn from sampler"""
    vectors = np.asarray(sampler(max_samples), dtype=np.uint8)
    return gf2.rank(embed_rows(vectors, params), cache_block_threshold)
