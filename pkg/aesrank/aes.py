"""AES with a configurable number of rounds, vectorised over blocks.

Blocks are uint8 arrays whose last axis holds the 16 bytes in FIPS-197
input order. Byte i sits in row i % 4 and column i // 4 of the state. A
round is SubBytes (gamma), then ShiftRows followed by MixColumns (lambda),
then AddRoundKey (sigma_k).
"""

import numpy as np

from . import gf2, errors

BLOCKSIZE = 16
ROUNDS = {16: 10, 24: 12, 32: 14}

SBOX = np.array([
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
], dtype=np.uint8)


def _xtime_table():
    x = np.arange(256, dtype=np.uint16) << 1
    return (np.where(x & 0x100, x ^ 0x11b, x)).astype(np.uint8)


MUL2 = _xtime_table()
MUL3 = MUL2 ^ np.arange(256, dtype=np.uint8)

# new byte i of ShiftRows comes from old byte SHIFT_ROWS[i]
SHIFT_ROWS = np.array([4 * ((i // 4 + i % 4) % 4) + i % 4 for i in range(BLOCKSIZE)], dtype=np.intp)


### BLOCKS

def as_blocks(blocks):
    """Return a (N, 16) uint8 array; a single block becomes (1, 16)"""
    if isinstance(blocks, str):
        blocks = hex_to_block(blocks)
    elif isinstance(blocks, (bytes, bytearray)):
        blocks = np.frombuffer(bytes(blocks), dtype=np.uint8)
    arr = np.array(blocks, dtype=np.uint8)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != BLOCKSIZE:
        raise errors.DimensionError('expected blocks of {0} bytes, got array of shape {1}'.format(BLOCKSIZE, arr.shape))
    return arr


def hex_to_block(s):
    try:
        raw = bytes.fromhex(s.strip())
    except ValueError as e:
        raise ValueError("invalid hex block '{0}': {1}".format(s, e))
    if len(raw) != BLOCKSIZE:
        raise errors.DimensionError("hex block '{0}' has {1} bytes, expected {2}".format(s, len(raw), BLOCKSIZE))
    return np.frombuffer(raw, dtype=np.uint8).copy()


def block_to_hex(block):
    return bytes(np.asarray(block, dtype=np.uint8).ravel()).hex()


def block_to_bits(blocks):
    """Bit 8*i + b of the result is bit b of byte i"""
    return np.unpackbits(np.asarray(blocks, dtype=np.uint8), axis=-1, bitorder='little')


def bits_to_block(bits):
    return np.packbits(np.asarray(bits, dtype=np.uint8), axis=-1, bitorder='little')


### ROUND COMPONENTS

def sub_bytes(blocks, sbox=SBOX):
    return sbox[blocks]


def shift_rows(blocks):
    return blocks[..., SHIFT_ROWS]


def mix_columns(blocks):
    columns = blocks.reshape(blocks.shape[:-1] + (4, 4))
    a1 = np.roll(columns, -1, axis=-1)
    a2 = np.roll(columns, -2, axis=-1)
    a3 = np.roll(columns, -3, axis=-1)
    mixed = MUL2[columns] ^ MUL3[a1] ^ a2 ^ a3
    return mixed.reshape(blocks.shape)


def add_round_key(blocks, key):
    return blocks ^ np.asarray(key, dtype=np.uint8)


def mixing_layer(blocks):
    """lambda = MixColumns after ShiftRows"""
    return mix_columns(shift_rows(blocks))


def round_components(v, k):
    """(gamma(v), lambda(v), sigma_k(v)) for a single block"""
    v = as_blocks(v)[0]
    k = as_blocks(k)[0]
    return sub_bytes(v), mixing_layer(v), add_round_key(v, k)


def lambda_matrix():
    """The 128x128 GF(2) matrix M with M.vec(v) = vec(lambda(v))"""
    units = bits_to_block(np.eye(8 * BLOCKSIZE, dtype=np.uint8))
    images = block_to_bits(mixing_layer(units))
    # row j of images is lambda(e_j), i.e. column j of M
    return gf2.BitMatrix.from_dense(images.T)


### KEYS

def _rcon(count):
    values, r = [], 1
    for _ in range(count):
        values.append(r)
        r = int(MUL2[r])
    return values


class CipherKey(object):
    """An AES key together with its expanded round keys k(0) .. k(N)"""

    def __init__(self, key, sbox=SBOX):
        if isinstance(key, str):
            try:
                key = bytes.fromhex(key.strip())
            except ValueError as e:
                raise errors.KeyLengthError("invalid hex key '{0}': {1}".format(key, e))
        elif isinstance(key, (bytes, bytearray)):
            key = bytes(key)
        else:
            key = bytes(np.asarray(key, dtype=np.uint8).ravel())
        if len(key) not in ROUNDS:
            raise errors.KeyLengthError('AES keys are 16, 24 or 32 bytes long, got {0}'.format(len(key)))
        self.key = key
        self.rounds = ROUNDS[len(key)]
        self.round_keys = self._expand(sbox)

    def _expand(self, sbox):
        nk = len(self.key) // 4
        nwords = 4 * (self.rounds + 1)
        words = [list(self.key[4 * i:4 * i + 4]) for i in range(nk)]
        rcon = _rcon(nwords // nk + 1)
        for i in range(nk, nwords):
            temp = list(words[i - 1])
            if i % nk == 0:
                temp = [int(sbox[b]) for b in temp[1:] + temp[:1]]
                temp[0] ^= rcon[i // nk - 1]
            elif nk > 6 and i % nk == 4:
                temp = [int(sbox[b]) for b in temp]
            words.append([a ^ b for a, b in zip(words[i - nk], temp)])
        return np.array(words, dtype=np.uint8).reshape(self.rounds + 1, BLOCKSIZE)

    @property
    def size(self):
        return 8 * len(self.key)

    def hex(self):
        return self.key.hex()

    def __repr__(self):
        return '{0.__class__.__name__}(AES-{0.size})'.format(self)


def key_schedule(key_bytes):
    return CipherKey(key_bytes)


class RoundSpec(object):
    """Number of rounds applied after whitening with k(0).

    rounds None means the full cipher. The final round omits MixColumns
    only when the full N rounds are applied, unless atypical_last says
    otherwise."""

    def __init__(self, rounds=None, atypical_last=None):
        if rounds is not None:
            rounds = int(rounds)
            if rounds < 0:
                raise errors.RoundError('round count must be non-negative, got {0}'.format(rounds))
        self.rounds = rounds
        self.atypical_last = atypical_last

    def resolve(self, key):
        """(rounds, final round without MixColumns) for this key"""
        rounds = key.rounds if self.rounds is None else self.rounds
        if rounds > key.rounds:
            raise errors.RoundError('AES-{0} has {1} rounds, {2} requested'.format(key.size, key.rounds, rounds))
        atypical = self.atypical_last
        if atypical is None:
            atypical = rounds == key.rounds
        return rounds, bool(atypical and rounds > 0)

    def label(self):
        return 'full' if self.rounds is None else str(self.rounds)

    def __repr__(self):
        return '{0.__class__.__name__}({1})'.format(self, self.label())


FULL = RoundSpec()


def encrypt_blocks(key, blocks, spec=FULL, sbox=SBOX):
    if not isinstance(key, CipherKey):
        key = CipherKey(key)
    if spec is None:
        spec = FULL
    elif not isinstance(spec, RoundSpec):
        spec = RoundSpec(spec)
    rounds, atypical = spec.resolve(key)
    state = add_round_key(as_blocks(blocks), key.round_keys[0])
    for rho in range(1, rounds + 1):
        state = shift_rows(sub_bytes(state, sbox))
        if not (atypical and rho == rounds):
            state = mix_columns(state)
        state = add_round_key(state, key.round_keys[rho])
    return state


def encrypt(key, x, spec=FULL):
    """Encrypt a single block, returned as a 16-byte uint8 array"""
    return encrypt_blocks(key, x, spec)[0]
