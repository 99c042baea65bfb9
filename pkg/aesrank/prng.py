"""Deterministic pseudorandomness from AES-128 in counter mode.

The key is the 64-bit experiment seed (little-endian) padded with eight zero
bytes. Counter blocks are (domain u32, stream u32, counter u64), all
little-endian, so every consumer draws from its own stream.
"""

import numpy as np

from . import aes

DOMAIN_KEYS = 1
DOMAIN_BASELINE = 2
DOMAIN_SPAN = 3

SEED_LIMIT = 1 << 64


def seed_key(seed):
    seed = int(seed)
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError('seed must be a 64-bit unsigned integer, got {0}'.format(seed))
    return aes.CipherKey(seed.to_bytes(8, 'little') + bytes(8))


class CounterStream(object):
    def __init__(self, seed, domain, stream=0):
        self.seed = int(seed)
        self.domain = int(domain)
        self.stream = int(stream)
        self.key = seed_key(seed)

    def counter_blocks(self, count, start=0):
        blocks = np.zeros((count, aes.BLOCKSIZE), dtype=np.uint8)
        blocks[:, 0:4] = np.frombuffer(self.domain.to_bytes(4, 'little'), dtype=np.uint8)
        blocks[:, 4:8] = np.frombuffer(self.stream.to_bytes(4, 'little'), dtype=np.uint8)
        counters = np.arange(start, start + count, dtype=np.uint64).astype('<u8')
        blocks[:, 8:16] = counters.view(np.uint8).reshape(count, 8)
        return blocks

    def blocks(self, count, start=0):
        """count pseudorandom blocks; distinct because AES permutes distinct counters"""
        return aes.encrypt_blocks(self.key, self.counter_blocks(count, start))

    def bytes(self, count, start=0):
        nblocks = -(-count // aes.BLOCKSIZE)
        return bytes(self.blocks(nblocks, start).ravel()[:count])

    def __repr__(self):
        return '{0.__class__.__name__}(seed={0.seed}, domain={0.domain}, stream={0.stream})'.format(self)


def experiment_key(seed, index, keysize=128):
    """Key number index of an experiment, keysize in bits"""
    if keysize not in (128, 192, 256):
        raise ValueError('unsupported key size {0}'.format(keysize))
    return aes.CipherKey(CounterStream(seed, DOMAIN_KEYS, index).bytes(keysize // 8))


def baseline_blocks(seed, index, count):
    return CounterStream(seed, DOMAIN_BASELINE, index).blocks(count)


def span_samples(seed, count, stream=0):
    return CounterStream(seed, DOMAIN_SPAN, stream).blocks(count)
