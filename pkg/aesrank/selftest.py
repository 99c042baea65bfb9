"""Quick end-to-end checks of an installation: known answers for the cipher,
the rank engine, the embedding and the rank statistics."""

import numpy as np

from . import util, gf2, aes, embedding, stats, distinguisher

# key, plaintext, ciphertext
FIPS_VECTORS = [
    ('000102030405060708090a0b0c0d0e0f', '00112233445566778899aabbccddeeff', '69c4e0d86a7b0430d8cdb78070b4c55a'),
    ('000102030405060708090a0b0c0d0e0f1011121314151617', '00112233445566778899aabbccddeeff', 'dda97ca4864cdfe06eaf70a0ec0d7191'),
    ('000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f', '00112233445566778899aabbccddeeff', '8ea2b7ca516745bfeafc49904b496089'),
    ('2b7e151628aed2a6abf7158809cf4f3c', '3243f6a8885a308d313198a2e0370734', '3925841d02dc09fbdc118597196a0b32'),
]

PLAIN_RANK = 4690


class CheckResult(object):
    def __init__(self, name, ok, detail=''):
        self.name = name
        self.ok = bool(ok)
        self.detail = detail

    def __repr__(self):
        return '{0.__class__.__name__}({0.name}: {1})'.format(self, 'ok' if self.ok else 'FAILED')


def check_sbox(sbox=aes.SBOX):
    values = sorted(int(x) for x in sbox)
    return CheckResult('sbox permutation', values == list(range(256)),
                       '{0} distinct outputs'.format(len(set(values))))


def check_fips(sbox=aes.SBOX):
    failures = []
    for key, plaintext, ciphertext in FIPS_VECTORS:
        got = aes.block_to_hex(aes.encrypt_blocks(aes.CipherKey(key, sbox), plaintext, sbox=sbox)[0])
        if got != ciphertext:
            failures.append('AES-{0}: {1}'.format(len(key) * 4, got))
    return CheckResult('FIPS-197 vectors', not failures, '; '.join(failures) or '{0} vectors'.format(len(FIPS_VECTORS)))


def check_lambda_order():
    order = embedding.matrix_order(aes.lambda_matrix())
    return CheckResult('mixing layer order', order == 8, 'order {0}'.format(order))


def check_rank_engine(count=200, size=64, seed=0):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(count):
        nrows, ncols = rng.integers(1, size + 1, size=2)
        A = gf2.BitMatrix.random(nrows, ncols, rng)
        if rng.random() < 0.5 and nrows > 1:
            # force dependent rows
            A.data[rng.integers(0, nrows)] = A.data[rng.integers(0, nrows)]
        expected = gf2.rank_naive(A)
        if any(gf2.rank(A, threshold) != expected for threshold in (8, None)):
            bad += 1
        B = gf2.BitMatrix.random(ncols, rng.integers(1, size + 1), rng)
        if gf2.m4rm_multiply(A, B) != gf2.multiply_naive(A, B):
            bad += 1
    return CheckResult('rank and multiplication oracles', bad == 0, '{0} mismatches in {1} cases'.format(bad, count))


def check_epsilon_prime():
    params = embedding.EmbeddingParams.aes()
    images = np.array([embedding.epsilon_prime(x, params) for x in range(256)])
    permutation = (images.sum(axis=0) == 1).all() and (images.sum(axis=1) == 1).all()
    ok = permutation and images[0, 0] == 1 and images[params.eta, 1] == 1
    return CheckResult('one-hot encoding', ok, 'eta = {0:#04x}'.format(params.eta))


def check_theory(max_n=6):
    bad = []
    for n in range(1, max_n + 1):
        counts = stats.rank_counts(n)
        if counts != stats.enumerate_rank_counts(n):
            bad.append(n)
            continue
        distribution = stats.square_rank_distribution(n)
        exact = [c / 2.0**(n * n) for c in counts]
        if any(abs(distribution.probability(r) - p) > 1e-12 for r, p in enumerate(exact)):
            bad.append(n)
    return CheckResult('rank distribution vs enumeration', not bad,
                       'n = 1..{0}'.format(max_n) if not bad else 'mismatch for n = {0}'.format(bad))


def check_plain_window(threshold=gf2.DEFAULT_THRESHOLD):
    result = distinguisher.algorithm_b(distinguisher.build_sbar(), [1], threshold=threshold, arm='plain')
    ranks = sorted(result.counts)
    return CheckResult('plain set window rank', ranks == [PLAIN_RANK], 'rank {0}'.format(ranks))


def run(quick=False, sbox=aes.SBOX, verbose=True):
    """All checks, in order; the full-size window check is skipped with quick"""
    checks = [
        lambda: check_sbox(sbox),
        lambda: check_fips(sbox),
        check_lambda_order,
        check_rank_engine,
        check_epsilon_prime,
        check_theory,
    ]
    if not quick:
        checks.append(check_plain_window)
    results = []
    for check in checks:
        try:
            result = check()
        except Exception as e:
            result = CheckResult(getattr(check, '__name__', 'check'), False, '{0!r}'.format(e))
        results.append(result)
        if verbose:
            util.statusnl('{0:<36} {1:<7} {2}'.format(result.name, 'ok' if result.ok else 'FAILED', result.detail))
    return results


def passed(results):
    return all(result.ok for result in results)
