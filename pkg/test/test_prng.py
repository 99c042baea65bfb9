import unittest

import numpy as np

import aesrank.aes
import aesrank.prng


class TestCase(unittest.TestCase):
    def test_counter_blocks(self):
        stream = aesrank.prng.CounterStream(5, aesrank.prng.DOMAIN_BASELINE, 3)
        blocks = stream.counter_blocks(2, start=256)
        self.assertEqual(aesrank.aes.block_to_hex(blocks[0]), '02000000' + '03000000' + '0001000000000000')
        self.assertEqual(aesrank.aes.block_to_hex(blocks[1]), '02000000' + '03000000' + '0101000000000000')
        self.assertEqual(stream.key.hex(), '0500000000000000' + '00' * 8)

    def test_deterministic(self):
        a = aesrank.prng.baseline_blocks(42, 0, 1000)
        np.testing.assert_array_equal(a, aesrank.prng.baseline_blocks(42, 0, 1000))
        self.assertEqual(len(np.unique(a, axis=0)), 1000)
        self.assertFalse(np.array_equal(a, aesrank.prng.baseline_blocks(42, 1, 1000)))
        self.assertFalse(np.array_equal(a, aesrank.prng.baseline_blocks(43, 0, 1000)))
        self.assertFalse(np.array_equal(a, aesrank.prng.span_samples(42, 1000)))

    def test_keys(self):
        key = aesrank.prng.experiment_key(1, 0)
        self.assertEqual(key.size, 128)
        self.assertEqual(key.hex(), aesrank.prng.experiment_key(1, 0).hex())
        self.assertNotEqual(key.hex(), aesrank.prng.experiment_key(1, 1).hex())
        self.assertEqual(aesrank.prng.experiment_key(1, 0, 192).size, 192)
        # longer keys extend the same stream
        self.assertTrue(aesrank.prng.experiment_key(1, 0, 256).hex().startswith(key.hex()))
        self.assertRaises(ValueError, aesrank.prng.experiment_key, 1, 0, 64)

    def test_bytes(self):
        stream = aesrank.prng.CounterStream(9, aesrank.prng.DOMAIN_KEYS)
        self.assertEqual(stream.bytes(20), bytes(stream.blocks(2).ravel()[:20]))
        self.assertEqual(len(stream.bytes(1)), 1)

    def test_seed_range(self):
        self.assertRaises(ValueError, aesrank.prng.seed_key, -1)
        self.assertRaises(ValueError, aesrank.prng.seed_key, 2 ** 64)
        self.assertEqual(aesrank.prng.seed_key(2 ** 64 - 1).hex(), 'ff' * 8 + '00' * 8)


if __name__ == '__main__':
    unittest.main()
