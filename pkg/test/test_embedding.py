import unittest

import numpy as np

import aesrank.aes
import aesrank.gf2
import aesrank.embedding
import aesrank.errors
from aesrank.embedding import EmbeddingParams


def toy_gf4():
    return EmbeddingParams.toy(2, 2, [[0, 1], [1, 1]])


def toy_swap():
    swap = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
    return EmbeddingParams.toy(4, 4, swap)


class TestField(unittest.TestCase):
    def test_multiply(self):
        self.assertEqual(aesrank.embedding.gf_multiply(0x57, 0x83, 8, 0x11b), 0xc1)
        self.assertEqual(aesrank.embedding.gf_multiply(0x57, 0x13, 8, 0x11b), 0xfe)
        self.assertEqual(aesrank.embedding.gf_multiply(0, 0x83, 8, 0x11b), 0)
        self.assertEqual(aesrank.embedding.gf_multiply(1, 0x83, 8, 0x11b), 0x83)

    def test_primitive(self):
        self.assertEqual(aesrank.embedding.smallest_primitive(8, 0x11b), 3)
        self.assertFalse(aesrank.embedding.is_primitive(2, 8, 0x11b))
        self.assertEqual(aesrank.embedding.field_order(2, 8, 0x11b), 51)
        self.assertEqual(aesrank.embedding.smallest_primitive(2, 0x7), 2)
        self.assertRaises(ValueError, aesrank.embedding.field_order, 0, 8, 0x11b)

    def test_log_table(self):
        table = aesrank.embedding.discrete_log_table(3, 8, 0x11b)
        self.assertEqual(table[0], 0)
        self.assertEqual(table[1], 255)
        self.assertEqual(table[3], 1)
        self.assertEqual(table[aesrank.embedding.gf_multiply(3, 3, 8, 0x11b)], 2)
        self.assertEqual(sorted(table.tolist()), list(range(256)))
        self.assertRaises(ValueError, aesrank.embedding.discrete_log_table, 2, 8, 0x11b)


class TestParams(unittest.TestCase):
    def test_aes(self):
        params = EmbeddingParams.aes()
        self.assertEqual((params.m, params.b, params.t, params.eta), (8, 16, 8, 3))
        self.assertEqual(params.dimension, 32768)
        self.assertEqual(aesrank.embedding.dimension_bound(params), 31745)

    def test_toy_bounds(self):
        gf4 = toy_gf4()
        self.assertEqual(gf4.t, 3)
        self.assertEqual(aesrank.embedding.dimension_bound(gf4), 11)
        swap = toy_swap()
        self.assertEqual(swap.t, 2)
        self.assertEqual(aesrank.embedding.dimension_bound(swap), 105)
        identity = EmbeddingParams(2, 1, np.eye(2, dtype=np.uint8))
        self.assertEqual(identity.t, 1)
        self.assertEqual(aesrank.embedding.dimension_bound(identity), 4)

    def test_invalid(self):
        self.assertRaises(ValueError, EmbeddingParams, 2, 1, np.eye(2, dtype=np.uint8), t=2)
        self.assertRaises(ValueError, EmbeddingParams, 2, 1, np.eye(2, dtype=np.uint8), eta=1)
        self.assertRaises(aesrank.errors.DimensionError, EmbeddingParams, 2, 2, np.eye(2, dtype=np.uint8))

    def test_field_matrix(self):
        params = toy_gf4()
        rng = np.random.default_rng(7)
        for _ in range(10):
            v = rng.integers(0, 4, 2)
            image = [aesrank.embedding.gf_multiply(v[1], 1, 2, 0x7),
                     aesrank.embedding.gf_multiply(v[0], 1, 2, 0x7) ^ aesrank.embedding.gf_multiply(v[1], 1, 2, 0x7)]
            bits = np.array([(v[i] >> l) & 1 for i in range(2) for l in range(2)])
            mapped = params.M.to_dense().astype(np.int64).dot(bits) % 2
            self.assertEqual([mapped[0] | mapped[1] << 1, mapped[2] | mapped[3] << 1], image)


class TestEmbedding(unittest.TestCase):
    def setUp(self):
        self.params = EmbeddingParams.aes()
        self.rng = np.random.default_rng(8)

    def test_epsilon_prime(self):
        self.assertEqual(np.flatnonzero(aesrank.embedding.epsilon_prime(0, self.params)).tolist(), [0])
        self.assertEqual(np.flatnonzero(aesrank.embedding.epsilon_prime(3, self.params)).tolist(), [1])
        self.assertEqual(np.flatnonzero(aesrank.embedding.epsilon_prime(1, self.params)).tolist(), [255])

    def test_zero_state(self):
        image = aesrank.embedding.alpha(np.zeros(128, dtype=np.uint8), self.params)
        self.assertEqual(image.size, 32768)
        self.assertEqual(int(image.sum()), 128)
        self.assertEqual(np.flatnonzero(image).tolist(), list(range(0, 32768, 256)))

    def test_chunks(self):
        for _ in range(5):
            block = self.rng.integers(0, 256, 16, dtype=np.uint8)
            image = aesrank.embedding.alpha(aesrank.aes.block_to_bits(block), self.params)
            self.assertEqual(int(image.sum()), 128)
            state = block
            for j in range(8):
                chunk = image[j * 4096:(j + 1) * 4096].reshape(16, 256)
                expected = np.zeros((16, 256), dtype=np.uint8)
                expected[np.arange(16), self.params.log_table[state]] = 1
                np.testing.assert_array_equal(chunk, expected)
                state = aesrank.aes.mixing_layer(state)

    def test_embed_blocks(self):
        blocks = self.rng.integers(0, 256, (6, 16), dtype=np.uint8)
        matrix = aesrank.embedding.embed_blocks(blocks, self.params)
        self.assertEqual(matrix.shape, (6, 32768))
        for i in range(6):
            np.testing.assert_array_equal(matrix.to_dense()[i], aesrank.embedding.alpha(aesrank.aes.block_to_bits(blocks[i]), self.params))

    def test_injective(self):
        params = toy_gf4()
        vectors = aesrank.embedding.exhaustive_sampler(params)(1 << 16)
        self.assertEqual(len(vectors), 16)
        images = aesrank.embedding.embed_rows(vectors, params).to_dense()
        self.assertEqual(len(np.unique(images, axis=0)), 16)

        blocks = np.unique(self.rng.integers(0, 256, (2000, 16), dtype=np.uint8), axis=0)
        images = aesrank.embedding.embed_blocks(blocks, self.params).to_dense()
        self.assertEqual(len(np.unique(images, axis=0)), len(blocks))
        # two blocks differing in one bit differ in their images
        flipped = blocks[:50].copy()
        flipped[:, 7] ^= 0x10
        pair = aesrank.embedding.embed_blocks(np.concatenate([blocks[:50], flipped]), self.params)
        self.assertTrue(all(pair.rows(i, i + 1) != pair.rows(i + 50, i + 51) for i in range(50)))

    def test_wrong_length(self):
        self.assertRaises(aesrank.errors.DimensionError, aesrank.embedding.embed_rows, np.zeros((2, 64), dtype=np.uint8), self.params)


class TestSpan(unittest.TestCase):
    def test_identity(self):
        params = EmbeddingParams(2, 1, np.eye(2, dtype=np.uint8))
        sampler = aesrank.embedding.exhaustive_sampler(params)
        self.assertEqual(len(sampler(100)), 4)
        self.assertEqual(aesrank.embedding.span_dimension(params, sampler, 100), 4)

    def test_toy_bounds(self):
        for params in (toy_gf4(), toy_swap()):
            dimension = aesrank.embedding.span_dimension(params, aesrank.embedding.exhaustive_sampler(params), 1 << 16)
            self.assertLessEqual(dimension, aesrank.embedding.dimension_bound(params))
            # the first chunk alone spans every one-hot pattern of b elements
            self.assertGreaterEqual(dimension, ((1 << params.m) - 1) * params.b + 1)

    def test_random_sampler(self):
        params = toy_swap()
        first = aesrank.embedding.random_sampler(params, seed=3)(50)
        self.assertEqual(first.shape, (50, 16))
        np.testing.assert_array_equal(first, aesrank.embedding.random_sampler(params, seed=3)(50))
        dimension = aesrank.embedding.span_dimension(params, aesrank.embedding.random_sampler(params, seed=3), 4000)
        self.assertLessEqual(dimension, aesrank.embedding.dimension_bound(params))


if __name__ == '__main__':
    unittest.main()
