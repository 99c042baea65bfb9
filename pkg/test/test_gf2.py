import os
import shutil
import tempfile
import unittest

import numpy as np

import aesrank.gf2
import aesrank.errors
from aesrank.gf2 import BitMatrix


def low_rank(rng, nrows, ncols, k):
    """Random nrows x ncols matrix whose rows lie in a random k-dimensional space"""
    return aesrank.gf2.multiply_naive(BitMatrix.random(nrows, k, rng), BitMatrix.random(k, ncols, rng))


def random_matrix(rng, maxrows, maxcols):
    nrows, ncols = rng.integers(1, maxrows + 1), rng.integers(1, maxcols + 1)
    if rng.random() < 0.4:
        return low_rank(rng, nrows, ncols, int(rng.integers(1, min(nrows, ncols) + 1)))
    return BitMatrix.random(nrows, ncols, rng)


class TestBitMatrix(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(1)

    def test_from_rows(self):
        empty = aesrank.gf2.from_rows([], 8)
        self.assertEqual(empty.shape, (0, 8))
        self.assertEqual(aesrank.gf2.rank(empty), 0)

        ones = aesrank.gf2.from_rows([np.ones(5, dtype=np.uint8)], 5)
        self.assertEqual(ones.shape, (1, 5))
        self.assertEqual(ones.row_weight(0), 5)

        rows = self.rng.integers(0, 2, size=(7, 130))
        matrix = aesrank.gf2.from_rows(list(rows), 130)
        np.testing.assert_array_equal(matrix.to_dense(), rows)

    def test_from_rows_length_mismatch(self):
        self.assertRaises(aesrank.errors.DimensionError, aesrank.gf2.from_rows, [np.ones(5), np.ones(4)], 5)

    def test_get_set(self):
        matrix = BitMatrix.zeros(3, 70)
        matrix.set(1, 65, 1)
        matrix[2, 0] = 1
        self.assertEqual(matrix.get(1, 65), 1)
        self.assertEqual(matrix[2, 0], 1)
        self.assertEqual(matrix[0, 0], 0)
        matrix.set(1, 65, 0)
        self.assertEqual(matrix.get(1, 65), 0)
        self.assertRaises(IndexError, matrix.get, 3, 0)
        self.assertRaises(IndexError, matrix.set, 0, 70, 1)

    def test_padding_is_zero(self):
        matrix = BitMatrix.random(10, 70, self.rng)
        self.assertTrue((matrix.data[:, 1] >> np.uint64(6) == 0).all())
        dense = BitMatrix.from_dense(np.ones((3, 70), dtype=np.uint8))
        self.assertTrue((dense.data[:, 1] == np.uint64((1 << 6) - 1)).all())

    def test_identity_and_transpose(self):
        identity = BitMatrix.identity(100)
        self.assertEqual(identity.transpose(), identity)
        np.testing.assert_array_equal(identity.to_dense(), np.eye(100, dtype=np.uint8))
        matrix = BitMatrix.random(13, 77, self.rng)
        np.testing.assert_array_equal(matrix.transpose().to_dense(), matrix.to_dense().T)

    def test_file(self):
        tmpdir = tempfile.mkdtemp()
        try:
            fn = os.path.join(tmpdir, 'matrix.gf2m')
            matrix = BitMatrix.random(33, 129, self.rng)
            matrix.tofile(fn)
            with open(fn, 'rb') as fp:
                raw = fp.read()
            self.assertEqual(raw[:4], b'GF2M')
            self.assertEqual(len(raw), 24 + 33 * 3 * 8)
            self.assertEqual(BitMatrix.fromfile(fn), matrix)

            with open(fn, 'wb') as fp:
                fp.write(b'XXXX' + raw[4:])
            self.assertRaises(aesrank.errors.MatrixFileError, BitMatrix.fromfile, fn)
            with open(fn, 'wb') as fp:
                fp.write(raw[:-8])
            self.assertRaises(aesrank.errors.MatrixFileError, BitMatrix.fromfile, fn)
            self.assertRaises(aesrank.errors.MatrixFileError, BitMatrix.fromfile, os.path.join(tmpdir, 'missing.gf2m'))
        finally:
            shutil.rmtree(tmpdir)


class TestMultiply(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(2)

    def test_identity(self):
        B = BitMatrix.random(64, 64, self.rng)
        self.assertEqual(aesrank.gf2.m4rm_multiply(BitMatrix.identity(64), B), B)

    def test_one_by_one(self):
        one = aesrank.gf2.from_rows([[1]], 1)
        self.assertEqual(aesrank.gf2.m4rm_multiply(one, one), one)

    def test_against_schoolbook(self):
        for _ in range(200):
            n, k, m = self.rng.integers(1, 257, size=3)
            A = BitMatrix.random(n, k, self.rng)
            B = BitMatrix.random(k, m, self.rng)
            self.assertEqual(aesrank.gf2.m4rm_multiply(A, B), aesrank.gf2.multiply_naive(A, B))

    def test_table_sizes(self):
        A = BitMatrix.random(40, 150, self.rng)
        B = BitMatrix.random(150, 90, self.rng)
        expected = aesrank.gf2.multiply_naive(A, B)
        for k in (1, 3, 8):
            self.assertEqual(aesrank.gf2.m4rm_multiply(A, B, k), expected)

    def test_associative(self):
        for _ in range(20):
            A, B, C = (BitMatrix.random(64, 64, self.rng) for _ in range(3))
            left = aesrank.gf2.m4rm_multiply(aesrank.gf2.m4rm_multiply(A, B), C)
            right = aesrank.gf2.m4rm_multiply(A, aesrank.gf2.m4rm_multiply(B, C))
            self.assertEqual(left, right)

    def test_dimension_mismatch(self):
        self.assertRaises(aesrank.errors.DimensionError, aesrank.gf2.m4rm_multiply, BitMatrix(3, 4), BitMatrix(5, 3))


class TestRank(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(3)

    def test_trivial(self):
        self.assertEqual(aesrank.gf2.rank(BitMatrix.identity(100)), 100)
        self.assertEqual(aesrank.gf2.rank(BitMatrix.zeros(50, 80)), 0)
        self.assertEqual(aesrank.gf2.rank(BitMatrix.zeros(0, 0)), 0)

    def test_repeated_row(self):
        row = np.zeros(100, dtype=np.uint8)
        row[[3, 64, 99]] = 1
        self.assertEqual(aesrank.gf2.rank(aesrank.gf2.from_rows([row] * 10, 100)), 1)

    def test_subspace(self):
        matrix = low_rank(self.rng, 128, 256, 7)
        self.assertEqual(aesrank.gf2.rank_naive(matrix), 7)
        self.assertEqual(aesrank.gf2.rank(matrix), 7)

    def test_against_elimination(self):
        for _ in range(1000):
            A = random_matrix(self.rng, 64, 64)
            self.assertEqual(aesrank.gf2.rank(A), aesrank.gf2.rank_naive(A))

    def test_threshold_invariance(self):
        for _ in range(500):
            A = random_matrix(self.rng, 64, 160)
            ranks = set(aesrank.gf2.rank(A, threshold) for threshold in (8, 64, 512, None))
            self.assertEqual(ranks, set([aesrank.gf2.rank_naive(A)]))

    def test_multiword(self):
        for shape in ((300, 1000), (1000, 300), (200, 200)):
            for k in (50, 199):
                A = low_rank(self.rng, shape[0], shape[1], k)
                expected = aesrank.gf2.rank_naive(A)
                for threshold in (1, 64, 100, None):
                    self.assertEqual(aesrank.gf2.rank(A, threshold), expected)

    def test_transpose(self):
        for _ in range(50):
            A = random_matrix(self.rng, 128, 128)
            self.assertEqual(aesrank.gf2.rank(A), aesrank.gf2.rank(A.transpose()))

    def test_product(self):
        for _ in range(50):
            A = random_matrix(self.rng, 40, 40)
            B = low_rank(self.rng, A.ncols, int(self.rng.integers(1, 41)), int(self.rng.integers(1, 20)))
            product = aesrank.gf2.m4rm_multiply(A, B)
            self.assertLessEqual(aesrank.gf2.rank(product), min(aesrank.gf2.rank(A), aesrank.gf2.rank(B)))

    def test_invalid_threshold(self):
        self.assertRaises(ValueError, aesrank.gf2.pluq_decompose, BitMatrix.identity(4), 0)


class TestPluq(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(4)

    def test_result(self):
        for _ in range(100):
            A = random_matrix(self.rng, 100, 200)
            result = aesrank.gf2.pluq_decompose(A, 64)
            self.assertEqual(result.rank, len(result.pivots))
            self.assertLessEqual(result.rank, min(A.shape))
            rows = [r for r, _ in result.pivots]
            cols = [c for _, c in result.pivots]
            self.assertEqual(rows, list(range(result.rank)))
            self.assertEqual(cols, sorted(set(cols)))
            self.assertEqual(sorted(result.row_perm.tolist()), list(range(A.nrows)))
            self.assertEqual(sorted(result.col_perm.tolist()), list(range(A.ncols)))
            self.assertEqual(result.col_perm[:result.rank].tolist(), cols)
            self.assertFalse(result.echelon.data[result.rank:].any())

    def test_row_permutation(self):
        A = low_rank(self.rng, 60, 90, 20)
        result = aesrank.gf2.pluq_decompose(A, 8)
        # the pivot rows of the original matrix are independent
        pivotrows = A.data[result.row_perm[:result.rank]]
        self.assertEqual(aesrank.gf2.rank_naive(BitMatrix(result.rank, A.ncols, pivotrows)), result.rank)

    def test_in_span(self):
        A = low_rank(self.rng, 80, 150, 30)
        result = aesrank.gf2.pluq_decompose(A, 64)
        for i in range(A.nrows):
            self.assertTrue(aesrank.gf2.in_span(result, A.data[i]))
        combination = A.data[3] ^ A.data[17] ^ A.data[40]
        self.assertTrue(aesrank.gf2.in_span(result, combination))
        outside = 0
        for _ in range(20):
            v = BitMatrix.random(1, 150, self.rng)
            expected = aesrank.gf2.rank_naive(BitMatrix(81, 150, np.vstack([A.data, v.data]))) == result.rank
            self.assertEqual(aesrank.gf2.in_span(result, v), expected)
            outside += not expected
        self.assertGreater(outside, 0)

    def test_in_span_dimension(self):
        result = aesrank.gf2.pluq_decompose(BitMatrix.identity(70))
        self.assertRaises(aesrank.errors.DimensionError, aesrank.gf2.in_span, result, np.zeros(1, dtype=np.uint64))


if __name__ == '__main__':
    unittest.main()
