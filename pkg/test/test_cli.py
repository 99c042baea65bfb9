import io
import os
import json
import shutil
import tempfile
import contextlib
import unittest

import aesrank
import aesrank.cli
import aesrank.gf2
import aesrank.census

TINY = ['--tau', '1', '--windows', '2', '-c', 'experiment:window_size=16', '--threads', '1']


class TestCase(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def path(self, name):
        return os.path.join(self.tmpdir, name)

    def main(self, *argv):
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            code = aesrank.cli.main(list(argv))
        return code, out.getvalue()

    def test_theory(self):
        code, output = self.main('theory', '--out', self.path('theory.json'))
        self.assertEqual(code, 0)
        self.assertIn('P(rank = n)      = 0.2887881', output)
        with open(self.path('theory.json')) as fp:
            table = json.load(fp)
        self.assertEqual([int(round(e)) for e in table['expected']], [9759, 19517, 4516])
        with open(self.path('theory.json.manifest.json')) as fp:
            manifest = json.load(fp)
        self.assertEqual(manifest['command'][:2], ['aesrank', 'theory'])
        self.assertIn('theory.json', manifest['outputs'])
        self.assertEqual(manifest['version'], aesrank.__version__)

        code, output = self.main('theory', '--n', '3', '--windows', '1000', '--bins', '2')
        self.assertEqual(code, 0)
        self.assertIn('n = 3', output)

        fn = self.path('flat.txt')
        with open(fn, 'w') as fp:
            fp.write('bins = 2\n')
        code, output = self.main('theory', '--config', fn, '--out', self.path('two.json'))
        self.assertEqual(code, 0)
        with open(self.path('two.json')) as fp:
            self.assertEqual([int(round(e)) for e in json.load(fp)['expected']], [29276, 4516])
        with open(self.path('two.json.manifest.json')) as fp:
            self.assertEqual(json.load(fp)['config']['experiment']['bins'], '2')

    def test_rank(self):
        fn = self.path('matrix.gf2m')
        matrix = aesrank.gf2.BitMatrix.zeros(100, 130)
        matrix.data[:70] = aesrank.gf2.BitMatrix.identity(130).data[:70]
        matrix.data[80] = matrix.data[3] ^ matrix.data[5]
        matrix.tofile(fn)
        code, output = self.main('rank', fn, '--threshold', '64')
        self.assertEqual(code, 0)
        self.assertIn('100x130 matrix, rank 70', output)
        self.assertEqual(self.main('rank', fn, '--out', self.path('rank.json'))[0], 0)
        with open(self.path('rank.json')) as fp:
            self.assertEqual(json.load(fp), dict(filename='matrix.gf2m', nrows=100, ncols=130, rank=70, threshold=1024))
        self.assertTrue(os.path.exists(self.path('rank.json.manifest.json')))
        self.assertEqual(self.main('rank', self.path('missing.gf2m'))[0], 1)

    def test_usage_errors(self):
        err = io.StringIO()
        with contextlib.redirect_stderr(err):
            self.assertEqual(self.main('census', '--random', '--tau', '0')[0], 2)
        self.assertIn('error: tau must be at least 1, got 0\n', err.getvalue())
        self.assertNotIn('Unable to parse', err.getvalue())
        self.assertEqual(self.main('distinguish', '--tau', '70', '--threads', '1')[0], 2)
        self.assertEqual(self.main('distinguish', '--full-scale')[0], 2)
        self.assertEqual(self.main('census', '--rounds', '11', '--windows', '1', '--threads', '1')[0], 2)
        self.assertEqual(self.main()[0], 2)
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                self.main('census', '--windows', '0')
        self.assertEqual(cm.exception.code, 2)

    def test_census(self):
        fn = self.path('census.json')
        code, output = self.main('census', '--random', '--out', fn, *TINY)
        self.assertEqual(code, 0)
        censuses = aesrank.census.load(fn)
        self.assertEqual([(c.arm, c.key_index, c.total) for c in censuses], [('random', 0, 2)])
        self.assertTrue(os.path.exists(fn + '.manifest.json'))
        self.assertIn('random #0 (2 windows)', output)

        fn = self.path('plain.csv')
        self.assertEqual(self.main('census', '--plain', '--out', fn, *TINY)[0], 0)
        self.assertEqual([c.arm for c in aesrank.census.load(fn)], ['plain'])

        fn = self.path('rounds.json')
        self.assertEqual(self.main('census', '--rounds', '2', '--out', fn, *TINY)[0], 0)
        self.assertEqual(aesrank.census.load(fn)[0].rounds, '2')
        self.assertEqual(self.main('census', '--rounds', '2', '--last-round', 'typical', '--out', fn, *TINY)[0], 0)
        self.assertEqual(aesrank.census.load(fn)[0].rounds, '2-typical')

    def test_distinguish(self):
        report = self.path('report.json')
        code, output = self.main('distinguish', '--out', report, *TINY)
        # windows of 16 rows are never close to full rank
        self.assertEqual(code, 1)
        self.assertIn('verdict: not distinguished', output)
        with open(report) as fp:
            data = json.load(fp)
        self.assertEqual(data['verdict'], 'not distinguished')
        self.assertEqual((data['tau'], data['windows'], data['rounds']), (1, 2, 'full'))
        for name in ('report.plot.csv', 'report.censuses.json', 'report.json.manifest.json'):
            self.assertTrue(os.path.exists(self.path(name)), name)
        with open(self.path('report.json.manifest.json')) as fp:
            outputs = json.load(fp)['outputs']
        self.assertEqual(sorted(outputs), ['report.censuses.json', 'report.json', 'report.plot.csv'])

        code, output = self.main('distinguish', '--per-key', '--out', report, *TINY)
        self.assertEqual(code, 0)
        with open(self.path('report.perkey.json')) as fp:
            rows = json.load(fp)
        self.assertEqual([(r['arm'], r['key_index']) for r in rows], [('aes', 0), ('random', 0)])

    def test_config_file(self):
        fn = self.path('experiment.txt')
        with open(fn, 'w') as fp:
            fp.write('[dispatcher]\ntype = singlecore\nquiet = true\ndestination = {0}\n'.format(self.path('census_{arm}_{seed}.json')))
            fp.write('[experiment]\ntau = 1\nwindows = 2\nwindow_size = 16\nseed = 3\n')
        with contextlib.redirect_stdout(io.StringIO()):
            censuses = aesrank.run('{0} census random'.format(fn))
            report = aesrank.run('-c experiment:bins=3 {0} distinguish {1}'.format(fn, self.path('run.json')))
        self.assertEqual([c.key for c in censuses], [('random', 0)])
        self.assertTrue(os.path.exists(self.path('census_random_3.json')))
        self.assertEqual(len(report.bins), 3)
        self.assertFalse(report.distinguished)

        code, output = self.main('census', '--random', '--config', fn, '--out', self.path('cli.json'))
        self.assertEqual(code, 0)
        self.assertEqual(aesrank.census.load(self.path('cli.json'))[0].seed, 3)


if __name__ == '__main__':
    unittest.main()
