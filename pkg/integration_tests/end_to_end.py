from unittest import TestCase

import os
import subprocess
import tempfile


CONFIG = '\n'.join([
    '# A small plastic run.',
    'grid.nx = 8',
    'grid.ny = 8',
    'time.T_end = 0.05',
    'time.dt = 0.005',
    'loads.kind = ramp',
    'loads.fx = 200.0',
    'flow.k = 0.05',
    'thermal.g_kind = constant',
    'thermal.g_value = 0.5',
    '',
])


class EndToEndTest(TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)
        self.config = os.path.join(self.directory.name, 'model.cfg')
        with open(self.config, 'w') as fout:
            fout.write(CONFIG)

    def run_thermoplast(self, *args):
        proc = subprocess.run(
            ['thermoplast', *args],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )
        return proc.returncode, proc.stdout.decode('utf8')

    def read(self, *parts):
        with open(os.path.join(self.directory.name, *parts), 'rb') as fin:
            return fin.read()

    def test_runs_are_bitwise_reproducible(self):
        for name in ('first', 'second'):
            code, _ = self.run_thermoplast(
                'run', self.config,
                '--output', os.path.join(self.directory.name, name),
            )
            self.assertEqual(code, 0)
        self.assertEqual(
            self.read('first', 'diagnostics.csv'),
            self.read('second', 'diagnostics.csv'),
        )
        self.assertEqual(
            self.read('first', 'snapshots', 'step_000010.vtk'),
            self.read('second', 'snapshots', 'step_000010.vtk'),
        )

    def test_verify(self):
        code, output = self.run_thermoplast('verify', '--seed', '1')
        self.assertEqual(code, 0, output)
        self.assertNotIn('FAIL', output)

    def test_configuration_error_exit_code(self):
        with open(self.config, 'a') as fout:
            fout.write('flow.alpha = 0.9\n')
        code, _ = self.run_thermoplast('run', self.config)
        self.assertEqual(code, 1)

    def test_list_errors(self):
        code, output = self.run_thermoplast('--list-errors')
        self.assertEqual(code, 0)
        self.assertIn('TP202', output)
