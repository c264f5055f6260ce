"""Tests for the output files."""

import os
import tempfile
from unittest import (
    mock,
    TestCase,
)

from thermoplast.coupled_solver import run_simulation
from thermoplast.diagnostics import COLUMNS
from thermoplast.writers import (
    SNAPSHOT_COLUMNS,
    atomic_write,
    csv_text,
    snapshot_csv_text,
    snapshot_steps,
    vtk_text,
    write_diagnostics,
    write_lift,
    write_snapshots,
)

from .utils import small_config


class AtomicWriteTestCase(TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def test_writes_and_creates_directories(self):
        path = os.path.join(self.directory.name, 'a', 'b', 'out.txt')
        atomic_write(path, 'hello\n')
        with open(path) as fin:
            self.assertEqual(fin.read(), 'hello\n')

    def test_replaces_existing_file(self):
        path = os.path.join(self.directory.name, 'out.txt')
        atomic_write(path, 'first\n')
        atomic_write(path, 'second\n')
        with open(path) as fin:
            self.assertEqual(fin.read(), 'second\n')
        self.assertEqual(os.listdir(self.directory.name), ['out.txt'])

    @mock.patch('thermoplast.writers.os.replace')
    def test_failure_leaves_no_temporary(self, mock_replace):
        mock_replace.side_effect = OSError('disk full')
        path = os.path.join(self.directory.name, 'out.txt')
        with self.assertRaises(OSError):
            atomic_write(path, 'lost\n')
        self.assertEqual(os.listdir(self.directory.name), [])


class CsvTextTestCase(TestCase):

    def test_floats_round_trip(self):
        text = csv_text(['a', 'b', 'c'], [[1, 0.1, True]])
        self.assertEqual(text, 'a,b,c\n1,0.1,1\n')
        value = 1.0 / 3.0
        written = csv_text(['x'], [[value]]).splitlines()[1]
        self.assertEqual(float(written), value)


class SnapshotStepsTestCase(TestCase):

    def test_first_and_last_are_always_included(self):
        self.assertEqual(snapshot_steps(10, 3), [0, 3, 6, 9, 10])
        self.assertEqual(snapshot_steps(9, 3), [0, 3, 6, 9])
        self.assertEqual(snapshot_steps(4, 1), [0, 1, 2, 3, 4])
        self.assertEqual(snapshot_steps(0, 5), [0])


class ResultFilesTestCase(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.result = run_simulation(small_config(
            loads__kind='ramp', loads__fx=5.0,
            thermal__g_kind='constant', thermal__g_value=0.5,
        ))

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def test_vtk_layout(self):
        grid = self.result.grid
        lines = vtk_text(self.result, 2).splitlines()
        self.assertEqual(lines[0], '# vtk DataFile Version 3.0')
        self.assertEqual(lines[3], 'DATASET STRUCTURED_POINTS')
        self.assertEqual(lines[4], 'DIMENSIONS 9 9 1')
        self.assertIn('POINT_DATA {}'.format(grid.n_nodes), lines)
        self.assertIn('CELL_DATA {}'.format(grid.n_cells), lines)
        for name in ('theta', 'temperature', 'deviatoric_stress',
                     'plastic_strain', 'dissipation', 'admissible'):
            self.assertIn('SCALARS {} double 1'.format(name), lines)
        start = lines.index('VECTORS displacement double') + 1
        self.assertEqual(
            len(lines[start:start + grid.n_nodes]), grid.n_nodes,
        )
        self.assertTrue(lines[start + grid.n_nodes].startswith('SCALARS'))

    def test_snapshot_csv(self):
        lines = snapshot_csv_text(self.result, 1).splitlines()
        self.assertEqual(lines[0], ','.join(SNAPSHOT_COLUMNS))
        self.assertEqual(len(lines), 1 + self.result.grid.n_nodes)
        self.assertTrue(lines[1].startswith('0,0.0,0.0,'))

    def test_snapshot_files(self):
        steps = write_snapshots(self.result, self.directory.name, 3)
        self.assertEqual(steps, [0, 3, 4])
        names = sorted(os.listdir(
            os.path.join(self.directory.name, 'snapshots')
        ))
        self.assertEqual(names, [
            'step_000000.csv', 'step_000000.vtk',
            'step_000003.csv', 'step_000003.vtk',
            'step_000004.csv', 'step_000004.vtk',
        ])

    def test_diagnostics_rows_follow_the_steps(self):
        path = os.path.join(self.directory.name, 'diagnostics.csv')
        write_diagnostics(self.result.report, path, [0, 2, 4])
        with open(path) as fin:
            lines = fin.read().splitlines()
        self.assertEqual(lines[0], ','.join(COLUMNS))
        self.assertEqual(
            [line.split(',')[0] for line in lines[1:]], ['0', '2', '4'],
        )

    def test_files_are_reproducible(self):
        first = os.path.join(self.directory.name, 'first.csv')
        second = os.path.join(self.directory.name, 'second.csv')
        write_diagnostics(self.result.report, first, [0, 1, 2, 3, 4])
        write_diagnostics(self.result.report, second, [0, 1, 2, 3, 4])
        with open(first) as a, open(second) as b:
            self.assertEqual(a.read(), b.read())

    def test_lift(self):
        path = os.path.join(self.directory.name, 'theta_tilde.csv')
        write_lift(self.result, path)
        with open(path) as fin:
            lines = fin.read().splitlines()
        self.assertEqual(len(lines), 1 + len(self.result.trajectory))
        self.assertEqual(
            len(lines[0].split(',')), 2 + self.result.grid.n_nodes,
        )
