import inspect
from unittest import TestCase

import thermoplast.errors
from thermoplast.errors import (
    ConvergenceError,
    InvalidValueError,
    PicardConvergenceError,
    SimulationError,
    ThermoplastError,
    UnknownKeyError,
)


def error_classes():
    return [
        obj for _, obj in inspect.getmembers(thermoplast.errors,
                                             inspect.isclass)
        if issubclass(obj, ThermoplastError) and obj.error_code is not None
    ]


class ErrorCodeTestCase(TestCase):

    def test_codes_are_unique(self):
        codes = [cls.error_code for cls in error_classes()]
        self.assertEqual(len(codes), len(set(codes)))

    def test_codes_follow_their_group(self):
        groups = {
            thermoplast.errors.ConfigError: 'TP1',
            thermoplast.errors.SolverError: 'TP2',
            thermoplast.errors.DiagnosticsError: 'TP3',
            thermoplast.errors.VerificationError: 'TP4',
        }
        for cls in error_classes():
            prefixes = [
                prefix for base, prefix in groups.items()
                if issubclass(cls, base)
            ]
            self.assertEqual(len(prefixes), 1, cls.__name__)
            self.assertTrue(cls.error_code.startswith(prefixes[0]))

    def test_every_error_is_described(self):
        for cls in error_classes():
            self.assertTrue(cls.description, cls.__name__)


class ErrorMessageTestCase(TestCase):

    def test_str_has_code_general_and_terse_parts(self):
        error = UnknownKeyError('grid.nz', 3)
        self.assertEqual(
            str(error), 'TP101: Unknown configuration key: line 3: grid.nz',
        )

    def test_verbosity(self):
        error = InvalidValueError('flow.k', 'x', 'a finite number')
        self.assertEqual(
            error.message(verbosity=1),
            "flow.k = 'x', expected a finite number",
        )
        self.assertTrue(error.message(verbosity=2).startswith(
            'Invalid configuration value: '
        ))
        with self.assertRaises(Exception):
            error.message(verbosity=3)

    def test_incomplete_error_cannot_be_raised(self):
        class Incomplete(ThermoplastError):
            pass

        with self.assertRaises(NotImplementedError):
            Incomplete()

    def test_picard_error_reports_the_last_increment(self):
        error = PicardConvergenceError([1.0, 0.5, 0.25], 1e-8, t=0.02)
        self.assertIn('3 iterations at t = 0.02', str(error))
        self.assertIn('2.500e-01', str(error))

    def test_simulation_error_wraps_its_cause(self):
        cause = ConvergenceError(10, 1e-3, 1e-10, 'heat')
        error = SimulationError(4, cause)
        self.assertIs(error.cause, cause)
        self.assertIn('step 4', str(error))
        self.assertIn('heat: relative residual', str(error))
