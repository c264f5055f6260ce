"""This module describes all errors which can be reported by thermoplast.

Errors can be anything from a malformed line in a model
configuration file, to a conjugate-gradient solve which failed
to reach its tolerance in the middle of a simulation.

Groups of errors:

    100 Model configuration
    200 Solvers
    300 Diagnostics
    400 Verification

The command-line driver maps the groups onto exit codes:
configuration errors exit with 1, solver errors with 2 and
verification failures with 3.

"""
from typing import (  # noqa: F401
    Any,
    List,
    Optional,
    Sequence,
)


class ThermoplastError(Exception):
    """The base of every error thermoplast reports.

    A subclass sets `error_code`, `general_message` and `description`
    as class attributes.  Its constructor records the particulars (the
    key, the residual, the step) and sets `terse_message` before
    calling this constructor.  The string of the error is then
    `CODE: general: terse`.

    """

    terse_message = None  # type: str

    # The kind of failure, without particulars or final punctuation.
    general_message = None  # type: str

    # TPnnn, where the hundreds give the group listed above.
    error_code = None  # type: str

    # One line for `--list-errors`.
    description = None  # type: str

    def message(self, verbosity=1):
        # type: (int) -> str
        """Format the message.

        Args:
            verbosity: 1 for the particulars only, 2 to put the
                general message in front of them.

        Raises:
            ValueError: For any other verbosity.

        Returns:
            The message.

        """
        parts = {
            1: (self.terse_message,),
            2: (self.general_message, self.terse_message),
        }.get(verbosity)
        if parts is None:
            raise ValueError('Verbosity must be 1 or 2, not {}'.format(
                verbosity,
            ))
        return ': '.join(str(part) for part in parts)

    def __init__(self):
        # type: () -> None
        missing = [
            name for name in ('terse_message', 'general_message', 'error_code')
            if getattr(self, name) is None
        ]
        if missing:
            raise NotImplementedError('{} leaves {} unset'.format(
                type(self).__name__, ', '.join(missing),
            ))
        super(ThermoplastError, self).__init__(
            '{}: {}'.format(self.error_code, self.message(verbosity=2))
        )


def _location(key, line_number):
    # type: (Optional[str], Optional[int]) -> str
    if line_number is None:
        return '{}'.format(key)
    return 'line {}: {}'.format(line_number, key)


class ConfigError(ThermoplastError):
    """Base class for errors in a model configuration file."""

    # The key which was at fault, if any.
    key = None  # type: Optional[str]

    # The line of the configuration file, if known.
    line_number = None  # type: Optional[int]


class ConfigSyntaxError(ConfigError):
    """Describes a line which is not of the form `section.key = value`."""

    error_code = 'TP100'
    description = 'A line is not of the form `section.key = value`.'

    def __init__(self, line, line_number):
        # type: (str, int) -> None
        self.line_number = line_number
        self.general_message = 'Malformed configuration line'
        self.terse_message = 'line {}: {!r}'.format(line_number, line)
        super(ConfigSyntaxError, self).__init__()


class UnknownKeyError(ConfigError):
    """Describes a key which the model configuration does not know."""

    error_code = 'TP101'
    description = 'The configuration names a key which does not exist.'

    def __init__(self, key, line_number=None):
        # type: (str, Optional[int]) -> None
        self.key = key
        self.line_number = line_number
        self.general_message = 'Unknown configuration key'
        self.terse_message = _location(key, line_number)
        super(UnknownKeyError, self).__init__()


class MissingKeyError(ConfigError):
    """Describes a key which is required by another key's value."""

    error_code = 'TP102'
    description = 'A required configuration key is missing.'

    def __init__(self, key, reason):
        # type: (str, str) -> None
        self.key = key
        self.general_message = 'Missing configuration key'
        self.terse_message = '{} (required because {})'.format(key, reason)
        super(MissingKeyError, self).__init__()


class DuplicateKeyError(ConfigError):
    """Describes a key which is given more than once."""

    error_code = 'TP103'
    description = 'A configuration key is given more than once.'

    def __init__(self, key, line_number, first_line_number):
        # type: (str, int, int) -> None
        self.key = key
        self.line_number = line_number
        self.general_message = 'Duplicate configuration key'
        self.terse_message = '{} (first given on line {})'.format(
            _location(key, line_number),
            first_line_number,
        )
        super(DuplicateKeyError, self).__init__()


class InvalidValueError(ConfigError):
    """Describes a value which cannot be used for its key."""

    error_code = 'TP104'
    description = 'A configuration value is malformed or out of range.'

    def __init__(self, key, value, expected, line_number=None):
        # type: (str, Any, str, Optional[int]) -> None
        self.key = key
        self.value = value
        self.line_number = line_number
        self.general_message = 'Invalid configuration value'
        self.terse_message = '{} = {!r}, expected {}'.format(
            _location(key, line_number),
            value,
            expected,
        )
        super(InvalidValueError, self).__init__()


class AlphaWindowError(ConfigError):
    """Describes a growth exponent outside of (1/2, 5/6)."""

    error_code = 'TP105'
    description = (
        'The growth exponent alpha of the thermal stress function '
        'is outside of the open window (1/2, 5/6).'
    )

    def __init__(self, key, value, line_number=None):
        # type: (str, float, Optional[int]) -> None
        self.key = key
        self.value = value
        self.line_number = line_number
        self.general_message = 'Growth exponent outside (1/2, 5/6)'
        self.terse_message = '{} = {!r}'.format(
            _location(key, line_number),
            value,
        )
        super(AlphaWindowError, self).__init__()


class NonPositiveParameterError(ConfigError):
    """Describes a parameter which must be strictly positive."""

    error_code = 'TP106'
    description = 'A parameter which must be strictly positive is not.'

    def __init__(self, key, value, line_number=None):
        # type: (str, float, Optional[int]) -> None
        self.key = key
        self.value = value
        self.line_number = line_number
        self.general_message = 'Parameter must be positive'
        self.terse_message = '{} = {!r}'.format(
            _location(key, line_number),
            value,
        )
        super(NonPositiveParameterError, self).__init__()


class InitialAdmissibilityError(ConfigError):
    """Describes initial data whose stress lies outside of K."""

    error_code = 'TP107'
    description = (
        'The initial stress is not admissible: |P T(0)| exceeds '
        'the yield limit somewhere.'
    )

    def __init__(self, max_deviator, k):
        # type: (float, float) -> None
        self.max_deviator = max_deviator
        self.k = k
        self.general_message = 'Inadmissible initial stress'
        self.terse_message = 'max |P T(0)| = {:.6g} > k = {:.6g}'.format(
            max_deviator, k,
        )
        super(InitialAdmissibilityError, self).__init__()


class GrowthConditionError(ConfigError):
    """Describes a thermal stress function violating its growth bound."""

    error_code = 'TP108'
    description = (
        'The thermal stress function violates the growth conditions '
        'at a sampled argument.'
    )

    def __init__(self, key, argument, value, bound):
        # type: (str, float, float, float) -> None
        self.key = key
        self.general_message = 'Growth condition violated'
        self.terse_message = '{}: |f({:.6g})| = {:.6g} > {:.6g}'.format(
            key, argument, value, bound,
        )
        super(GrowthConditionError, self).__init__()


class SolverError(ThermoplastError):
    """Base class for failures of the numerical solvers."""


class ConvergenceError(SolverError):
    """Describes a conjugate-gradient solve which did not converge."""

    error_code = 'TP201'
    description = (
        'The conjugate-gradient solve did not reach its tolerance '
        'within the allowed number of iterations.'
    )

    def __init__(self, iterations, residual, tolerance, context=''):
        # type: (int, float, float, str) -> None
        self.iterations = iterations
        self.residual = residual
        self.tolerance = tolerance
        self.context = context
        self.general_message = 'Linear solve did not converge'
        self.terse_message = (
            '{}relative residual {:.3e} > {:.3e} after {} iterations'
        ).format(
            context + ': ' if context else '',
            residual,
            tolerance,
            iterations,
        )
        super(ConvergenceError, self).__init__()


class PicardConvergenceError(SolverError):
    """Describes a fixed-point iteration which did not settle."""

    error_code = 'TP202'
    description = (
        'The fixed-point iteration coupling the mechanical and '
        'thermal problems exceeded its iteration limit.'
    )

    def __init__(self, history, tolerance, t=None):
        # type: (Sequence[float], float, Optional[float]) -> None
        self.history = list(history)
        self.tolerance = tolerance
        self.t = t
        self.general_message = 'Fixed-point iteration did not converge'
        self.terse_message = (
            '{} iterations{}, last increment {:.3e} > {:.3e}'
        ).format(
            len(self.history),
            '' if t is None else ' at t = {:.6g}'.format(t),
            self.history[-1] if self.history else float('nan'),
            tolerance,
        )
        super(PicardConvergenceError, self).__init__()


class SimulationError(SolverError):
    """Describes a time step which failed during a run."""

    error_code = 'TP203'
    description = 'A time step of the simulation failed.'

    def __init__(self, step, cause, partial=None):
        # type: (int, Exception, Optional[Any]) -> None
        self.step = step
        self.cause = cause
        self.partial = partial
        self.general_message = 'Simulation step failed'
        self.terse_message = 'step {}: {}'.format(step, cause)
        super(SimulationError, self).__init__()


class DiagnosticsError(ThermoplastError):
    """Base class for invalid diagnostics requests."""


class GridMismatchError(DiagnosticsError):
    """Describes fields which do not live on the same grid."""

    error_code = 'TP301'
    description = 'Two fields were compared on different grids.'

    def __init__(self, shape_a, shape_b):
        # type: (Any, Any) -> None
        self.general_message = 'Fields live on different grids'
        self.terse_message = '{} vs {}'.format(shape_a, shape_b)
        super(GridMismatchError, self).__init__()


class ParameterRangeError(DiagnosticsError):
    """Describes a diagnostics parameter outside its admissible range."""

    error_code = 'TP302'
    description = 'A diagnostics parameter is outside its admissible range.'

    def __init__(self, name, value, expected):
        # type: (str, Any, str) -> None
        self.name = name
        self.value = value
        self.general_message = 'Parameter out of range'
        self.terse_message = '{} = {!r}, expected {}'.format(
            name, value, expected,
        )
        super(ParameterRangeError, self).__init__()


class VerificationError(ThermoplastError):
    """Describes verification suites which did not pass."""

    error_code = 'TP401'
    description = 'One or more verification suites failed.'

    def __init__(self, failed):
        # type: (List[str]) -> None
        self.failed = list(failed)
        self.general_message = 'Verification failed'
        self.terse_message = ', '.join(self.failed)
        super(VerificationError, self).__init__()
