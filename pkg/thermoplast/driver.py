"""Defines the command line interface for thermoplast."""
import argparse
from dataclasses import (
    dataclass,
    field,
)
import inspect
import logging
import os
import sys

from typing import (  # noqa: F401
    List,
    Optional,
)

from . import __version__
from .config import (
    get_config,
    get_logger,
    LogLevel,
)
from .coupled_solver import (
    lambda_sweep,
    run_simulation,
)
from .errors import (
    ConfigError,
    SimulationError,
    SolverError,
    ThermoplastError,
    VerificationError,
)
from .mms import (
    SIZES,
    run_studies,
)
from .model_config import (
    ModelConfig,
    load_config,
    serialize_config,
)
from .verification import run_suites
from .writers import (
    atomic_write,
    snapshot_steps,
    write_cauchy,
    write_diagnostics,
    write_lift,
    write_snapshots,
)
import thermoplast.errors


EXIT_SUCCESS = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VERIFICATION = 3

COMMANDS = ('run', 'sweep', 'verify', 'mms')


# ---------------------- ARGUMENT PARSER -----------------------------

parser = argparse.ArgumentParser(
    description='Simulate regularized thermo-plasticity on a rectangle.',
)
parser.add_argument(
    'command',
    nargs='?',
    choices=COMMANDS,
    help=(
        'run: simulate one configuration.  '
        'sweep: simulate one configuration for several lambdas and '
        'compare the stresses.  '
        'verify: run the sampling-based invariant suites.  '
        'mms: run the manufactured-solution convergence studies.'
    ),
)
parser.add_argument(
    'config',
    nargs='?',
    help='The model configuration file, for run and sweep.',
)
parser.add_argument(
    '--output',
    '-o',
    type=str,
    default='thermoplast-output',
    help='The directory to write results into.',
)
parser.add_argument(
    '--lambdas',
    type=str,
    default=None,
    help=(
        'A comma-separated, descending list of regularization '
        'parameters for sweep.  E.g.: "0.1,0.05,0.02,0.01"'
    ),
)
parser.add_argument(
    '--seed',
    type=int,
    default=None,
    help=(
        'The seed of the property suites.  Defaults to output.seed '
        'of the configuration, or zero.'
    ),
)
parser.add_argument(
    '--sizes',
    type=str,
    default=None,
    help='Comma-separated grid sizes for mms.  Defaults to 16,32,64.',
)
parser.add_argument(
    '--workers',
    type=int,
    default=None,
    help='The number of sweep members to run at once.',
)
parser.add_argument(
    '--dump-lift',
    action='store_true',
    help='Also write the boundary-lift temperature as theta_tilde.csv.',
)
parser.add_argument(
    '--list-errors',
    action='store_true',
    help=(
        'Print a list of error codes and what they represent.'
    )
)
parser.add_argument(
    '--version',
    action='store_true',
    help=(
        'Return the current version number of thermoplast.'
    ),
)
parser.add_argument(
    '--log-level',
    '-l',
    type=str,
    default=None,
    choices=[
        'CRITICAL',
        'ERROR',
        'WARNING',
        'INFO',
        'DEBUG',
    ],
    help=(
        'The level at which to log.  The default level, CRITICAL, '
        'means that only the most severe of errors will be logged.  '
        'Failed invariants are logged at the ERROR level.'
    )
)

# ---------------------- MAIN SCRIPT ---------------------------------


@dataclass
class RunManifest(object):
    """Everything a command needs, resolved from the arguments."""

    command: str
    config_path: Optional[str] = None
    cfg: ModelConfig = field(default_factory=ModelConfig)
    output: str = 'thermoplast-output'
    snapshot_every: int = 1
    seed: int = 0
    lambdas: List[float] = field(default_factory=list)
    sizes: List[int] = field(default_factory=lambda: list(SIZES))
    workers: Optional[int] = None
    dump_lift: bool = False


def _prepare_output(manifest):
    # type: (RunManifest) -> None
    os.makedirs(manifest.output, exist_ok=True)
    atomic_write(
        os.path.join(manifest.output, 'config.echo'),
        serialize_config(manifest.cfg),
    )


def _write_result(result, directory, every, dump_lift=False):
    steps = write_snapshots(result, directory, every)
    if result.report is not None:
        write_diagnostics(
            result.report, os.path.join(directory, 'diagnostics.csv'), steps,
        )
        atomic_write(
            os.path.join(directory, 'summary.txt'), result.report.summary(),
        )
    if dump_lift:
        write_lift(result, os.path.join(directory, 'theta_tilde.csv'))


def cmd_run(manifest):
    # type: (RunManifest) -> int
    """Simulate, then write snapshots and diagnostics.

    On a failed step the partial trajectory is written before
    exiting.

    Returns:
        The exit status.

    """
    _prepare_output(manifest)
    try:
        result = run_simulation(manifest.cfg)
    except SimulationError as exc:
        print(str(exc), file=sys.stderr)
        if exc.partial is not None:
            _write_result(exc.partial, manifest.output,
                          manifest.snapshot_every)
        return EXIT_SOLVER
    _write_result(result, manifest.output, manifest.snapshot_every,
                  manifest.dump_lift)
    print(result.report.summary(), end='')
    return EXIT_SUCCESS


def cmd_sweep(manifest):
    # type: (RunManifest) -> int
    """Run a lambda sweep, one subdirectory per member.

    Returns:
        The exit status: nonzero if any member failed.

    """
    if len(manifest.lambdas) < 2:
        print('sweep needs at least two values in --lambdas',
              file=sys.stderr)
        return EXIT_CONFIG
    _prepare_output(manifest)
    sweep = lambda_sweep(manifest.cfg, manifest.lambdas, manifest.workers)

    lines = []
    for index, member in enumerate(sweep.members):
        directory = os.path.join(
            manifest.output,
            'member_{:02d}_lambda_{!r}'.format(index, member.lam),
        )
        if member.ok:
            os.makedirs(directory, exist_ok=True)
            atomic_write(os.path.join(directory, 'config.echo'),
                         serialize_config(member.result.cfg))
            _write_result(member.result, directory, manifest.snapshot_every)
            lines.append('lambda = {!r}: ok'.format(member.lam))
        else:
            error = member.error
            partial = getattr(error, 'partial', None)
            if partial is not None:
                _write_result(partial, directory, manifest.snapshot_every)
            lines.append('lambda = {!r}: FAILED {}'.format(member.lam, error))

    steps = snapshot_steps(len(sweep.times) - 1, manifest.snapshot_every)
    write_cauchy(sweep, os.path.join(manifest.output, 'cauchy.csv'), steps)
    lines.append('final metrics: {}'.format(
        ', '.join(repr(float(value)) for value in sweep.final_metrics)
    ))
    lines.append('verdict: {}'.format(
        'decreasing' if sweep.decreasing else 'not decreasing'
    ))
    summary = '\n'.join(lines) + '\n'
    atomic_write(os.path.join(manifest.output, 'summary.txt'), summary)
    print(summary, end='')
    return EXIT_SOLVER if sweep.failures else EXIT_SUCCESS


def cmd_verify(manifest):
    # type: (RunManifest) -> int
    results = run_suites(manifest.seed)
    for result in results:
        print(result)
    failed = [result.name for result in results if not result.passed]
    if failed:
        print(str(VerificationError(failed)), file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_SUCCESS


def cmd_mms(manifest):
    # type: (RunManifest) -> int
    studies = run_studies(manifest.sizes)
    for study in studies:
        print(study.report())
    failed = [study.name for study in studies if not study.passed]
    if failed:
        print(str(VerificationError(failed)), file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_SUCCESS


def print_error_list():
    errors = list()  # type: List[str]
    for name, obj in inspect.getmembers(thermoplast.errors, inspect.isclass):
        if (issubclass(obj, thermoplast.errors.ThermoplastError)
                and obj.error_code is not None):
            errors.append('{}: {}'.format(obj.error_code, obj.description))
    errors.sort()
    print('\n'.join(errors))


def print_version():
    print(__version__)


def _split(text, convert):
    return [convert(part.strip()) for part in text.split(',') if part.strip()]


def build_manifest(args):
    # type: (argparse.Namespace) -> RunManifest
    """Resolve the arguments into a manifest.

    Raises:
        ConfigError: If the configuration file is invalid.
        OSError: If it cannot be read.

    Returns:
        The manifest.

    """
    manifest = RunManifest(
        command=args.command,
        config_path=args.config,
        output=args.output,
        workers=args.workers,
        dump_lift=args.dump_lift,
    )
    if args.config:
        manifest.cfg = load_config(args.config)
    manifest.snapshot_every = manifest.cfg.output.snapshot_every
    manifest.seed = (
        args.seed if args.seed is not None else manifest.cfg.output.seed
    )
    if args.lambdas:
        manifest.lambdas = _split(args.lambdas, float)
    if args.sizes:
        manifest.sizes = _split(args.sizes, int)
    return manifest


def main(argv=None):
    # type: (Optional[List[str]]) -> None
    """Run thermoplast.

    Called as a script when setup.py is installed.

    """
    args = parser.parse_args(argv)

    if args.list_errors:
        print_error_list()
        sys.exit(EXIT_SUCCESS)

    if args.version:
        print_version()
        sys.exit(EXIT_SUCCESS)

    if args.command is None:
        parser.print_usage(sys.stderr)
        sys.exit(EXIT_CONFIG)

    config = get_config()
    if args.log_level:
        logging.basicConfig(format='%(levelname)s %(name)s: %(message)s')
        config.log_level = LogLevel.from_string(args.log_level)

    logger = get_logger()
    commands = {
        'run': cmd_run,
        'sweep': cmd_sweep,
        'verify': cmd_verify,
        'mms': cmd_mms,
    }
    try:
        manifest = build_manifest(args)
        if manifest.command in ('run', 'sweep') and not manifest.config_path:
            print('{} needs a configuration file'.format(manifest.command),
                  file=sys.stderr)
            sys.exit(EXIT_CONFIG)
        status = commands[manifest.command](manifest)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        sys.exit(EXIT_CONFIG)
    except SolverError as exc:
        print(str(exc), file=sys.stderr)
        sys.exit(EXIT_SOLVER)
    except VerificationError as exc:
        print(str(exc), file=sys.stderr)
        sys.exit(EXIT_VERIFICATION)
    except ThermoplastError as exc:
        print(str(exc), file=sys.stderr)
        sys.exit(EXIT_SOLVER)
    except OSError as exc:
        logger.critical(exc)
        print(str(exc), file=sys.stderr)
        sys.exit(EXIT_SOLVER)
    sys.exit(status)


if __name__ == '__main__':
    main()
