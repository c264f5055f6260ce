"""Runtime configuration and the thermoplast logger.

The runtime configuration says how the simulator behaves: how loud it
logs, what happens when an invariant of the coupled step fails, and how
many threads a lambda sweep may use.  What is simulated lives in the
model configuration (see `model_config`).

Settings are read from a `[thermoplast]` section in the nearest of
`.thermoplast`, `setup.cfg` or `tox.ini`, looking from the working
directory up to the root.  There is one process-wide instance, reached
through `get_config`.  Change it before a sweep starts its workers,
never during.

"""

import configparser
from enum import Enum
import logging
from logging import (  # noqa
    Logger,
)
import os

from typing import (  # noqa
    Any,
    Iterator,
    Mapping,
    Optional,
)


def get_logger():  # type: () -> Logger
    return logging.getLogger('thermoplast')


# In order of precedence within one directory.
POSSIBLE_CONFIG_FILENAMES = (
    '.thermoplast',
    'setup.cfg',
    'tox.ini',
)

SECTION = 'thermoplast'


class _NamedEnum(Enum):

    @classmethod
    def from_string(cls, name):
        # type: (str) -> Any
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError('Unrecognized {} "{}"; expected one of {}'.format(
                cls.__name__,
                name,
                ', '.join(member.name.lower() for member in cls),
            ))


class AssertStyle(_NamedEnum):
    """What to do when a runtime invariant fails."""
    RAISE = 1
    LOG = 2


class LogLevel(_NamedEnum):
    """Levels of the thermoplast logger, mirroring `logging`."""
    CRITICAL = logging.CRITICAL
    ERROR = logging.ERROR
    WARNING = logging.WARNING
    INFO = logging.INFO
    DEBUG = logging.DEBUG


def _positive_int(value):
    # type: (str) -> int
    try:
        number = int(value)
    except ValueError:
        number = 0
    if number < 1:
        raise ValueError(
            'sweep_workers must be a positive integer, not "{}"'.format(value)
        )
    return number


class Configuration(object):
    """The runtime settings.

    Attributes:
        assert_style: Whether a failed invariant is logged or raised.
        log_level: The level of the thermoplast logger.  Assigning it
            reconfigures the logger at once.
        sweep_workers: Threads used by a lambda sweep.  With one, the
            members run in sequence.

    """

    FIELDS = ('assert_style', 'log_level', 'sweep_workers')

    # How each field is read from a configuration section.
    PARSERS = {
        'assert_style': AssertStyle.from_string,
        'log_level': LogLevel.from_string,
        'sweep_workers': _positive_int,
    }

    def __init__(self,
                 assert_style=AssertStyle.LOG,
                 log_level=LogLevel.CRITICAL,
                 sweep_workers=1):
        # type: (AssertStyle, LogLevel, int) -> None
        self.assert_style = assert_style
        self.log_level = log_level
        self.sweep_workers = sweep_workers

    @property
    def log_level(self):
        # type: () -> LogLevel
        return self._log_level

    @log_level.setter
    def log_level(self, log_level):
        # type: (LogLevel) -> None
        self._log_level = log_level
        get_logger().setLevel(log_level.value)

    @classmethod
    def from_section(cls, section):
        # type: (Mapping[str, str]) -> Configuration
        """Build a configuration from the entries of a section.

        Args:
            section: The `[thermoplast]` entries.  Missing fields take
                their defaults; unknown entries are ignored.

        Raises:
            ValueError: If a field has a value it cannot take.

        Returns:
            The configuration.

        """
        values = {
            name: parse(section[name])
            for name, parse in cls.PARSERS.items()
            if name in section
        }
        return cls(**values)

    def __str__(self):
        # type: () -> str
        return '\n'.join(
            '{}={}'.format(name, getattr(value, 'name', value))
            for name, value in (
                (field, getattr(self, field)) for field in self.FIELDS
            )
        )

    @classmethod
    def get_default_instance(cls):
        # type: () -> Configuration
        return cls()


def load_config_file(filename):  # type: (str) -> Configuration
    """Read the runtime configuration from the given file.

    Args:
        filename: A file in ini format.  Without a `[thermoplast]`
            section the defaults are returned.

    Raises:
        ValueError: If an entry of the section is invalid.

    Returns:
        The configuration.

    """
    parser = configparser.ConfigParser()
    parser.read(filename)
    if SECTION not in parser.sections():
        return Configuration.get_default_instance()
    return Configuration.from_section(parser[SECTION])


def walk_path():  # type: () -> Iterator[str]
    """Yield the working directory and each of its ancestors."""
    path = os.getcwd()
    while True:
        yield path
        parent = os.path.dirname(path)
        # The root is its own parent.
        if parent == path:
            return
        path = parent


def find_config_file_in_path(path):  # type: (str) -> Optional[str]
    """Find a file with a `[thermoplast]` section in the directory.

    Args:
        path: The directory to look in.

    Returns:
        The path of the first candidate, in the order of
        `POSSIBLE_CONFIG_FILENAMES`, which has the section.  None if
        no candidate has it or the directory cannot be listed.

    """
    try:
        present = set(os.listdir(path))
    except PermissionError:
        return None
    for filename in POSSIBLE_CONFIG_FILENAMES:
        if filename not in present:
            continue
        candidate = os.path.join(path, filename)
        parser = configparser.ConfigParser()
        try:
            parser.read(candidate)
        except configparser.Error as exception:
            get_logger().error('Skipping %s: %s', candidate, exception)
            continue
        if SECTION in parser.sections():
            return candidate
    return None


def find_config_file():  # type: () -> Optional[str]
    return next(
        (
            filename for filename in map(find_config_file_in_path, walk_path())
            if filename is not None
        ),
        None,
    )


def get_config_from_file():  # type: () -> Configuration
    filename = find_config_file()
    if filename is None:
        return Configuration.get_default_instance()
    return load_config_file(filename)


_config = get_config_from_file()


def get_config():  # type: () -> Configuration
    """Return the process-wide runtime configuration."""
    return _config
