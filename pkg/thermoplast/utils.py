"""Test helpers.  The simulator itself does not import this module."""

from typing import Any  # noqa: F401

from .config import (
    Configuration,
    get_config,
)


class ConfigurationContext(object):
    """Run a block under a temporary runtime configuration.

    Within the block every field starts at its default and then takes
    the given overrides.  The previous values, the logger level among
    them, come back on exit.

    """

    def __init__(self, **overrides):
        # type: (Any) -> None
        unknown = sorted(set(overrides) - set(Configuration.FIELDS))
        if unknown:
            raise TypeError('Unknown runtime configuration fields: {}'.format(
                ', '.join(unknown),
            ))
        self.overrides = overrides
        self.saved = dict()  # type: dict

    def __enter__(self):
        # type: () -> Configuration
        config = get_config()
        defaults = Configuration.get_default_instance()
        for name in Configuration.FIELDS:
            self.saved[name] = getattr(config, name)
            setattr(config, name, self.overrides.get(
                name, getattr(defaults, name),
            ))
        return config

    def __exit__(self, *exc_info):
        config = get_config()
        for name, value in self.saved.items():
            setattr(config, name, value)
        self.saved.clear()
