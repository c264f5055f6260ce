import random
from typing import (  # noqa: F401
    Any,
    Dict,
)

import numpy as np

from thermoplast.model_config import parse_config


def random_tensors(count, scale=3.0, seed=None):
    # type: (int, float, Any) -> np.ndarray
    """Draw symmetric tensors with components uniform in [-scale, scale].

    Args:
        count: The number of tensors.
        scale: The half width of the sampling box.
        seed: The seed of the generator.  Random if not given.

    Returns:
        An array of shape (count, 6).

    """
    if seed is None:
        seed = random.randint(0, 2 ** 31)
    rng = np.random.default_rng(seed)
    return rng.uniform(-scale, scale, size=(count, 6))


def config_text(**overrides):
    # type: (**Any) -> str
    """Build a configuration file from keyword arguments.

    A double underscore stands for the dot between section and key,
    so `time__dt=0.01` gives the line `time.dt = 0.01`.

    Returns:
        The text of a configuration file.

    """
    lines = []
    for name, value in overrides.items():
        key = name.replace('__', '.')
        if isinstance(value, bool):
            value = 'true' if value else 'false'
        lines.append('{} = {}'.format(key, value))
    return '\n'.join(lines) + '\n'


def small_config(**overrides):
    """A quick configuration: an 8x8 grid and a handful of steps."""
    settings = {
        'grid__nx': 8,
        'grid__ny': 8,
        'flow__lambda': 0.1,
        'time__T_end': 0.04,
        'time__dt': 0.01,
    }  # type: Dict[str, Any]
    settings.update(overrides)
    return parse_config(config_text(**settings))


# A low yield limit and a constant body force: the clamped square
# yields in the first step, at strain rates of order one.
PLASTIC = {
    'flow__k': 0.05,
    'loads__kind': 'constant',
    'loads__fx': 40.0,
    'solver__picard_tol': 1e-9,
    'solver__cg_tol': 1e-12,
}
