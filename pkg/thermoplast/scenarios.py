"""Analytic data and the built-in scenario catalog.

Boundary heat flux, body force and initial temperature are given
by a kind and a handful of parameters rather than tabulated data,
so every scenario is reproducible from its configuration alone.

"""
from dataclasses import dataclass
from typing import (  # noqa: F401
    Any,
    Dict,
)

import numpy as np


FLUX_KINDS = ('zero', 'constant', 'sinusoidal', 'ramp')
FORCE_KINDS = ('zero', 'constant', 'ramp', 'bump')
TEMPERATURE_KINDS = ('constant', 'bump')


@dataclass(frozen=True)
class BoundaryFluxSpec(object):
    """The Neumann datum of the boundary-lift heat problem.

    zero:       g = 0
    constant:   g = value
    sinusoidal: g = value * sin(2 pi frequency t)
    ramp:       g = value * t

    """

    kind: str = 'zero'
    value: float = 0.0
    frequency: float = 1.0

    def __call__(self, x, y, t):
        # type: (np.ndarray, np.ndarray, float) -> np.ndarray
        ones = np.ones_like(np.asarray(x, dtype=float))
        if self.kind == 'zero':
            return 0.0 * ones
        if self.kind == 'constant':
            return self.value * ones
        if self.kind == 'sinusoidal':
            return self.value * np.sin(
                2.0 * np.pi * self.frequency * t) * ones
        if self.kind == 'ramp':
            return self.value * t * ones
        raise ValueError('Unrecognized flux kind "{}"'.format(self.kind))


@dataclass(frozen=True)
class BodyForceSpec(object):
    """The body force F.

    zero:     F = 0
    constant: F = (fx, fy)
    ramp:     F = (fx, fy) * t
    bump:     F = (fx, fy) * t * exp(-|x - center|^2 / (2 width^2))

    """

    kind: str = 'zero'
    fx: float = 0.0
    fy: float = 0.0
    width: float = 0.1
    center_x: float = 0.5
    center_y: float = 0.5

    def __call__(self, x, y, t):
        # type: (np.ndarray, np.ndarray, float) -> np.ndarray
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == 'zero':
            amplitude = 0.0 * x
        elif self.kind == 'constant':
            amplitude = np.ones_like(x)
        elif self.kind == 'ramp':
            amplitude = t * np.ones_like(x)
        elif self.kind == 'bump':
            squared = (x - self.center_x) ** 2 + (y - self.center_y) ** 2
            amplitude = t * np.exp(-squared / (2.0 * self.width ** 2))
        else:
            raise ValueError(
                'Unrecognized force kind "{}"'.format(self.kind)
            )
        return np.stack([self.fx * amplitude, self.fy * amplitude], axis=-1)


@dataclass(frozen=True)
class InitialTemperatureSpec(object):
    """The initial temperature.

    constant: theta0 = value
    bump:     theta0 = value + amplitude * exp(-|x - center|^2 / (2 width^2))

    """

    kind: str = 'constant'
    value: float = 0.0
    amplitude: float = 0.0
    width: float = 0.1
    center_x: float = 0.5
    center_y: float = 0.5

    def __call__(self, x, y):
        # type: (np.ndarray, np.ndarray) -> np.ndarray
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == 'constant':
            return self.value * np.ones_like(x)
        if self.kind == 'bump':
            squared = (x - self.center_x) ** 2 + (y - self.center_y) ** 2
            return self.value + self.amplitude * np.exp(
                -squared / (2.0 * self.width ** 2))
        raise ValueError(
            'Unrecognized temperature kind "{}"'.format(self.kind)
        )


# Key overrides applied before the explicit keys of a configuration.
SCENARIOS = {
    # A body force ramped in time drives |PT| through k near the
    # clamped walls.
    'shear_ramp': {
        'grid.nx': 32,
        'grid.ny': 32,
        'flow.lambda': 0.05,
        'time.T_end': 0.5,
        'time.dt': 5e-3,
        'loads.kind': 'ramp',
        'loads.fx': 40.0,
        'loads.fy': 0.0,
    },
    # A hot spot relaxes; thermal stress is the only load.
    'thermal_bump': {
        'grid.nx': 32,
        'grid.ny': 32,
        'flow.lambda': 0.05,
        'time.T_end': 0.2,
        'time.dt': 5e-3,
        'thermal.theta0_kind': 'bump',
        'thermal.theta0_value': 0.0,
        'thermal.theta0_amplitude': 4.0,
        'thermal.theta0_width': 0.1,
    },
    # Same loading path as shear_ramp, far below yield.
    'elastic_only': {
        'grid.nx': 16,
        'grid.ny': 16,
        'flow.lambda': 0.05,
        'time.T_end': 0.5,
        'time.dt': 5e-3,
        'loads.kind': 'ramp',
        'loads.fx': 2.0,
        'loads.fy': 0.0,
    },
}  # type: Dict[str, Dict[str, Any]]
