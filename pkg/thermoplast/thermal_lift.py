"""The boundary-lift heat problem.

The temperature is split into a part carrying the Neumann data
and a homogenized remainder.  The lift solves

    theta_t - Laplace theta = 0,  d theta / dn = g,  theta(0) = 0,

and is precomputed over the whole horizon on the time grid of the
coupled loop, so the coupled solver only ever sees homogeneous
Neumann conditions.

"""
from dataclasses import dataclass
from typing import (  # noqa: F401
    Callable,
    Optional,
)

import numpy as np

from .config import get_logger
from .errors import InvalidValueError
from .grid_fem import (
    Grid,
    assemble_boundary_mass,
    assemble_laplacian_neumann,
    assemble_mass,
    solve_spd,
)


logger = get_logger()


def step_count(T_end, dt, key='time.dt'):
    # type: (float, float, str) -> int
    """The number of steps of size dt covering [0, T_end].

    Raises:
        InvalidValueError: If dt does not divide T_end within
            rounding, or T_end < dt.

    Returns:
        The number of steps, at least one.

    """
    if not (dt > 0 and T_end >= dt * (1.0 - 1e-12)):
        raise InvalidValueError(key, dt, 'a step 0 < dt <= T_end')
    count = int(round(T_end / dt))
    if abs(count * dt - T_end) > 1e-9 * T_end:
        raise InvalidValueError(
            key, dt, 'a step dividing T_end = {!r}'.format(T_end),
        )
    return count


class NeumannData(object):
    """Boundary values of g sampled at the nodes, at times n * dt.

    Interior nodes carry zeros; only the boundary trace enters the
    load, through the boundary mass matrix.

    """

    def __init__(self, grid, samples, dt):
        # type: (Grid, np.ndarray, float) -> None
        samples = np.array(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != grid.n_nodes:
            raise InvalidValueError(
                'thermal.g', samples.shape,
                'samples of shape (n_samples, {})'.format(grid.n_nodes),
            )
        if samples.shape[0] < 2:
            raise InvalidValueError(
                'thermal.g', samples.shape[0], 'at least 2 samples',
            )
        if not np.all(np.isfinite(samples)):
            raise InvalidValueError('thermal.g', 'nan', 'finite values')
        if not dt > 0:
            raise InvalidValueError('thermal.g', dt, 'a sample interval > 0')
        samples[:, ~grid.boundary_mask] = 0.0
        self.grid = grid
        self.samples = samples
        self.dt = dt

    @classmethod
    def from_function(cls, grid, function, T_end, dt):
        # type: (Grid, Callable[[np.ndarray, np.ndarray, float], np.ndarray], float, float) -> NeumannData  # noqa: E501
        """Sample g(x, y, t) on the boundary nodes at t = 0, dt, ..., T_end.

        Args:
            grid: The grid.
            function: The boundary datum, vectorized in x and y.
                Any of the `scenarios.BoundaryFluxSpec` kinds will do.
            T_end: The final time.
            dt: The sample interval.

        Returns:
            The sampled data.

        """
        count = step_count(T_end, dt)
        x, y = grid.node_coordinates[:, 0], grid.node_coordinates[:, 1]
        samples = np.stack([
            np.asarray(function(x, y, n * dt), dtype=float)
            * np.ones_like(x)
            for n in range(count + 1)
        ])
        return cls(grid, samples, dt)

    @property
    def n_samples(self):
        # type: () -> int
        return self.samples.shape[0]

    @property
    def is_zero(self):
        # type: () -> bool
        return not np.any(self.samples)

    def __add__(self, other):
        # type: (NeumannData) -> NeumannData
        if other.grid != self.grid or other.samples.shape \
                != self.samples.shape or other.dt != self.dt:
            raise InvalidValueError(
                'thermal.g', other.samples.shape, 'matching samples',
            )
        return NeumannData(self.grid, self.samples + other.samples, self.dt)

    def scaled(self, factor):
        # type: (float) -> NeumannData
        return NeumannData(self.grid, factor * self.samples, self.dt)


def solve_tilde_theta(grid, g, T_end, dt, tol=1e-12, jacobi=False):
    # type: (Grid, NeumannData, float, float, float, bool) -> np.ndarray
    """Integrate the lift problem by implicit Euler.

    Each step solves

        M (theta^{n+1} - theta^n) / dt + K theta^{n+1} = B g^{n+1}

    with M the mass matrix, K the Neumann stiffness matrix and B
    the boundary mass matrix.

    Args:
        grid: The grid.
        g: The boundary data, sampled at the step interval dt.
        T_end: The final time.
        dt: The time step.
        tol: The relative residual of each solve.
        jacobi: Whether to use a diagonal preconditioner.

    Raises:
        InvalidValueError: If g is sampled on another time grid or
            does not reach T_end.
        ConvergenceError: If an inner solve fails.

    Returns:
        The nodal trajectory, shape (n_steps + 1, n_nodes).  The
        first row is exactly zero.

    """
    count = step_count(T_end, dt)
    if abs(g.dt - dt) > 1e-12 * dt:
        raise InvalidValueError('thermal.g', g.dt, 'samples every dt')
    if g.n_samples < count + 1:
        raise InvalidValueError(
            'thermal.g', g.n_samples, 'at least {} samples'.format(count + 1),
        )
    trajectory = np.zeros((count + 1, grid.n_nodes))
    if g.is_zero:
        return trajectory
    mass = assemble_mass(grid)
    operator = mass.combine(1.0 / dt, assemble_laplacian_neumann(grid), 1.0)
    boundary = assemble_boundary_mass(grid)
    for n in range(count):
        rhs = mass.apply(trajectory[n]) / dt + boundary @ g.samples[n + 1]
        trajectory[n + 1] = solve_spd(
            operator, rhs, tol=tol, jacobi=jacobi,
            context='boundary lift, step {}'.format(n + 1),
        )
    logger.debug('boundary lift: %d steps, max |theta| %.3e',
                 count, float(np.abs(trajectory).max()))
    return trajectory


@dataclass(frozen=True)
class LiftEstimate(object):
    """Discrete norms of the lift estimate.

    rate_norm:  the L2(0,T; L2) norm of the time derivative
    h1_norm:    the max over steps of the H1 norm
    data_norm:  the H1(0,T; L2(boundary)) norm of g

    """

    rate_norm: float
    h1_norm: float
    data_norm: float

    @property
    def ratio(self):
        # type: () -> float
        if self.data_norm == 0.0:
            return 0.0
        return (self.rate_norm + self.h1_norm) / self.data_norm


def lift_estimate_report(grid, trajectory, g):
    # type: (Grid, np.ndarray, NeumannData) -> LiftEstimate
    """Measure both sides of the lift stability estimate.

    Args:
        grid: The grid of the trajectory.
        trajectory: The output of `solve_tilde_theta`.
        g: The data it was computed from.

    Returns:
        The discrete norms.  No constant is claimed; the ratio is
        only monitored.

    """
    mass = assemble_mass(grid)
    laplacian = assemble_laplacian_neumann(grid)
    boundary = assemble_boundary_mass(grid)
    dt = g.dt
    count = trajectory.shape[0] - 1

    rate = np.diff(trajectory, axis=0) / dt
    rate_squared = sum(mass.quadratic_form(r) for r in rate)
    h1_squared = max(
        mass.quadratic_form(theta) + laplacian.quadratic_form(theta)
        for theta in trajectory
    )

    samples = g.samples[:count + 1]
    data_rate = np.diff(samples, axis=0) / dt
    data_squared = sum(
        float(s @ (boundary @ s)) for s in samples[1:]
    ) * dt + sum(
        float(r @ (boundary @ r)) for r in data_rate
    ) * dt
    return LiftEstimate(
        rate_norm=float(np.sqrt(rate_squared * dt)),
        h1_norm=float(np.sqrt(h1_squared)),
        data_norm=float(np.sqrt(data_squared)),
    )
