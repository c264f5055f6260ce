"""Manufactured-solution convergence studies.

Each study solves a problem with a known smooth solution on a
sequence of grids and reports the L2 errors and the observed orders
between consecutive grids.

"""
from dataclasses import dataclass
from typing import (  # noqa: F401
    Callable,
    List,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np

from .config import get_logger
from .diagnostics import (
    RENORMALIZATION_LEVELS,
    PolynomialCutoff,
    RenormalizationFunction,
    renorm_residual,
)
from .grid_fem import (
    Grid,
    assemble_elasticity,
    assemble_laplacian_neumann,
    assemble_mass,
    body_force_load,
    scalar_source_load,
    solve_spd,
    strain,
)
from .tensors import ElasticityTensor


logger = get_logger()

ORDER_THRESHOLD = 1.8

SIZES = (16, 32, 64)


@dataclass(frozen=True)
class Study(object):
    """Errors of one manufactured solution on successively finer grids."""

    name: str
    sizes: Tuple[int, ...]
    errors: Tuple[float, ...]
    threshold: float = ORDER_THRESHOLD
    # When set, the study checks the errors themselves instead of orders.
    tolerance: Optional[float] = None

    @property
    def orders(self):
        # type: () -> List[float]
        if self.tolerance is not None:
            return []
        return [
            float(np.log(coarse / fine) / np.log(fine_n / coarse_n))
            for (coarse, fine), (coarse_n, fine_n) in zip(
                zip(self.errors, self.errors[1:]),
                zip(self.sizes, self.sizes[1:]),
            )
        ]

    @property
    def passed(self):
        # type: () -> bool
        if self.tolerance is not None:
            return max(self.errors) <= self.tolerance
        return bool(self.orders) and min(self.orders) >= self.threshold

    def report(self):
        # type: () -> str
        lines = ['{}: {}'.format(self.name, 'PASS' if self.passed else 'FAIL')]
        for n, error in zip(self.sizes, self.errors):
            lines.append('  n = {:<4d} error = {:.6e}'.format(n, error))
        for order in self.orders:
            lines.append('  order = {:.3f}'.format(order))
        return '\n'.join(lines)


def _l2_error(grid, values, exact):
    # type: (Grid, np.ndarray, np.ndarray) -> float
    difference = np.asarray(values) - exact
    if difference.ndim > 1:
        difference = np.sum(difference * difference, axis=-1)
    else:
        difference = difference * difference
    return float(np.sqrt(grid.integrate(difference)))


def elasticity_error(n, D=None):
    # type: (int, ElasticityTensor) -> float
    """Solve for u = (sin pi x sin pi y, 0) with clamped edges.

    Returns:
        The L2 error of the displacement.

    """
    D = D or ElasticityTensor(1.0, 1.0)
    mu, lam = D.lame_second, D.lame_first
    grid = Grid(n, n)
    x, y = grid.quad_points[:, 0], grid.quad_points[:, 1]
    sx, sy = np.sin(np.pi * x), np.sin(np.pi * y)
    cx, cy = np.cos(np.pi * x), np.cos(np.pi * y)
    force = np.stack([
        (3.0 * mu + lam) * np.pi ** 2 * sx * sy,
        -(mu + lam) * np.pi ** 2 * cx * cy,
    ], axis=-1)
    u = solve_spd(
        assemble_elasticity(grid, D), body_force_load(grid, force),
        tol=1e-12, context='elasticity mms',
    )
    exact = np.stack([sx * sy, np.zeros_like(x)], axis=-1)
    return _l2_error(grid, grid.interpolate_vector(u), exact)


def neumann_error(n):
    # type: (int) -> float
    """Solve -Laplace w = 2 pi^2 w for w = cos pi x cos pi y, mean zero."""
    grid = Grid(n, n)
    exact = grid.at_quadrature(
        lambda x, y: np.cos(np.pi * x) * np.cos(np.pi * y)
    )
    rhs = scalar_source_load(grid, 2.0 * np.pi ** 2 * exact)
    rhs -= rhs.mean()
    w = solve_spd(
        assemble_laplacian_neumann(grid), rhs, tol=1e-12,
        context='neumann mms',
    )
    w -= float(np.sum(assemble_mass(grid).apply(w))) / grid.area
    return _l2_error(grid, grid.interpolate(w), exact)


def _heat_solution(n, T_end, dt, amplitude=1.0):
    # type: (int, float, float, float) -> Tuple[Grid, np.ndarray, np.ndarray, Callable]  # noqa: E501
    """Integrate w_t - Laplace w = s for w = A e^-t cos pi x cos pi y."""
    grid = Grid(n, n)

    def exact(t):
        return grid.at_quadrature(
            lambda x, y: amplitude * np.exp(-t)
            * np.cos(np.pi * x) * np.cos(np.pi * y)
        )

    mass = assemble_mass(grid)
    operator = mass.combine(1.0 / dt, assemble_laplacian_neumann(grid), 1.0)
    steps = int(round(T_end / dt))
    history = [grid.nodal(
        lambda x, y: amplitude * np.cos(np.pi * x) * np.cos(np.pi * y)
    )]
    sources = [np.zeros(grid.n_quad)]
    for step in range(1, steps + 1):
        source = (2.0 * np.pi ** 2 - 1.0) * exact(step * dt)
        rhs = mass.apply(history[-1]) / dt + scalar_source_load(grid, source)
        history.append(solve_spd(
            operator, rhs, tol=1e-12, x0=history[-1], context='heat mms',
        ))
        sources.append(source)
    return grid, np.array(history), np.array(sources), exact


def heat_error(n, T_end=0.0625):
    # type: (int, float) -> float
    """Implicit Euler with dt = h^2 / 2, so both errors are O(h^2)."""
    dt = 0.5 / n ** 2
    grid, history, _, exact = _heat_solution(n, T_end, dt)
    return _l2_error(grid, grid.interpolate(history[-1]), exact(T_end))


def linear_reproduction_error(n):
    # type: (int) -> float
    """The largest strain error of an interpolated affine displacement."""
    grid = Grid(n, n)
    ux = grid.nodal(lambda x, y: 0.1 + 0.3 * x - 0.2 * y)
    uy = grid.nodal(lambda x, y: -0.4 + 0.5 * x + 0.7 * y)
    u = np.stack([ux, uy], axis=-1).ravel()
    expected = np.array([0.3, 0.7, 0.0, 0.5 * (-0.2 + 0.5), 0.0, 0.0])
    return float(np.abs(strain(grid, u) - expected).max())


def heat_renorm_studies(levels=RENORMALIZATION_LEVELS, sizes=(8, 16, 32),
                        T_end=0.25, amplitude=3.0):
    # type: (Sequence[float], Sequence[int], float, float) -> List[Study]
    """Renormalized residuals of the manufactured cosine heat solution.

    The solution is A e^-t cos(pi x) cos(pi y), solved without the
    mechanics.

    h and dt are halved together (dt = h / 8).

    Returns:
        One study per renormalization level, with threshold one.

    """
    residuals = {level: [] for level in levels}  # type: dict
    for n in sizes:
        dt = 1.0 / (8.0 * n)
        grid, history, sources, _ = _heat_solution(
            n, T_end, dt, amplitude=amplitude,
        )
        lift = np.zeros_like(history)
        phi = PolynomialCutoff(T_end)
        for level in levels:
            residual = renorm_residual(
                grid, history, lift, sources, dt,
                RenormalizationFunction(level), phi,
            )
            residuals[level].append(residual.relative)
    return [
        Study('heat renormalized M={:g}'.format(level), tuple(sizes),
              tuple(residuals[level]), threshold=1.0)
        for level in levels
    ]


def _study(name, function, sizes):
    # type: (str, Callable[[int], float], Sequence[int]) -> Study
    errors = []
    for n in sizes:
        errors.append(function(n))
        logger.info('%s: n = %d, error %.6e', name, n, errors[-1])
    return Study(name, tuple(sizes), tuple(errors))


def run_studies(sizes=SIZES):
    # type: (Sequence[int]) -> List[Study]
    studies = [
        _study('elasticity', elasticity_error, sizes),
        _study('neumann', neumann_error, sizes),
        _study('heat', heat_error, sizes),
    ]
    studies.append(Study(
        'linear_reproduction',
        tuple(sizes),
        tuple(linear_reproduction_error(n) for n in sizes),
        tolerance=1e-12,
    ))
    studies.extend(heat_renorm_studies())
    return studies
