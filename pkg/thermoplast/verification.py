"""Sampling-based invariant suites, run by `thermoplast verify`.

Each suite draws its samples from a generator seeded by the caller,
so a failure is reproducible from the seed alone.

"""
from dataclasses import dataclass
from typing import (  # noqa: F401
    Callable,
    List,
)

import numpy as np
from scipy.optimize import minimize

from . import convex_plasticity
from . import mms
from .config import get_logger
from .convex_plasticity import (
    YieldSurface,
    YosidaParam,
)
from .coupled_solver import ThermalStressFunction
from .grid_fem import (
    Grid,
    assemble_boundary_mass,
    assemble_elasticity,
    assemble_laplacian_neumann,
    assemble_mass,
    divergence_scalar_weighted_load,
    strain,
)
from .tensors import (
    METRIC,
    ElasticityTensor,
    apply_D,
    deviator,
    inner,
    norm,
    trace,
)


logger = get_logger()

SAMPLES = 10 ** 4

ORACLE_SAMPLES = 100


@dataclass(frozen=True)
class SuiteResult(object):
    name: str
    passed: bool
    detail: str = ''

    def __str__(self):
        return '{:<22} {}  {}'.format(
            self.name, 'PASS' if self.passed else 'FAIL', self.detail,
        ).rstrip()


def _random_tensors(rng, count, k=1.0):
    # type: (np.random.Generator, int, float) -> np.ndarray
    return rng.uniform(-3.0 * k, 3.0 * k, size=(count, 6))


def yosida_identity(rng):
    # type: (np.random.Generator) -> SuiteResult
    """Y_lambda(T) = (T - P_K T) / (2 lambda)."""
    ys, yp = YieldSurface(1.0), YosidaParam(0.5)
    T = _random_tensors(rng, SAMPLES)
    expected = (T - convex_plasticity.project_K(T, ys)) / (2.0 * yp.lam)
    error = float(np.abs(convex_plasticity.yosida(T, ys, yp) - expected).max())
    return SuiteResult('yosida_identity', error <= 1e-12,
                       'max error {:.3e}'.format(error))


def yosida_monotone(rng):
    # type: (np.random.Generator) -> SuiteResult
    ys, yp = YieldSurface(1.0), YosidaParam(0.5)
    A = _random_tensors(rng, SAMPLES)
    B = _random_tensors(rng, SAMPLES)
    pairing = inner(
        convex_plasticity.yosida(A, ys, yp)
        - convex_plasticity.yosida(B, ys, yp),
        A - B,
    )
    worst = float(pairing.min())
    return SuiteResult('yosida_monotone', worst >= -1e-12,
                       'min pairing {:.3e}'.format(worst))


def yosida_lipschitz(rng):
    # type: (np.random.Generator) -> SuiteResult
    ys, yp = YieldSurface(1.0), YosidaParam(0.5)
    A = _random_tensors(rng, SAMPLES)
    B = _random_tensors(rng, SAMPLES)
    change = norm(
        convex_plasticity.yosida(A, ys, yp)
        - convex_plasticity.yosida(B, ys, yp)
    )
    ratio = float(np.max(change / norm(A - B)))
    bound = (1.0 + 1e-10) / (2.0 * yp.lam)
    return SuiteResult('yosida_lipschitz', ratio <= bound,
                       'max ratio {:.6f}, bound {:.6f}'.format(ratio, bound))


def yosida_traceless(rng):
    # type: (np.random.Generator) -> SuiteResult
    ys, yp = YieldSurface(1.0), YosidaParam(0.5)
    T = _random_tensors(rng, SAMPLES)
    worst = float(np.abs(trace(convex_plasticity.yosida(T, ys, yp))).max())
    return SuiteResult('yosida_traceless', worst <= 1e-14,
                       'max |tr| {:.3e}'.format(worst))


def nearest_point(T, k):
    # type: (np.ndarray, float) -> np.ndarray
    """The nearest point of K by constrained minimization.

    Starts from the spherical part of T, the center of K on its
    fiber, so the answer does not depend on the radial return.

    """
    start = T - deviator(T)

    def distance(S):
        return float(np.sum(METRIC * (S - T) ** 2))

    def distance_gradient(S):
        return 2.0 * METRIC * (S - T)

    def slack(S):
        return k * k - float(inner(deviator(S), deviator(S)))

    def slack_gradient(S):
        return -2.0 * METRIC * deviator(S)

    result = minimize(
        distance,
        start,
        jac=distance_gradient,
        method='SLSQP',
        constraints=[{'type': 'ineq', 'fun': slack, 'jac': slack_gradient}],
        options={'ftol': 1e-15, 'maxiter': 500},
    )
    return result.x


def projection_oracle(rng):
    # type: (np.random.Generator) -> SuiteResult
    ys = YieldSurface(1.0)
    T = _random_tensors(rng, ORACLE_SAMPLES)
    projected = convex_plasticity.project_K(T, ys)
    worst = max(
        float(norm(projected[i] - nearest_point(T[i], ys.k)))
        for i in range(ORACLE_SAMPLES)
    )
    return SuiteResult('projection_oracle', worst <= 1e-6,
                       'max distance {:.3e}'.format(worst))


def truncation(rng):
    # type: (np.random.Generator) -> SuiteResult
    K = 2.0
    r = rng.uniform(-10.0, 10.0, size=SAMPLES)
    clipped = convex_plasticity.truncate(r, K)
    step = 1e-6
    slope = (
        convex_plasticity.phi(r + step, K) - convex_plasticity.phi(r - step, K)
    ) / (2.0 * step)
    checks = [
        bool(np.all(np.abs(clipped) <= K)),
        bool(np.all(convex_plasticity.truncate(-r, K) == -clipped)),
        bool(np.all(convex_plasticity.phi(r, K) >= 0.0)),
        bool(np.abs(slope - clipped).max() <= 1e-6),
        bool(np.all(convex_plasticity.truncate(clipped, K) == clipped)),
    ]
    return SuiteResult('truncation', all(checks),
                       '{}/{} properties'.format(sum(checks), len(checks)))


def assembly_oracles(rng):
    # type: (np.random.Generator) -> SuiteResult
    """Compare assembled operators with quadrature of the same forms."""
    grid = Grid(6, 6)
    D = ElasticityTensor(0.7, 1.3)
    elasticity = assemble_elasticity(grid, D)
    u = elasticity.constrain(rng.standard_normal(grid.n_dofs))
    eps = strain(grid, u)
    energy = grid.integrate(inner(apply_D(D, eps), eps))
    ones = np.ones(grid.n_nodes)
    interior = ~grid.dirichlet_mask
    constant_load = divergence_scalar_weighted_load(
        grid, np.full(grid.n_quad, 2.5),
    )
    boundary = assemble_boundary_mass(grid)
    errors = {
        'energy': abs(elasticity.quadratic_form(u) - energy)
        / max(1.0, energy),
        'symmetry': elasticity.asymmetry(),
        'mass': abs(assemble_mass(grid).quadratic_form(ones) - grid.area),
        'neumann': float(np.abs(
            assemble_laplacian_neumann(grid).apply(ones)).max()),
        'boundary': abs(float(ones @ (boundary @ ones))
                        - grid.boundary_length),
        'divergence': float(np.abs(constant_load[interior]).max()),
    }
    worst = max(errors, key=lambda name: errors[name])
    return SuiteResult(
        'assembly_oracles', errors[worst] <= 1e-10,
        'largest error {:.3e} ({})'.format(errors[worst], worst),
    )


def growth_conditions(rng):
    # type: (np.random.Generator) -> SuiteResult
    f = ThermalStressFunction()
    r = rng.uniform(-1e3, 1e3, size=SAMPLES)
    values = np.abs(f(r))
    growth = bool(np.all(values <= f.a + f.M * np.abs(r) ** f.alpha + 1e-12))
    negative = r <= 0
    bound = f.C_neg * np.sqrt(1.0 + np.abs(r[negative]))
    branch = bool(np.all(values[negative] <= bound + 1e-12))
    return SuiteResult('growth_conditions', growth and branch and f(0.0) == 0)


def manufactured_solutions(rng):
    # type: (np.random.Generator) -> SuiteResult
    """Coarse versions of the studies of `thermoplast mms`."""
    sizes = (8, 16, 32)
    studies = [
        mms.Study('elasticity', sizes,
                  tuple(mms.elasticity_error(n) for n in sizes)),
        mms.Study('heat', sizes, tuple(mms.heat_error(n) for n in sizes)),
    ]
    linear = max(mms.linear_reproduction_error(n) for n in sizes)
    passed = all(study.passed for study in studies) and linear <= 1e-12
    detail = ', '.join(
        '{} {:.2f}'.format(study.name, min(study.orders)) for study in studies
    )
    return SuiteResult('manufactured_solutions', passed, detail)


SUITES = (
    yosida_identity,
    yosida_monotone,
    yosida_lipschitz,
    yosida_traceless,
    projection_oracle,
    truncation,
    assembly_oracles,
    growth_conditions,
    manufactured_solutions,
)  # type: tuple


def run_suites(seed=0, suites=SUITES):
    # type: (int, tuple) -> List[SuiteResult]
    """Run every suite with its own generator derived from the seed."""
    results = []
    for index, suite in enumerate(suites):
        rng = np.random.default_rng([seed, index])
        results.append(suite(rng))
        logger.info('%s', results[-1])
    return results
