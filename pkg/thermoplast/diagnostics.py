"""Functionals of trajectories which the a priori estimates bound.

Every function here is a pure function of a trajectory: a list of
`coupled_solver.State` (or anything with the same attributes), or
arrays of nodal temperatures.  Time integrals use the right-endpoint
rule, matching the implicit Euler steps that produced the data.

"""
from dataclasses import (
    dataclass,
    field,
)
from typing import (  # noqa: F401
    Any,
    Dict,
    List,
    Sequence,
    Tuple,
)

import numpy as np

from .convex_plasticity import (
    YieldSurface,
    YosidaParam,
    truncate,
    yosida_energy,
)
from .errors import (
    GridMismatchError,
    ParameterRangeError,
)
from .grid_fem import (
    Grid,
    strain,
)
from .tensors import (
    ElasticityTensor,
    apply_D_inv,
    inner,
    trace,
)


BOCCARDO_Q = 1.2

# The half-widths of the built-in renormalization functions.
RENORMALIZATION_LEVELS = (1.0, 2.0, 5.0, 10.0)

TAIL_LEVELS = (1.0, 2.0, 5.0, 10.0)


def _ratio(numerator, denominator):
    # type: (float, float) -> float
    if denominator == 0.0:
        return 0.0
    return numerator / denominator


def _steps(history):
    """Yield (previous, current, dt) for consecutive states."""
    for previous, current in zip(history, history[1:]):
        yield previous, current, current.t - previous.t


@dataclass(frozen=True)
class EnergyRow(object):
    step: int
    t: float
    stress_energy: float
    viscous_work: float
    theta_mass: float
    trunc_gradient: float


def energy_report(grid, history, K):
    # type: (Grid, Sequence[Any], float) -> List[EnergyRow]
    """The four quantities of the uniform energy estimate, per state.

    stress_energy   the integral of |T|^2
    viscous_work    the time integral of the integral of |eps(u_t)|^2
    theta_mass      the integral of |theta|
    trunc_gradient  the time integral of the integral of |grad T_K(theta)|^2

    The gradient of T_K(theta) is the gradient of theta on the set
    |theta| < K and zero elsewhere.

    Args:
        grid: The grid of the trajectory.
        history: The states, in time order.
        K: The truncation height.

    Returns:
        One row per state.  The accumulated columns start at zero.

    """
    rows = []  # type: List[EnergyRow]
    viscous = 0.0
    gradient = 0.0
    for index, state in enumerate(history):
        theta = grid.interpolate(state.theta)
        if index > 0:
            dt = state.t - history[index - 1].t
            rate = strain(grid, state.u - history[index - 1].u)
            viscous += grid.integrate(inner(rate, rate)) / dt
            grad = grid.gradient(state.theta)
            mask = np.abs(theta) < K
            gradient += dt * grid.integrate(
                mask * np.sum(grad * grad, axis=-1),
            )
        rows.append(EnergyRow(
            step=state.step,
            t=state.t,
            stress_energy=grid.integrate(inner(state.stress, state.stress)),
            viscous_work=viscous,
            theta_mass=grid.integrate(np.abs(theta)),
            trunc_gradient=gradient,
        ))
    return rows


@dataclass(frozen=True)
class BalanceRow(object):
    step: int
    t: float
    lhs: float
    rhs: float

    @property
    def residual(self):
        # type: () -> float
        return abs(self.lhs - self.rhs)

    @property
    def relative(self):
        # type: () -> float
        return _ratio(self.residual, max(abs(self.lhs), abs(self.rhs)))


def m_lambda_balance(grid, history, D, ys, yp):
    # type: (Grid, Sequence[Any], ElasticityTensor, YieldSurface, YosidaParam) -> List[BalanceRow]  # noqa: E501
    """Both sides of the energy identity for the Yosida potential.

        int M_lambda(T(t)) + int_0^t int D^-1 T_t : T_t
            = int_0^t int eps(u_t) : T_t

    with time derivatives replaced by difference quotients.  The
    initial stress must be admissible, so that M_lambda(T(0)) = 0.
    The discrete right-hand side exceeds the left by a nonnegative
    O(dt) amount, by convexity of M_lambda.

    Args:
        grid: The grid of the trajectory.
        history: The states, in time order.
        D: The elasticity tensor.
        ys: The yield surface.
        yp: The regularization parameter.

    Returns:
        One row per state.

    """
    elastic = 0.0
    work = 0.0
    first = history[0]
    rows = [BalanceRow(
        first.step, first.t,
        grid.integrate(yosida_energy(first.stress, ys, yp)), 0.0,
    )]
    for previous, state, dt in _steps(history):
        stress_change = state.stress - previous.stress
        strain_change = strain(grid, state.u - previous.u)
        elastic += grid.integrate(
            inner(apply_D_inv(D, stress_change), stress_change),
        ) / dt
        work += grid.integrate(inner(strain_change, stress_change)) / dt
        potential = grid.integrate(yosida_energy(state.stress, ys, yp))
        rows.append(BalanceRow(state.step, state.t, potential + elastic, work))
    return rows


def stress_rate_series(grid, history):
    # type: (Grid, Sequence[Any]) -> np.ndarray
    """The L2(0, t; L2) norm of the stress rate, for every t in the history."""
    accumulated = [0.0]
    for previous, state, dt in _steps(history):
        change = state.stress - previous.stress
        accumulated.append(
            accumulated[-1] + grid.integrate(inner(change, change)) / dt,
        )
    return np.sqrt(np.array(accumulated))


def stress_rate_norm(grid, history):
    # type: (Grid, Sequence[Any]) -> float
    """The discrete L2(0, T; L2) norm of the stress rate.

    Raises:
        ParameterRangeError: With fewer than two states.

    """
    if len(history) < 2:
        raise ParameterRangeError(
            'history', len(history), 'at least two states',
        )
    return float(stress_rate_series(grid, history)[-1])


def boccardo_norm(grid, theta_history, dt, q=BOCCARDO_Q, normalize=False):
    # type: (Grid, np.ndarray, float, float, bool) -> float
    """The discrete L^q(0, T; W^{1,q}) norm of a temperature history.

    Args:
        grid: The grid.
        theta_history: Nodal temperatures, one row per time level,
            starting at t = 0.
        dt: The time step.
        q: The exponent, 1 <= q < 5/4.
        normalize: Divide the integral by twice the measure of the
            space-time cylinder, which makes the result a power mean
            and so nondecreasing in q.

    Raises:
        ParameterRangeError: If q is out of range.

    Returns:
        (int_0^T int |theta|^q + |grad theta|^q)^(1/q).

    """
    if not 1.0 <= q < 1.25:
        raise ParameterRangeError('q', q, 'a value in [1, 5/4)')
    theta_history = np.asarray(theta_history, dtype=float)
    total = 0.0
    for theta in theta_history[1:]:
        grad = grid.gradient(theta)
        total += dt * grid.integrate(
            np.abs(grid.interpolate(theta)) ** q
            + np.sqrt(np.sum(grad * grad, axis=-1)) ** q
        )
    if normalize:
        duration = dt * (theta_history.shape[0] - 1)
        total /= 2.0 * grid.area * duration
    return float(total ** (1.0 / q))


def cauchy_metric(grid, T_a, T_b, D):
    # type: (Grid, np.ndarray, np.ndarray, ElasticityTensor) -> float
    """The integral of D^-1 (T_a - T_b) : (T_a - T_b).

    Raises:
        GridMismatchError: If the fields do not both live at the
            quadrature points of the grid.

    """
    T_a = np.asarray(T_a, dtype=float)
    T_b = np.asarray(T_b, dtype=float)
    expected = (grid.n_quad, 6)
    if T_a.shape != expected or T_b.shape != expected:
        raise GridMismatchError(T_a.shape, T_b.shape)
    difference = T_a - T_b
    return grid.integrate(inner(apply_D_inv(D, difference), difference))


@dataclass(frozen=True)
class RenormalizationFunction(object):
    """An odd function S with S' a smooth bump supported on [-M, M].

    S'(r) = 1 for |r| <= M/2, then falls to zero along the cubic
    1 - 3x^2 + 2x^3 (x = 2|r|/M - 1) and vanishes for |r| >= M.
    `shift` adds a constant to S.

    """

    M: float
    shift: float = 0.0

    def _scaled(self, r):
        s = np.abs(np.asarray(r, dtype=float)) / self.M
        x = np.clip(2.0 * s - 1.0, 0.0, 1.0)
        return s, x

    def __call__(self, r):
        # type: (np.ndarray) -> np.ndarray
        s, x = self._scaled(r)
        primitive = np.where(
            s <= 0.5,
            s,
            0.5 + 0.5 * (x - x ** 3 + 0.5 * x ** 4),
        )
        return self.shift + np.sign(r) * self.M * primitive

    def derivative(self, r):
        # type: (np.ndarray) -> np.ndarray
        _, x = self._scaled(r)
        return 1.0 - 3.0 * x ** 2 + 2.0 * x ** 3

    def second_derivative(self, r):
        # type: (np.ndarray) -> np.ndarray
        _, x = self._scaled(r)
        return np.sign(r) * 12.0 * x * (x - 1.0) / self.M


@dataclass(frozen=True)
class PolynomialCutoff(object):
    """phi(x, y, t) = (1 + cx x + cy y^2) (1 - t / T)^2, zero at t = T."""

    T: float
    cx: float = 1.0
    cy: float = 1.0

    def __call__(self, x, y, t):
        return (1.0 + self.cx * x + self.cy * y * y) * (1.0 - t / self.T) ** 2

    def gradient(self, x, y, t):
        cutoff = (1.0 - t / self.T) ** 2
        return np.stack([
            self.cx * cutoff * np.ones_like(x),
            2.0 * self.cy * y * cutoff,
        ], axis=-1)


@dataclass(frozen=True)
class RenormResidual(object):
    """The terms of the renormalized weak identity and their mismatch."""

    time_derivative: float
    initial: float
    diffusion: float
    curvature: float
    source: float

    @property
    def absolute(self):
        # type: () -> float
        return abs(
            self.time_derivative + self.initial + self.diffusion
            + self.curvature - self.source
        )

    @property
    def relative(self):
        # type: () -> float
        largest = max(abs(self.time_derivative), abs(self.initial),
                      abs(self.diffusion), abs(self.curvature),
                      abs(self.source))
        return _ratio(self.absolute, largest)


def renorm_residual(grid, theta_history, theta_tilde_history, source_history,
                    dt, S, phi):
    # type: (Grid, np.ndarray, np.ndarray, np.ndarray, float, RenormalizationFunction, PolynomialCutoff) -> RenormResidual  # noqa: E501
    """Test the heat equation for w = theta - theta_tilde with S'(w) phi.

    The identity checked is

        - int int S(w) phi_t - int S(w(0)) phi(0)
        + int int S'(w) grad w . grad phi + int int S''(w) |grad w|^2 phi
        = int int source S'(w) phi

    with phi vanishing at the final time.  The time derivative of
    phi is paired with S(w) at the later time level, so that adding
    a constant to S changes the first two terms by opposite amounts.

    Args:
        grid: The grid.
        theta_history: Nodal temperatures, one row per time level.
        theta_tilde_history: The lift, same shape.
        source_history: Heat sources at the quadrature points, one
            row per time level; the first row is unused.
        dt: The time step.
        S: The renormalization function.
        phi: The test function.

    Returns:
        The five terms.

    """
    w_history = np.asarray(theta_history) - np.asarray(theta_tilde_history)
    x, y = grid.quad_points[:, 0], grid.quad_points[:, 1]
    time_derivative = 0.0
    diffusion = 0.0
    curvature = 0.0
    source = 0.0
    for n in range(w_history.shape[0] - 1):
        t_next = (n + 1) * dt
        w = grid.interpolate(w_history[n + 1])
        grad_w = grid.gradient(w_history[n + 1])
        phi_next = phi(x, y, t_next)
        phi_change = phi_next - phi(x, y, n * dt)
        time_derivative -= grid.integrate(S(w) * phi_change)
        slope = S.derivative(w)
        diffusion += dt * grid.integrate(
            slope * np.sum(grad_w * phi.gradient(x, y, t_next), axis=-1),
        )
        curvature += dt * grid.integrate(
            S.second_derivative(w) * np.sum(grad_w * grad_w, axis=-1)
            * phi_next,
        )
        source += dt * grid.integrate(
            np.asarray(source_history[n + 1]) * slope * phi_next,
        )
    initial = -grid.integrate(
        S(grid.interpolate(w_history[0])) * phi(x, y, 0.0),
    )
    return RenormResidual(
        time_derivative=time_derivative,
        initial=initial,
        diffusion=diffusion,
        curvature=curvature,
        source=source,
    )


def trunc_tail(grid, theta_history, dt, K_list, C):
    # type: (Grid, np.ndarray, float, Sequence[float], float) -> List[Tuple[float, float]]  # noqa: E501
    """The L2(0, T; H1) norms of T_{K+C}(theta) - T_K(theta).

    Args:
        grid: The grid.
        theta_history: Nodal temperatures, one row per time level.
        dt: The time step.
        K_list: Strictly ascending truncation heights.
        C: The width of the band, > 0.

    Raises:
        ParameterRangeError: If K_list is not ascending or C <= 0.

    Returns:
        Pairs of (K, norm).

    """
    K_list = [float(K) for K in K_list]
    if any(b <= a for a, b in zip(K_list, K_list[1:])):
        raise ParameterRangeError('K_list', K_list, 'an ascending list')
    if not C > 0:
        raise ParameterRangeError('C', C, 'a value > 0')
    values = [grid.interpolate(theta) for theta in theta_history[1:]]
    gradients = [
        np.sum(grid.gradient(theta) ** 2, axis=-1)
        for theta in theta_history[1:]
    ]
    table = []
    for K in K_list:
        total = 0.0
        for theta, gradient_squared in zip(values, gradients):
            gap = truncate(theta, K + C) - truncate(theta, K)
            band = (np.abs(theta) > K) & (np.abs(theta) < K + C)
            total += dt * grid.integrate(gap * gap + band * gradient_squared)
        table.append((K, float(np.sqrt(total))))
    return table


def energy_transfer_gap(grid, previous, state):
    # type: (Grid, Any, Any) -> float
    """Compare the dissipation delivered over a step with the heat gained.

    Meaningful when f = 0 and the dissipation is not truncated:
    then the gain of the integral of theta equals dt times the
    integral of the dissipation.

    Returns:
        The relative mismatch.

    """
    dt = state.t - previous.t
    gained = grid.integrate(
        grid.interpolate(state.theta) - grid.interpolate(previous.theta),
    )
    delivered = dt * grid.integrate(state.dissipation)
    return _ratio(abs(gained - delivered), max(abs(gained), abs(delivered)))


COLUMNS = (
    'step',
    't',
    'stress_energy',
    'viscous_work',
    'theta_mass',
    'trunc_gradient',
    'dissipation_min',
    'plastic_trace_max',
    'm_lambda_residual',
    'stress_rate_norm',
    'picard_iterations',
    'clipped_fraction',
)


@dataclass
class DiagnosticsReport(object):
    """Per-state diagnostics and the whole-run functionals."""

    rows: List[Dict[str, float]]
    boccardo_norm: float = 0.0
    renorm_residuals: Dict[float, float] = field(default_factory=dict)
    trunc_tail: List[Tuple[float, float]] = field(default_factory=list)
    lift_ratio: float = 0.0
    dissipation_tolerance: float = 1e-12
    balance_tolerance: float = 0.05

    def column(self, name):
        # type: (str) -> np.ndarray
        return np.array([row[name] for row in self.rows])

    def checks(self):
        # type: () -> List[Tuple[str, bool, str]]
        """The pass/fail checks of the summary, as (name, passed, detail)."""
        dissipation = float(self.column('dissipation_min').min())
        plastic_trace = float(self.column('plastic_trace_max').max())
        balance = float(self.column('m_lambda_residual').max())
        monotone = all(
            bool(np.all(np.diff(self.column(name)) >= 0.0))
            for name in ('viscous_work', 'trunc_gradient', 'stress_rate_norm')
        )
        finite = all(
            bool(np.all(np.isfinite(self.column(name)))) for name in COLUMNS
        )
        return [
            ('dissipation', dissipation >= -self.dissipation_tolerance,
             'min {:.3e}'.format(dissipation)),
            ('plastic_trace', plastic_trace <= 1e-12,
             'max {:.3e}'.format(plastic_trace)),
            ('m_lambda_balance', balance <= self.balance_tolerance,
             'max relative residual {:.3e}'.format(balance)),
            ('accumulated_monotone', monotone, ''),
            ('finite', finite, ''),
        ]

    @property
    def passed(self):
        # type: () -> bool
        return all(passed for _, passed, _ in self.checks())

    def summary(self):
        # type: () -> str
        lines = []
        for name, passed, detail in self.checks():
            lines.append('{:<22} {}  {}'.format(
                name, 'PASS' if passed else 'FAIL', detail,
            ).rstrip())
        lines.append('boccardo_norm          {!r}'.format(self.boccardo_norm))
        for level, value in sorted(self.renorm_residuals.items()):
            lines.append('renorm_residual M={:<4g} {!r}'.format(level, value))
        for K, value in self.trunc_tail:
            lines.append('trunc_tail K={:<9g} {!r}'.format(K, value))
        lines.append('lift_ratio             {!r}'.format(self.lift_ratio))
        return '\n'.join(lines) + '\n'


def build_report(result):
    # type: (Any) -> DiagnosticsReport
    """Compute every diagnostic of a finished simulation.

    Args:
        result: A `coupled_solver.SimulationResult`.

    Returns:
        The report.

    """
    cfg = result.cfg
    grid = result.grid
    history = result.trajectory
    dt = cfg.time.dt
    D = cfg.material.build()
    ys = YieldSurface(cfg.flow.k)
    yp = YosidaParam(cfg.flow.lam)

    energies = energy_report(grid, history, cfg.output.trunc_K)
    balance = m_lambda_balance(grid, history, D, ys, yp)
    rates = stress_rate_series(grid, history)
    rows = []
    for state, energy, row, rate in zip(history, energies, balance, rates):
        rows.append({
            'step': state.step,
            't': state.t,
            'stress_energy': energy.stress_energy,
            'viscous_work': energy.viscous_work,
            'theta_mass': energy.theta_mass,
            'trunc_gradient': energy.trunc_gradient,
            'dissipation_min': float(state.dissipation.min()),
            'plastic_trace_max': float(np.abs(trace(state.eps_p)).max()),
            'm_lambda_residual': row.relative,
            'stress_rate_norm': float(rate),
            'picard_iterations': state.picard_iterations,
            'clipped_fraction': state.clipped_fraction,
        })

    theta_history = np.array([state.theta for state in history])
    temperature = theta_history + result.theta_tilde[:len(history)]
    sources = np.array([state.source for state in history])
    phi = PolynomialCutoff(history[-1].t)
    renorm = {
        level: renorm_residual(
            grid, temperature, result.theta_tilde[:len(history)], sources,
            dt, RenormalizationFunction(level), phi,
        ).relative
        for level in RENORMALIZATION_LEVELS
    }
    return DiagnosticsReport(
        rows=rows,
        boccardo_norm=boccardo_norm(grid, theta_history, dt),
        renorm_residuals=renorm,
        trunc_tail=trunc_tail(
            grid, theta_history, dt, TAIL_LEVELS, cfg.output.tail_C,
        ),
        lift_ratio=result.lift.ratio if result.lift is not None else 0.0,
        balance_tolerance=cfg.output.balance_tol,
    )
