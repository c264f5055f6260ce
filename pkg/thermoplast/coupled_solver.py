"""One time step of the regularized, truncated thermo-plastic system.

A step is the fixed point of a map which, given a guess for the
homogenized temperature and for the plastic strain,

    1. solves the viscous elasticity problem for the displacement,
    2. advances the plastic strain with the Yosida flow rule,
    3. solves the heat equation with the resulting sources,

and returns the new temperature and plastic strain.  The map is
iterated (with optional damping) until both settle.

The temperature carried by `State` is the homogenized unknown: the
physical temperature is `state.theta + theta_tilde[step]`, where
the lift `theta_tilde` carries the Neumann data (see
`thermal_lift`).

"""
import concurrent.futures
from dataclasses import (
    dataclass,
    field,
    replace,
)
from typing import (  # noqa: F401
    Any,
    List,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np

from .config import (
    get_config,
    get_logger,
)
from .convex_plasticity import (
    YieldSurface,
    YosidaParam,
    in_K,
    truncate,
    yosida,
)
from .custom_assert import assert_bound
from .diagnostics import (
    build_report,
    cauchy_metric,
)
from .errors import (
    GrowthConditionError,
    InitialAdmissibilityError,
    InvalidValueError,
    PicardConvergenceError,
    SimulationError,
    SolverError,
    ThermoplastError,
)
from .expression import compile_expression
from .grid_fem import (
    LinearOperator,
    assemble_elasticity,
    assemble_laplacian_neumann,
    assemble_mass,
    body_force_load,
    divergence,
    divergence_scalar_weighted_load,
    scalar_source_load,
    solve_spd,
    strain,
    tensor_weighted_load,
)
from .tensors import (
    apply_D,
    deviator,
    inner,
    norm,
    trace,
)
from .thermal_lift import (
    LiftEstimate,
    NeumannData,
    lift_estimate_report,
    solve_tilde_theta,
    step_count,
)


logger = get_logger()

F_KINDS = ('piecewise_power', 'zero', 'expression')


@dataclass(frozen=True)
class ThermalStressFunction(object):
    """The function f in the thermal stress f(theta) Id.

    piecewise_power:
        M ((1 + r)^alpha - 1)        for r >= 0
        -C_neg ((1 - r)^(1/2) - 1)   for r < 0
    zero:
        f = 0, which decouples the mechanics from the temperature.
    expression:
        A user expression in `r` (see `expression`).

    The growth bounds |f(r)| <= a + M |r|^alpha and, for r <= 0,
    |f(r)| <= C_neg (1 + |r|)^(1/2) are checked by `check_growth`.

    """

    kind: str = 'piecewise_power'
    a: float = 1.0
    M: float = 1.0
    alpha: float = 0.7
    C_neg: float = 1.0
    expression: str = ''

    def __call__(self, r):
        return eval_f(self, r)

    def check_growth(self, samples=10 ** 4):
        # type: (int) -> None
        """Check continuity at zero and both growth bounds by sampling.

        Args:
            samples: The number of sample points per sign.

        Raises:
            GrowthConditionError: At the first violated sample.

        """
        magnitudes = np.concatenate([
            [0.0], np.geomspace(1e-8, 1e6, samples),
        ])
        for sign in (1.0, -1.0):
            r = sign * magnitudes
            values = np.abs(eval_f(self, r))
            bound = self.a + self.M * magnitudes ** self.alpha
            tolerance = 1e-12 * np.maximum(1.0, bound)
            broken = np.flatnonzero(values > bound + tolerance)
            if broken.size:
                index = broken[0]
                raise GrowthConditionError(
                    'flow.f', r[index], values[index], bound[index],
                )
            if sign < 0:
                bound = self.C_neg * np.sqrt(1.0 + magnitudes)
                tolerance = 1e-12 * np.maximum(1.0, bound)
                broken = np.flatnonzero(values > bound + tolerance)
                if broken.size:
                    index = broken[0]
                    raise GrowthConditionError(
                        'flow.C_neg', r[index], values[index], bound[index],
                    )
        near = eval_f(self, np.array([-1e-9, 1e-9]))
        if abs(near[1] - near[0]) > 1e-6:
            raise GrowthConditionError(
                'flow.f', 0.0, float(abs(near[1] - near[0])), 1e-6,
            )


def eval_f(fspec, r):
    # type: (ThermalStressFunction, Any) -> np.ndarray
    r = np.asarray(r, dtype=float)
    if fspec.kind == 'piecewise_power':
        magnitude = np.abs(r)
        return np.where(
            r >= 0,
            fspec.M * ((1.0 + magnitude) ** fspec.alpha - 1.0),
            -fspec.C_neg * (np.sqrt(1.0 + magnitude) - 1.0),
        )
    if fspec.kind == 'zero':
        return np.zeros_like(r)
    if fspec.kind == 'expression':
        return compile_expression(fspec.expression)(r)
    raise InvalidValueError('flow.f_kind', fspec.kind, ' | '.join(F_KINDS))


class Discretization(object):
    """Everything one run assembles once: grid, operators, parameters."""

    def __init__(self, cfg):
        # type: (Any) -> None
        self.cfg = cfg
        self.grid = cfg.grid.build()
        self.D = cfg.material.build()
        self.ys = YieldSurface(cfg.flow.k)
        self.yp = YosidaParam(cfg.flow.lam)
        self.f = cfg.flow.f
        self.dt = cfg.time.dt
        self.n_steps = step_count(cfg.time.T_end, cfg.time.dt)

        self.elasticity = assemble_elasticity(self.grid, self.D)
        self.viscous = self.elasticity.combine(1.0 + 1.0 / self.dt)
        self.mass = assemble_mass(self.grid)
        self.laplacian = assemble_laplacian_neumann(self.grid)
        self.heat = self.mass.combine(1.0 / self.dt, self.laplacian, 1.0)

    @property
    def truncation_height(self):
        # type: () -> float
        return self.yp.truncation_height

    def solve(self, operator, rhs, x0=None, context=''):
        # type: (LinearOperator, np.ndarray, Optional[np.ndarray], str) -> np.ndarray  # noqa: E501
        solver = self.cfg.solver
        return solve_spd(
            operator,
            rhs,
            tol=solver.cg_tol,
            maxit=solver.cg_maxit or None,
            jacobi=solver.jacobi,
            x0=x0,
            context=context,
        )

    def lr_norm(self, nodal, r):
        # type: (np.ndarray, float) -> float
        values = np.abs(self.grid.interpolate(nodal)) ** r
        return self.grid.integrate(values) ** (1.0 / r)

    def l2_norm(self, tensor):
        # type: (np.ndarray) -> float
        return float(np.sqrt(self.grid.integrate(inner(tensor, tensor))))

    def stress(self, u, eps_p):
        # type: (np.ndarray, np.ndarray) -> np.ndarray
        return apply_D(self.D, strain(self.grid, u) - eps_p)

    def body_force(self, t):
        # type: (float) -> np.ndarray
        points = self.grid.quad_points
        return body_force_load(
            self.grid, self.cfg.loads(points[:, 0], points[:, 1], t),
        )

    def initial_state(self):
        # type: () -> State
        grid = self.grid
        u = np.zeros(grid.n_dofs)
        eps_p = np.zeros((grid.n_quad, 6))
        return State(
            step=0,
            t=0.0,
            u=u,
            u_prev=u.copy(),
            eps_p=eps_p,
            theta=grid.nodal(self.cfg.thermal.theta0),
            stress=self.stress(u, eps_p),
            dissipation=np.zeros(grid.n_quad),
            source=np.zeros(grid.n_quad),
        )


@dataclass(frozen=True)
class State(object):
    """The unknowns at one time level, and what the step produced.

    `dissipation` is (eps_p - eps_p_prev) / dt : stress and `source`
    the heat source of the final heat solve, both at quadrature
    points; they are zero for the initial state.

    """

    step: int
    t: float
    u: np.ndarray
    u_prev: np.ndarray
    eps_p: np.ndarray
    theta: np.ndarray
    stress: np.ndarray
    dissipation: np.ndarray
    source: np.ndarray
    picard_iterations: int = 0
    clipped_fraction: float = 0.0
    picard_history: Tuple[float, ...] = field(default=())


def thermal_stress_argument(disc, theta_iter, theta_tilde):
    # type: (Discretization, np.ndarray, np.ndarray) -> np.ndarray
    """T_{1/lambda}(theta* + theta_tilde) at the quadrature points."""
    return truncate(
        disc.grid.interpolate(theta_iter + theta_tilde),
        disc.truncation_height,
    )


def elastic_visco_step(disc, state, eps_p_iter, theta_iter, theta_tilde,
                       F_load):
    # type: (Discretization, State, np.ndarray, np.ndarray, np.ndarray, np.ndarray) -> np.ndarray  # noqa: E501
    """Solve the viscous elasticity problem for the next displacement.

    Implicit Euler in the viscous term:

        (1 + 1/dt) A u^{n+1} = L + (1/dt) A u^n

    where L collects D eps_p : eps(v), f(T(theta* + theta_tilde)) div v
    and the body force.

    Args:
        disc: The discretization.
        state: The state at the start of the step.
        eps_p_iter: The current plastic strain iterate.
        theta_iter: The current homogenized temperature iterate.
        theta_tilde: The lift at the end of the step.
        F_load: The assembled body force at the end of the step.

    Returns:
        The displacement at the end of the step.

    """
    grid = disc.grid
    f_values = eval_f(
        disc.f, thermal_stress_argument(disc, theta_iter, theta_tilde),
    )
    load = (
        tensor_weighted_load(grid, apply_D(disc.D, eps_p_iter))
        + divergence_scalar_weighted_load(grid, f_values)
        + F_load
    )
    rhs = load + disc.elasticity.apply(state.u) / disc.dt
    return disc.solve(
        disc.viscous, rhs, x0=state.u,
        context='elasticity, step {}'.format(state.step + 1),
    )


def plastic_update(T_iter, eps_p_old, cfg):
    # type: (np.ndarray, np.ndarray, Any) -> np.ndarray
    """Advance the plastic strain: eps_p_old + dt * Y_lambda(T_iter)."""
    increment = yosida(
        T_iter, YieldSurface(cfg.flow.k), YosidaParam(cfg.flow.lam),
    )
    return eps_p_old + cfg.time.dt * increment


def heat_source(disc, theta_iter, theta_tilde, eps_p_rate, T_iter,
                div_u_rate):
    # type: (Discretization, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray) -> Tuple[np.ndarray, float]  # noqa: E501
    """The right-hand side of the heat equation at the quadrature points.

    Args:
        disc: The discretization.
        theta_iter: The homogenized temperature iterate.
        theta_tilde: The lift at the end of the step.
        eps_p_rate: The plastic strain rate.
        T_iter: The stress the plastic strain rate was computed from.
        div_u_rate: The divergence of the displacement rate.

    Returns:
        The source -f(T(theta* + theta_tilde)) div u_t + T(eps_p_t : T),
        and the fraction of points where the second term was clipped.

    """
    height = disc.truncation_height
    f_values = eval_f(
        disc.f, thermal_stress_argument(disc, theta_iter, theta_tilde),
    )
    work = inner(eps_p_rate, T_iter)
    source = -f_values * div_u_rate + truncate(work, height)
    clipped = float(np.mean(np.abs(work) > height))
    return source, clipped


def heat_step(disc, theta_old, theta_iter, theta_tilde, eps_p_rate, T_iter,
              div_u_rate):
    # type: (Discretization, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray) -> np.ndarray  # noqa: E501
    """Solve (M / dt + K) theta^{n+1} = M theta^n / dt + load(source).

    The source is `heat_source` at the current iterate, and the
    temperature satisfies a homogeneous Neumann condition.

    Raises:
        ConvergenceError: If the conjugate-gradient solve fails.

    Returns:
        The homogenized temperature at the end of the step.

    """
    source, _ = heat_source(
        disc, theta_iter, theta_tilde, eps_p_rate, T_iter, div_u_rate,
    )
    rhs = (
        disc.mass.apply(theta_old) / disc.dt
        + scalar_source_load(disc.grid, source)
    )
    return disc.solve(disc.heat, rhs, x0=theta_old, context='heat')


@dataclass(frozen=True)
class _MapOutput(object):
    u: np.ndarray
    eps_p: np.ndarray
    theta: np.ndarray
    source: np.ndarray
    clipped: float


def _apply_map(disc, state, eps_p_iter, theta_iter, theta_tilde, F_load):
    # type: (Discretization, State, np.ndarray, np.ndarray, np.ndarray, np.ndarray) -> _MapOutput  # noqa: E501
    grid = disc.grid
    u = elastic_visco_step(
        disc, state, eps_p_iter, theta_iter, theta_tilde, F_load,
    )
    T_iter = disc.stress(u, eps_p_iter)
    eps_p = plastic_update(T_iter, state.eps_p, disc.cfg)
    eps_p_rate = (eps_p - state.eps_p) / disc.dt
    div_u_rate = divergence(grid, u - state.u) / disc.dt
    theta = heat_step(
        disc, state.theta, theta_iter, theta_tilde, eps_p_rate, T_iter,
        div_u_rate,
    )
    # Kept on the state for the diagnostics.
    source, clipped = heat_source(
        disc, theta_iter, theta_tilde, eps_p_rate, T_iter, div_u_rate,
    )
    return _MapOutput(u, eps_p, theta, source, clipped)


def _increment(disc, output, eps_p_iter, theta_iter):
    # type: (Discretization, _MapOutput, np.ndarray, np.ndarray) -> float
    return max(
        disc.lr_norm(output.theta - theta_iter, disc.cfg.solver.picard_r),
        disc.l2_norm(output.eps_p - eps_p_iter),
    )


def picard_step(disc, state, theta_tilde, F_load):
    # type: (Discretization, State, np.ndarray, np.ndarray) -> State
    """Advance one step by damped Picard iteration of the coupling map.

    The iteration stops when the temperature increment, in the
    discrete L^r norm, and the plastic strain increment, in L2,
    both fall below the tolerance.  The returned state holds the
    last undamped outputs of the map, so the plastic strain is
    exactly eps_p^n + dt Y_lambda(T) for the stress T it was
    computed from.

    Args:
        disc: The discretization.
        state: The state at the start of the step.
        theta_tilde: The lift at the end of the step.
        F_load: The assembled body force at the end of the step.

    Raises:
        PicardConvergenceError: If the iteration limit is reached.
            Carries the increment history.

    Returns:
        The state at the end of the step.

    """
    solver = disc.cfg.solver
    damping = solver.picard_damping
    t = (state.step + 1) * disc.dt
    theta_iter = state.theta.copy()
    eps_p_iter = state.eps_p.copy()
    history = []  # type: List[float]
    for iteration in range(1, solver.picard_max + 1):
        output = _apply_map(
            disc, state, eps_p_iter, theta_iter, theta_tilde, F_load,
        )
        history.append(_increment(disc, output, eps_p_iter, theta_iter))
        if history[-1] < solver.picard_tol:
            break
        theta_iter = damping * output.theta + (1.0 - damping) * theta_iter
        eps_p_iter = damping * output.eps_p + (1.0 - damping) * eps_p_iter
    else:
        raise PicardConvergenceError(history, solver.picard_tol, t)
    logger.debug('step %d (t = %.6g): %d Picard iterations, increment %.3e',
                 state.step + 1, t, iteration, history[-1])

    stress = disc.stress(output.u, output.eps_p)
    dissipation = inner((output.eps_p - state.eps_p) / disc.dt, stress)
    return State(
        step=state.step + 1,
        t=t,
        u=output.u,
        u_prev=state.u,
        eps_p=output.eps_p,
        theta=output.theta,
        stress=stress,
        dissipation=dissipation,
        source=output.source,
        picard_iterations=iteration,
        clipped_fraction=output.clipped,
        picard_history=tuple(history),
    )


def fixed_point_residual(disc, previous, state, theta_tilde, F_load):
    # type: (Discretization, State, State, np.ndarray, np.ndarray) -> float
    """Re-apply the coupling map at a completed step and measure the change.

    Args:
        disc: The discretization.
        previous: The state at the start of the step.
        state: The state `picard_step` returned.
        theta_tilde: The lift at the end of the step.
        F_load: The assembled body force at the end of the step.

    Returns:
        The larger of the temperature (L^r) and plastic strain (L2)
        increments.  Zero for an exact fixed point.

    """
    output = _apply_map(
        disc, previous, state.eps_p, state.theta, theta_tilde, F_load,
    )
    return _increment(disc, output, state.eps_p, state.theta)


def _check_invariants(disc, state):
    # type: (Discretization, State) -> None
    recomputed = disc.stress(state.u, state.eps_p)
    scale = max(1.0, float(np.abs(recomputed).max()))
    assert_bound(
        'stale stress cache',
        float(np.abs(state.stress - recomputed).max()), 1e-10 * scale,
        state.step,
    )
    assert_bound(
        'plastic strain trace',
        float(np.abs(trace(state.eps_p)).max()), 1e-12, state.step,
    )
    assert_bound(
        'minimum dissipation',
        float(state.dissipation.min()), -1e-12, state.step, upper=False,
    )


@dataclass
class SimulationResult(object):
    """A trajectory, the lift it was computed with, and its diagnostics.

    A result attached to a `SimulationError` is partial: its
    trajectory stops at the last completed step and it carries no
    report.

    """

    cfg: Any
    grid: Any
    trajectory: List[State]
    theta_tilde: np.ndarray
    lift: Optional[LiftEstimate] = None
    report: Any = None

    @property
    def times(self):
        # type: () -> np.ndarray
        return np.array([state.t for state in self.trajectory])

    @property
    def final(self):
        # type: () -> State
        return self.trajectory[-1]

    def temperature(self, index):
        # type: (int) -> np.ndarray
        """The physical temperature of the indexed state, lift included."""
        state = self.trajectory[index]
        return state.theta + self.theta_tilde[state.step]


def run_simulation(cfg):
    # type: (Any) -> SimulationResult
    """Run a model configuration from t = 0 to T_end.

    Args:
        cfg: A validated `model_config.ModelConfig`.

    Raises:
        InitialAdmissibilityError: If the initial stress is not
            admissible.
        SimulationError: If a step fails.  Carries the step index,
            the cause and the partial result.

    Returns:
        The full trajectory (T_end / dt + 1 states) and its
        diagnostics.

    """
    disc = Discretization(cfg)
    grid = disc.grid
    if disc.dt > cfg.flow.lam:
        logger.warning(
            'dt = %g exceeds lambda = %g; the Picard iteration may '
            'fail to converge.', disc.dt, cfg.flow.lam,
        )
    logger.info('run: %r, %d steps of %g, lambda = %g',
                grid, disc.n_steps, disc.dt, cfg.flow.lam)

    flux = NeumannData.from_function(
        grid, cfg.thermal.flux, cfg.time.T_end, disc.dt,
    )
    theta_tilde = solve_tilde_theta(
        grid, flux, cfg.time.T_end, disc.dt,
        tol=cfg.solver.cg_tol, jacobi=cfg.solver.jacobi,
    )

    state = disc.initial_state()
    admissible = in_K(state.stress, disc.ys)
    if not np.all(admissible):
        raise InitialAdmissibilityError(
            float(norm(deviator(state.stress)).max()), cfg.flow.k,
        )

    trajectory = [state]
    for n in range(disc.n_steps):
        t = (n + 1) * disc.dt
        try:
            state = picard_step(
                disc, state, theta_tilde[n + 1], disc.body_force(t),
            )
        except SolverError as exc:
            partial = SimulationResult(cfg, grid, trajectory, theta_tilde)
            raise SimulationError(n + 1, exc, partial)
        _check_invariants(disc, state)
        trajectory.append(state)

    result = SimulationResult(
        cfg=cfg,
        grid=grid,
        trajectory=trajectory,
        theta_tilde=theta_tilde,
        lift=lift_estimate_report(grid, theta_tilde, flux),
    )
    result.report = build_report(result)
    logger.info('run finished: t = %g, %d Picard iterations in total',
                state.t, sum(s.picard_iterations for s in trajectory))
    return result


@dataclass
class SweepMember(object):
    lam: float
    result: Optional[SimulationResult] = None
    error: Optional[ThermoplastError] = None

    @property
    def ok(self):
        # type: () -> bool
        return self.error is None


@dataclass
class SweepResult(object):
    """The members of a lambda sweep and their Cauchy table.

    `metrics[i, j]` is the Cauchy metric between members j and
    j + 1 at output time `times[i]`; NaN if either member failed.

    """

    members: List[SweepMember]
    times: np.ndarray
    pairs: List[Tuple[float, float]]
    metrics: np.ndarray

    @property
    def final_metrics(self):
        # type: () -> np.ndarray
        if self.metrics.size == 0:
            return np.zeros(0)
        return self.metrics[-1]

    @property
    def decreasing(self):
        # type: () -> bool
        """Whether the final-time metric strictly decreases across pairs."""
        final = self.final_metrics
        if not np.all(np.isfinite(final)):
            return False
        return bool(np.all(np.diff(final) < 0))

    @property
    def failures(self):
        # type: () -> List[SweepMember]
        return [member for member in self.members if not member.ok]


def _sweep_member(cfg, lam):
    # type: (Any, float) -> SweepMember
    member_cfg = replace(cfg, flow=replace(cfg.flow, lam=lam))
    try:
        return SweepMember(lam, result=run_simulation(member_cfg))
    except ThermoplastError as exc:
        logger.error('sweep member lambda = %g failed: %s', lam, exc)
        return SweepMember(lam, error=exc)


def lambda_sweep(cfg, lambdas, workers=None):
    # type: (Any, Sequence[float], Optional[int]) -> SweepResult
    """Run one simulation per lambda and compare consecutive stresses.

    Args:
        cfg: The model configuration shared by all members.
        lambdas: Positive, non-increasing regularization parameters.
        workers: The number of worker threads.  Defaults to the
            runtime configuration's `sweep_workers`.

    Raises:
        InvalidValueError: If the lambdas are empty, nonpositive or
            increasing.

    Returns:
        The members, failed ones included, and the Cauchy table.

    """
    lambdas = [float(lam) for lam in lambdas]
    if not lambdas or min(lambdas) <= 0:
        raise InvalidValueError('lambdas', lambdas, 'positive values')
    if any(b > a for a, b in zip(lambdas, lambdas[1:])):
        raise InvalidValueError('lambdas', lambdas, 'a descending list')
    if workers is None:
        workers = get_config().sweep_workers

    logger.info('sweep over lambda = %s with %d workers', lambdas, workers)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        members = list(pool.map(lambda lam: _sweep_member(cfg, lam), lambdas))

    times = np.arange(step_count(cfg.time.T_end, cfg.time.dt) + 1) \
        * cfg.time.dt
    pairs = list(zip(lambdas, lambdas[1:]))
    metrics = np.full((times.size, len(pairs)), np.nan)
    for j, (first, second) in enumerate(zip(members, members[1:])):
        if not (first.ok and second.ok):
            continue
        a = first.result.trajectory
        b = second.result.trajectory
        D = cfg.material.build()
        for i in range(times.size):
            metrics[i, j] = cauchy_metric(
                first.result.grid, a[i].stress, b[i].stress, D,
            )
    if not pairs:
        metrics = np.zeros((times.size, 0))
    return SweepResult(members, times, pairs, metrics)
