"""Tests for the trajectory functionals and the diagnostics report."""

from unittest import TestCase

import numpy as np

from thermoplast.convex_plasticity import (
    YieldSurface,
    YosidaParam,
)
from thermoplast.coupled_solver import (
    State,
    run_simulation,
)
from thermoplast.diagnostics import (
    COLUMNS,
    DiagnosticsReport,
    PolynomialCutoff,
    RenormalizationFunction,
    boccardo_norm,
    cauchy_metric,
    energy_report,
    energy_transfer_gap,
    m_lambda_balance,
    renorm_residual,
    stress_rate_norm,
    stress_rate_series,
    trunc_tail,
)
from thermoplast.errors import (
    GridMismatchError,
    ParameterRangeError,
)
from thermoplast.grid_fem import (
    Grid,
    strain,
)
from thermoplast.tensors import (
    IDENTITY,
    ElasticityTensor,
    apply_D,
)

from .utils import (
    PLASTIC,
    small_config,
)


def make_state(grid, D, step, dt, u, eps_p=None, theta=None,
               dissipation=None):
    eps_p = np.zeros((grid.n_quad, 6)) if eps_p is None else eps_p
    theta = np.zeros(grid.n_nodes) if theta is None else theta
    if dissipation is None:
        dissipation = np.zeros(grid.n_quad)
    return State(
        step=step,
        t=step * dt,
        u=u,
        u_prev=u,
        eps_p=eps_p,
        theta=theta,
        stress=apply_D(D, strain(grid, u) - eps_p),
        dissipation=dissipation,
        source=np.zeros(grid.n_quad),
    )


def elastic_history(grid, D, dt, steps):
    """u^n = n * u1 for a fixed smooth clamped displacement u1."""
    bump = grid.nodal(
        lambda x, y: 0.1 * np.sin(np.pi * x) * np.sin(np.pi * y)
    )
    u1 = np.stack([bump, 0.5 * bump], axis=-1).ravel()
    return [make_state(grid, D, n, dt, n * u1) for n in range(steps + 1)]


class EnergyReportTestCase(TestCase):

    def setUp(self):
        self.grid = Grid(6, 6)
        self.D = ElasticityTensor(1.0, 1.0)
        self.history = elastic_history(self.grid, self.D, 0.1, 4)

    def test_accumulated_columns_start_at_zero_and_grow(self):
        rows = energy_report(self.grid, self.history, 5.0)
        self.assertEqual(len(rows), 5)
        self.assertEqual(rows[0].viscous_work, 0.0)
        self.assertEqual(rows[0].trunc_gradient, 0.0)
        viscous = [row.viscous_work for row in rows]
        self.assertTrue(all(b > a for a, b in zip(viscous, viscous[1:])))

    def test_stress_energy_is_quadratic_in_time(self):
        rows = energy_report(self.grid, self.history, 5.0)
        self.assertAlmostEqual(
            rows[4].stress_energy, 16.0 * rows[1].stress_energy,
        )

    def test_theta_mass_of_a_constant(self):
        history = [
            make_state(self.grid, self.D, n, 0.1, np.zeros(self.grid.n_dofs),
                       theta=np.full(self.grid.n_nodes, -2.0))
            for n in range(3)
        ]
        rows = energy_report(self.grid, history, 5.0)
        self.assertAlmostEqual(rows[-1].theta_mass, 2.0)
        self.assertAlmostEqual(rows[-1].trunc_gradient, 0.0)

    def test_truncated_gradient_ignores_hot_regions(self):
        theta = self.grid.nodal(lambda x, y: 100.0 * x)
        history = [
            make_state(self.grid, self.D, n, 0.1, np.zeros(self.grid.n_dofs),
                       theta=theta)
            for n in range(2)
        ]
        low = energy_report(self.grid, history, 1.0)[-1].trunc_gradient
        high = energy_report(self.grid, history, 1e3)[-1].trunc_gradient
        self.assertAlmostEqual(high, 0.1 * 100.0 ** 2)
        self.assertLess(low, high)


class BalanceTestCase(TestCase):

    def setUp(self):
        self.grid = Grid(6, 6)
        self.D = ElasticityTensor(1.0, 1.0)
        self.ys = YieldSurface(1e3)
        self.yp = YosidaParam(0.1)

    def test_elastic_history_balances_exactly(self):
        history = elastic_history(self.grid, self.D, 0.1, 4)
        rows = m_lambda_balance(self.grid, history, self.D, self.ys, self.yp)
        self.assertEqual(len(rows), 5)
        self.assertEqual(rows[0].residual, 0.0)
        for row in rows[1:]:
            self.assertGreater(row.rhs, 0.0)
            self.assertLess(row.relative, 1e-12)

    def test_plastic_run_balances_up_to_convexity_gap(self):
        result = run_simulation(small_config(**PLASTIC))
        cfg = result.cfg
        rows = m_lambda_balance(
            result.grid, result.trajectory, cfg.material.build(),
            YieldSurface(cfg.flow.k), YosidaParam(cfg.flow.lam),
        )
        for row in rows:
            self.assertGreaterEqual(
                row.rhs, row.lhs - 1e-8 * max(1.0, abs(row.rhs)),
            )


class StressRateTestCase(TestCase):

    def setUp(self):
        self.grid = Grid(4, 4)
        self.D = ElasticityTensor(1.0, 1.0)

    def test_linear_stress_growth(self):
        dt = 0.25
        history = elastic_history(self.grid, self.D, dt, 4)
        change = history[1].stress - history[0].stress
        per_step = self.grid.integrate(np.sum(
            np.array([1, 1, 1, 2, 2, 2]) * change * change, axis=-1,
        )) / dt
        self.assertAlmostEqual(
            stress_rate_norm(self.grid, history), np.sqrt(4 * per_step),
        )
        series = stress_rate_series(self.grid, history)
        self.assertEqual(series[0], 0.0)
        self.assertTrue(np.allclose(series ** 2, per_step * np.arange(5)))

    def test_needs_two_states(self):
        history = elastic_history(self.grid, self.D, 0.1, 0)
        with self.assertRaises(ParameterRangeError):
            stress_rate_norm(self.grid, history)


class BoccardoNormTestCase(TestCase):

    def setUp(self):
        self.grid = Grid(4, 4, 2.0, 2.0)

    def test_constant_temperature(self):
        history = np.full((5, self.grid.n_nodes), 3.0)
        dt = 0.25
        # One unit of time over an area of four.
        self.assertAlmostEqual(
            boccardo_norm(self.grid, history, dt, q=1.0), 12.0,
        )
        self.assertAlmostEqual(
            boccardo_norm(self.grid, history, dt, q=1.2, normalize=True),
            (3.0 ** 1.2 / 2.0) ** (1.0 / 1.2),
        )

    def test_normalized_norm_grows_with_q(self):
        rng = np.random.default_rng(5)
        history = rng.standard_normal((4, self.grid.n_nodes))
        low = boccardo_norm(self.grid, history, 0.1, 1.0, normalize=True)
        high = boccardo_norm(self.grid, history, 0.1, 1.2, normalize=True)
        self.assertLessEqual(low, high + 1e-12)

    def test_exponent_range(self):
        history = np.zeros((2, self.grid.n_nodes))
        for q in (0.9, 1.25, 2.0):
            with self.assertRaises(ParameterRangeError):
                boccardo_norm(self.grid, history, 0.1, q)


class CauchyMetricTestCase(TestCase):

    def setUp(self):
        self.grid = Grid(4, 4)
        self.D = ElasticityTensor(1.0, 1.0)

    def test_identical_stresses(self):
        T = np.ones((self.grid.n_quad, 6))
        self.assertEqual(cauchy_metric(self.grid, T, T, self.D), 0.0)

    def test_spherical_difference_uses_bulk_modulus(self):
        T_a = np.tile(2.0 * IDENTITY, (self.grid.n_quad, 1))
        T_b = np.zeros_like(T_a)
        self.assertAlmostEqual(
            cauchy_metric(self.grid, T_a, T_b, self.D),
            4.0 / self.D.bulk_modulus,
        )

    def test_symmetric(self):
        rng = np.random.default_rng(0)
        T_a = rng.standard_normal((self.grid.n_quad, 6))
        T_b = rng.standard_normal((self.grid.n_quad, 6))
        self.assertAlmostEqual(
            cauchy_metric(self.grid, T_a, T_b, self.D),
            cauchy_metric(self.grid, T_b, T_a, self.D),
        )

    def test_grid_mismatch(self):
        other = Grid(8, 8)
        with self.assertRaises(GridMismatchError):
            cauchy_metric(
                self.grid,
                np.zeros((self.grid.n_quad, 6)),
                np.zeros((other.n_quad, 6)),
                self.D,
            )


class RenormalizationFunctionTestCase(TestCase):

    def setUp(self):
        self.S = RenormalizationFunction(2.0)

    def test_odd_with_unit_slope_near_zero(self):
        r = np.linspace(-5.0, 5.0, 41)
        self.assertTrue(np.allclose(self.S(-r), -self.S(r)))
        self.assertTrue(np.allclose(self.S(np.array([0.3, 0.9])),
                                    [0.3, 0.9]))

    def test_flat_beyond_support(self):
        r = np.array([2.0, 3.0, 100.0])
        self.assertTrue(np.allclose(self.S(r), 0.75 * 2.0))
        self.assertTrue(np.all(self.S.derivative(r) == 0.0))

    def test_derivatives_are_consistent(self):
        r = np.linspace(-2.5, 2.5, 51) + 0.013
        step = 1e-6
        slope = (self.S(r + step) - self.S(r - step)) / (2.0 * step)
        self.assertTrue(np.allclose(slope, self.S.derivative(r), atol=1e-6))
        curvature = (
            self.S.derivative(r + step) - self.S.derivative(r - step)
        ) / (2.0 * step)
        self.assertTrue(np.allclose(
            curvature, self.S.second_derivative(r), atol=1e-5,
        ))

    def test_shift(self):
        shifted = RenormalizationFunction(2.0, shift=0.5)
        self.assertTrue(np.allclose(shifted(np.array([0.0, 1.0])),
                                    [0.5, 1.5]))


class RenormResidualTestCase(TestCase):

    def setUp(self):
        self.grid = Grid(6, 6)
        rng = np.random.default_rng(2)
        self.dt = 0.1
        self.theta = rng.standard_normal((6, self.grid.n_nodes))
        self.tilde = np.zeros_like(self.theta)
        self.source = rng.standard_normal((6, self.grid.n_quad))
        self.phi = PolynomialCutoff(5 * self.dt)

    def residual(self, S):
        return renorm_residual(
            self.grid, self.theta, self.tilde, self.source, self.dt, S,
            self.phi,
        )

    def test_adding_a_constant_to_S_changes_nothing(self):
        plain = self.residual(RenormalizationFunction(2.0))
        shifted = self.residual(RenormalizationFunction(2.0, shift=3.0))
        self.assertAlmostEqual(plain.absolute, shifted.absolute, places=10)
        self.assertNotAlmostEqual(plain.initial, shifted.initial)

    def test_cutoff_vanishes_at_the_end(self):
        x = np.array([0.2, 0.7])
        self.assertTrue(np.all(self.phi(x, x, 5 * self.dt) == 0.0))

    def test_relative_is_scale_free(self):
        residual = self.residual(RenormalizationFunction(1.0))
        self.assertGreaterEqual(residual.relative, 0.0)
        self.assertLessEqual(residual.relative, 5.0)


class TruncTailTestCase(TestCase):

    def setUp(self):
        self.grid = Grid(6, 6)
        self.history = np.array([
            np.full(self.grid.n_nodes, value)
            for value in (0.0, 1.5, 3.0, 12.0)
        ])

    def test_nonincreasing_in_K(self):
        table = trunc_tail(self.grid, self.history, 0.1, (1, 2, 5, 10), 1.0)
        self.assertEqual([K for K, _ in table], [1.0, 2.0, 5.0, 10.0])
        values = [value for _, value in table]
        self.assertTrue(all(b <= a for a, b in zip(values, values[1:])))
        self.assertAlmostEqual(values[0], np.sqrt(0.225))
        self.assertAlmostEqual(values[-1], np.sqrt(0.1))

    def test_bounded_history_has_no_tail(self):
        table = trunc_tail(self.grid, self.history / 10.0, 0.1, (1, 2), 1.0)
        self.assertEqual(table[-1][1], 0.0)

    def test_rejects_bad_parameters(self):
        with self.assertRaises(ParameterRangeError):
            trunc_tail(self.grid, self.history, 0.1, (2, 1), 1.0)
        with self.assertRaises(ParameterRangeError):
            trunc_tail(self.grid, self.history, 0.1, (1, 2), 0.0)


class EnergyTransferTestCase(TestCase):

    def test_matching_gain(self):
        grid = Grid(4, 4)
        D = ElasticityTensor(1.0, 1.0)
        zero = np.zeros(grid.n_dofs)
        previous = make_state(grid, D, 0, 0.5, zero)
        state = make_state(
            grid, D, 1, 0.5, zero,
            theta=np.full(grid.n_nodes, 1.5),
            dissipation=np.full(grid.n_quad, 3.0),
        )
        self.assertAlmostEqual(energy_transfer_gap(grid, previous, state), 0.0)
        doubled = make_state(
            grid, D, 1, 0.5, zero,
            theta=np.full(grid.n_nodes, 3.0),
            dissipation=np.full(grid.n_quad, 3.0),
        )
        self.assertAlmostEqual(
            energy_transfer_gap(grid, previous, doubled), 0.5,
        )


class DiagnosticsReportTestCase(TestCase):

    def rows(self, **overrides):
        rows = []
        for step in range(3):
            row = {name: float(step) for name in COLUMNS}
            row.update({
                'dissipation_min': 0.0,
                'plastic_trace_max': 0.0,
                'm_lambda_residual': 0.01,
            })
            rows.append(row)
        rows[-1].update(overrides)
        return rows

    def test_healthy_rows_pass(self):
        report = DiagnosticsReport(rows=self.rows())
        self.assertTrue(report.passed)
        self.assertIn('dissipation', report.summary())
        self.assertNotIn('FAIL', report.summary())

    def test_negative_dissipation_fails(self):
        report = DiagnosticsReport(rows=self.rows(dissipation_min=-1e-6))
        self.assertFalse(report.passed)
        failed = [name for name, passed, _ in report.checks() if not passed]
        self.assertEqual(failed, ['dissipation'])

    def test_balance_tolerance_is_configurable(self):
        rows = self.rows(m_lambda_residual=0.07)
        self.assertFalse(DiagnosticsReport(rows=rows).passed)
        self.assertTrue(
            DiagnosticsReport(rows=rows, balance_tolerance=0.1).passed
        )

    def test_decreasing_accumulation_fails(self):
        report = DiagnosticsReport(rows=self.rows(viscous_work=0.5))
        self.assertFalse(report.passed)

    def test_nan_fails(self):
        report = DiagnosticsReport(rows=self.rows(theta_mass=float('nan')))
        self.assertFalse(report.passed)

    def test_summary_lists_whole_run_functionals(self):
        report = DiagnosticsReport(
            rows=self.rows(),
            renorm_residuals={1.0: 0.25, 2.0: 0.5},
            trunc_tail=[(1.0, 2.0)],
        )
        summary = report.summary()
        self.assertIn('renorm_residual M=1', summary)
        self.assertIn('trunc_tail K=1', summary)
        self.assertIn('lift_ratio', summary)


class BuildReportTestCase(TestCase):

    def test_elastic_run_passes(self):
        result = run_simulation(small_config(
            flow__f_kind='zero', loads__kind='ramp', loads__fx=1.0,
        ))
        report = result.report
        self.assertEqual(len(report.rows), len(result.trajectory))
        self.assertEqual(set(report.rows[0]), set(COLUMNS))
        self.assertTrue(report.passed, report.summary())
        self.assertEqual(
            sorted(report.renorm_residuals), [1.0, 2.0, 5.0, 10.0],
        )
