"""Tests for the boundary-lift heat problem."""

from unittest import TestCase

import numpy as np

from thermoplast.errors import InvalidValueError
from thermoplast.grid_fem import (
    Grid,
    assemble_mass,
)
from thermoplast.scenarios import BoundaryFluxSpec
from thermoplast.thermal_lift import (
    NeumannData,
    lift_estimate_report,
    solve_tilde_theta,
    step_count,
)


class StepCountTestCase(TestCase):

    def test_exact_division(self):
        self.assertEqual(step_count(0.5, 5e-3), 100)
        self.assertEqual(step_count(0.1, 0.1), 1)

    def test_rounding_is_tolerated(self):
        self.assertEqual(step_count(0.3, 0.1), 3)

    def test_non_dividing_step_is_rejected(self):
        with self.assertRaises(InvalidValueError):
            step_count(1.0, 0.3)

    def test_step_longer_than_horizon_is_rejected(self):
        with self.assertRaises(InvalidValueError):
            step_count(0.1, 0.2)


class NeumannDataTestCase(TestCase):

    def setUp(self):
        self.grid = Grid(4, 4)

    def test_interior_samples_are_zeroed(self):
        samples = np.ones((3, self.grid.n_nodes))
        data = NeumannData(self.grid, samples, 0.1)
        self.assertTrue(np.all(data.samples[:, ~self.grid.boundary_mask] == 0))
        self.assertTrue(np.all(data.samples[:, self.grid.boundary_mask] == 1))

    def test_from_function_samples_every_step(self):
        flux = BoundaryFluxSpec('ramp', value=2.0)
        data = NeumannData.from_function(self.grid, flux, 0.5, 0.1)
        self.assertEqual(data.n_samples, 6)
        boundary = self.grid.boundary_mask
        self.assertTrue(np.allclose(data.samples[3, boundary], 0.6))

    def test_single_sample_is_rejected(self):
        with self.assertRaises(InvalidValueError):
            NeumannData(self.grid, np.zeros((1, self.grid.n_nodes)), 0.1)

    def test_non_finite_samples_are_rejected(self):
        samples = np.zeros((2, self.grid.n_nodes))
        samples[1, 0] = np.nan
        with self.assertRaises(InvalidValueError):
            NeumannData(self.grid, samples, 0.1)

    def test_wrong_shape_is_rejected(self):
        with self.assertRaises(InvalidValueError):
            NeumannData(self.grid, np.zeros((2, 3)), 0.1)

    def test_addition_and_scaling(self):
        flux = BoundaryFluxSpec('constant', value=1.0)
        data = NeumannData.from_function(self.grid, flux, 0.2, 0.1)
        self.assertTrue(np.allclose(
            (data + data).samples, data.scaled(2.0).samples,
        ))

    def test_addition_needs_matching_samples(self):
        flux = BoundaryFluxSpec('constant', value=1.0)
        short = NeumannData.from_function(self.grid, flux, 0.2, 0.1)
        long = NeumannData.from_function(self.grid, flux, 0.3, 0.1)
        with self.assertRaises(InvalidValueError):
            short + long


class SolveTildeThetaTestCase(TestCase):

    def setUp(self):
        self.grid = Grid(6, 6)
        self.T_end = 0.2
        self.dt = 0.02

    def data(self, flux):
        return NeumannData.from_function(self.grid, flux, self.T_end, self.dt)

    def test_zero_data_gives_zero(self):
        trajectory = solve_tilde_theta(
            self.grid, self.data(BoundaryFluxSpec()), self.T_end, self.dt,
        )
        self.assertEqual(trajectory.shape, (11, self.grid.n_nodes))
        self.assertTrue(np.all(trajectory == 0.0))

    def test_first_row_is_zero(self):
        trajectory = solve_tilde_theta(
            self.grid, self.data(BoundaryFluxSpec('constant', 1.0)),
            self.T_end, self.dt,
        )
        self.assertTrue(np.all(trajectory[0] == 0.0))
        self.assertTrue(np.any(trajectory[-1] != 0.0))

    def test_constant_flux_conserves_heat(self):
        """The heat content grows by the boundary flux, 4 c t."""
        trajectory = solve_tilde_theta(
            self.grid, self.data(BoundaryFluxSpec('constant', 1.5)),
            self.T_end, self.dt,
        )
        mass = assemble_mass(self.grid)
        ones = np.ones(self.grid.n_nodes)
        for n, theta in enumerate(trajectory):
            self.assertAlmostEqual(
                float(ones @ mass.apply(theta)), 4.0 * 1.5 * n * self.dt,
                places=8,
            )

    def test_linear_in_the_data(self):
        first = self.data(BoundaryFluxSpec('constant', 1.0))
        second = self.data(BoundaryFluxSpec('sinusoidal', 2.0, 2.5))
        combined = solve_tilde_theta(
            self.grid, first + second.scaled(-0.5), self.T_end, self.dt,
        )
        separate = (
            solve_tilde_theta(self.grid, first, self.T_end, self.dt)
            - 0.5 * solve_tilde_theta(self.grid, second, self.T_end, self.dt)
        )
        self.assertTrue(np.allclose(combined, separate, atol=1e-9))

    def test_mismatched_sampling_is_rejected(self):
        coarse = NeumannData.from_function(
            self.grid, BoundaryFluxSpec('constant', 1.0), self.T_end, 0.04,
        )
        with self.assertRaises(InvalidValueError):
            solve_tilde_theta(self.grid, coarse, self.T_end, self.dt)


class LiftEstimateTestCase(TestCase):

    def test_zero_data_has_zero_ratio(self):
        grid = Grid(4, 4)
        data = NeumannData(grid, np.zeros((3, grid.n_nodes)), 0.1)
        trajectory = solve_tilde_theta(grid, data, 0.2, 0.1)
        report = lift_estimate_report(grid, trajectory, data)
        self.assertEqual(report.ratio, 0.0)

    def test_ratio_is_bounded_under_refinement(self):
        ratios = []
        for n in (4, 8, 16):
            grid = Grid(n, n)
            data = NeumannData.from_function(
                grid, BoundaryFluxSpec('ramp', 1.0), 0.2, 0.02,
            )
            trajectory = solve_tilde_theta(grid, data, 0.2, 0.02)
            ratios.append(lift_estimate_report(grid, trajectory, data).ratio)
        self.assertTrue(all(np.isfinite(ratio) for ratio in ratios))
        self.assertTrue(all(ratio > 0.0 for ratio in ratios))
        self.assertLess(max(ratios), 2.0 * min(ratios))
