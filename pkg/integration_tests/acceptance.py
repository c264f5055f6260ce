"""Slow acceptance experiments on the built-in scenarios.

Run with

    pytest integration_tests/acceptance.py

"""
from unittest import TestCase

import numpy as np

from thermoplast.coupled_solver import (
    lambda_sweep,
    run_simulation,
)
from thermoplast.mms import (
    SIZES,
    heat_renorm_studies,
    run_studies,
)
from thermoplast.model_config import parse_config
from thermoplast.tensors import trace


SWEEP_LAMBDAS = [0.1, 0.05, 0.02, 0.01]

BOUNDED_COLUMNS = (
    'stress_energy',
    'viscous_work',
    'theta_mass',
    'trunc_gradient',
    'stress_rate_norm',
)


class ConvergenceStudiesTest(TestCase):

    def test_discretization_orders(self):
        studies = {study.name: study for study in run_studies(SIZES)}
        for name in ('elasticity', 'neumann', 'heat', 'linear_reproduction'):
            self.assertTrue(studies[name].passed, studies[name].report())

    def test_renormalized_residual_order(self):
        for study in heat_renorm_studies():
            self.assertTrue(study.passed, study.report())


class ShearRampTest(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.result = run_simulation(parse_config('scenario = shear_ramp\n'))

    def test_second_law(self):
        for state in self.result.trajectory:
            self.assertGreaterEqual(float(state.dissipation.min()), -1e-12)
            self.assertLessEqual(
                float(np.abs(trace(state.eps_p)).max()), 1e-12,
            )

    def test_picard_iterations(self):
        self.assertLessEqual(
            max(state.picard_iterations
                for state in self.result.trajectory[1:]),
            20,
        )

    def test_yield_is_reached(self):
        self.assertGreater(
            float(self.result.final.dissipation.max()), 0.0,
        )

    def test_balance_within_tolerance(self):
        residuals = [
            row['m_lambda_residual'] for row in self.result.report.rows
        ]
        self.assertLessEqual(max(residuals), 0.05)

    def test_balance_improves_with_smaller_steps(self):
        fine = run_simulation(parse_config(
            'scenario = shear_ramp\ntime.dt = 0.0025\n'
        ))
        coarse_worst = max(
            row['m_lambda_residual'] for row in self.result.report.rows
        )
        fine_worst = max(
            row['m_lambda_residual'] for row in fine.report.rows
        )
        self.assertGreaterEqual(coarse_worst / fine_worst, 1.5)

    def test_truncation_tail_is_nonincreasing(self):
        values = [value for _, value in self.result.report.trunc_tail]
        self.assertEqual(
            [K for K, _ in self.result.report.trunc_tail],
            [1.0, 2.0, 5.0, 10.0],
        )
        for larger, smaller in zip(values, values[1:]):
            self.assertLessEqual(smaller, larger)


class LambdaSweepTest(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.sweep = lambda_sweep(
            parse_config('scenario = shear_ramp\n'), SWEEP_LAMBDAS,
        )

    def test_every_member_finished(self):
        self.assertFalse(self.sweep.failures)

    def test_stresses_form_a_cauchy_sequence(self):
        self.assertTrue(self.sweep.decreasing, self.sweep.final_metrics)

    def test_energies_are_bounded_uniformly(self):
        first = self.sweep.members[0].result.report.rows[-1]
        last = self.sweep.members[-1].result.report.rows[-1]
        for column in BOUNDED_COLUMNS:
            low, high = sorted([first[column], last[column]])
            self.assertGreater(low, 0.0, column)
            self.assertLess(high / low, 10.0, column)
