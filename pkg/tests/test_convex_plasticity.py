"""Tests for the admissible set, its projection and the Yosida map."""

from unittest import TestCase

from hypothesis import (
    given,
    settings,
    strategies as st,
)
from hypothesis.extra.numpy import arrays
import numpy as np

from thermoplast.convex_plasticity import (
    YieldSurface,
    YosidaParam,
    dissipation,
    in_K,
    phi,
    project_K,
    truncate,
    truncate_derivative,
    yosida,
    yosida_energy,
)
from thermoplast.errors import NonPositiveParameterError
from thermoplast.tensors import (
    IDENTITY,
    deviator,
    inner,
    norm,
    sym_tensor,
    trace,
)

from .utils import random_tensors


components = arrays(
    np.float64,
    (6,),
    elements=st.floats(-10.0, 10.0, allow_nan=False),
)


class ProjectionTestCase(TestCase):

    def setUp(self):
        self.ys = YieldSurface(1.0)

    def test_admissible_tensors_are_fixed(self):
        inside = deviator(random_tensors(100)) / 10.0 + IDENTITY
        self.assertTrue(np.all(in_K(inside, self.ys)))
        self.assertTrue(np.allclose(project_K(inside, self.ys), inside))

    def test_projection_lands_on_the_surface(self):
        T = random_tensors(200, scale=5.0)
        outside = ~in_K(T, self.ys)
        projected = project_K(T, self.ys)
        self.assertTrue(np.allclose(
            norm(deviator(projected[outside])), self.ys.k,
        ))

    def test_projection_keeps_spherical_part(self):
        T = random_tensors(50, scale=5.0)
        self.assertTrue(np.allclose(trace(project_K(T, self.ys)), trace(T)))

    @given(components, components)
    def test_projection_is_nonexpansive(self, a, b):
        change = norm(project_K(a, self.ys) - project_K(b, self.ys))
        self.assertLessEqual(float(change), float(norm(a - b)) + 1e-9)

    @given(components)
    def test_variational_inequality(self, T):
        """(T - P T) : (S - P T) <= 0 for every S in K."""
        projected = project_K(T, self.ys)
        S = 0.9 * deviator(random_tensors(20)) / 10.0 + 2.0 * IDENTITY
        pairing = inner(T - projected, S - projected)
        self.assertTrue(np.all(pairing <= 1e-9))

    def test_zero_deviator_is_finite(self):
        T = 4.0 * IDENTITY
        self.assertTrue(np.all(np.isfinite(project_K(T, self.ys))))
        self.assertTrue(np.all(yosida(T, self.ys, YosidaParam(0.1)) == 0.0))

    def test_yield_limit_must_be_positive(self):
        with self.assertRaises(NonPositiveParameterError):
            YieldSurface(0.0)


class YosidaTestCase(TestCase):

    def setUp(self):
        self.ys = YieldSurface(1.0)
        self.yp = YosidaParam(0.5)

    def test_vanishes_in_K(self):
        T = sym_tensor(xy=0.5)
        self.assertTrue(np.all(yosida(T, self.ys, self.yp) == 0.0))

    def test_matches_resolvent_identity(self):
        T = random_tensors(500, scale=4.0)
        expected = (T - project_K(T, self.ys)) / (2.0 * self.yp.lam)
        self.assertTrue(np.allclose(yosida(T, self.ys, self.yp), expected))

    def test_is_traceless(self):
        T = random_tensors(500, scale=4.0)
        self.assertTrue(np.allclose(trace(yosida(T, self.ys, self.yp)), 0.0))

    @settings(max_examples=200)
    @given(components, components)
    def test_is_monotone(self, a, b):
        pairing = inner(
            yosida(a, self.ys, self.yp) - yosida(b, self.ys, self.yp), a - b,
        )
        self.assertGreaterEqual(float(pairing), -1e-9)

    @settings(max_examples=200)
    @given(components, components)
    def test_is_lipschitz(self, a, b):
        change = norm(
            yosida(a, self.ys, self.yp) - yosida(b, self.ys, self.yp)
        )
        bound = float(norm(a - b)) / (2.0 * self.yp.lam)
        self.assertLessEqual(float(change), bound * (1.0 + 1e-10) + 1e-12)

    def test_dissipation_closed_form(self):
        T = random_tensors(300, scale=4.0)
        self.assertTrue(np.allclose(
            dissipation(T, self.ys, self.yp),
            inner(yosida(T, self.ys, self.yp), T),
        ))
        self.assertTrue(np.all(dissipation(T, self.ys, self.yp) >= 0.0))

    def test_energy_gradient_is_yosida(self):
        T = random_tensors(20, scale=4.0)
        step = 1e-6
        gradient = np.zeros_like(T)
        for component in range(6):
            offset = np.zeros(6)
            # Off-diagonal entries appear twice in the contraction.
            offset[component] = step / (1.0 if component < 3 else 2.0)
            gradient[:, component] = (
                yosida_energy(T + offset, self.ys, self.yp)
                - yosida_energy(T - offset, self.ys, self.yp)
            ) / (2.0 * step)
        self.assertTrue(np.allclose(
            gradient, yosida(T, self.ys, self.yp), atol=1e-5,
        ))

    def test_smaller_lambda_is_steeper(self):
        T = sym_tensor(xy=3.0)
        coarse = norm(yosida(T, self.ys, YosidaParam(0.5)))
        fine = norm(yosida(T, self.ys, YosidaParam(0.05)))
        self.assertAlmostEqual(float(fine / coarse), 10.0)

    def test_truncation_height(self):
        self.assertEqual(YosidaParam(0.25).truncation_height, 4.0)

    def test_lambda_must_be_positive(self):
        with self.assertRaises(NonPositiveParameterError):
            YosidaParam(-1.0)


class TruncationTestCase(TestCase):

    @given(st.floats(-1e6, 1e6), st.floats(0.1, 100.0))
    def test_truncate_is_bounded_and_odd(self, r, K):
        self.assertLessEqual(abs(float(truncate(r, K))), K)
        self.assertEqual(float(truncate(-r, K)), -float(truncate(r, K)))

    @given(st.floats(-1e3, 1e3), st.floats(0.1, 100.0))
    def test_truncate_is_idempotent(self, r, K):
        once = truncate(r, K)
        self.assertEqual(float(truncate(once, K)), float(once))

    def test_phi_is_antiderivative(self):
        K = 2.0
        r = np.linspace(-6.0, 6.0, 97)
        step = 1e-6
        slope = (phi(r + step, K) - phi(r - step, K)) / (2.0 * step)
        self.assertTrue(np.allclose(slope, truncate(r, K), atol=1e-6))
        self.assertTrue(np.all(phi(r, K) >= 0.0))
        self.assertEqual(float(phi(0.0, K)), 0.0)

    def test_phi_grows_linearly_beyond_K(self):
        self.assertAlmostEqual(float(phi(5.0, 2.0)), 2.0 + 2.0 * 3.0)

    def test_derivative_vanishes_outside(self):
        r = np.array([-3.0, -1.0, 0.0, 1.0, 3.0])
        self.assertTrue(np.array_equal(
            truncate_derivative(r, 2.0), [0.0, 1.0, 1.0, 1.0, 0.0],
        ))
