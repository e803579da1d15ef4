import math
import unittest

import numpy as np

from lichlab.errors import DimensionTooSmall, GridMismatch, InvalidParams, NegativeRadius, OriginSingularity
from lichlab.manifold import (
    ManifoldKind, ModelManifold, ball_integral, ball_volume, integrate_sampled, mean_curvature_coeff,
    mean_curvature_coeff_derivative, scalar_curvature, sphere_area, warp, warp_derivative
)


class TestModelManifold(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(DimensionTooSmall):
            ModelManifold(2)
        with self.assertRaises(InvalidParams):
            ModelManifold(3, -1.0)
        self.assertIs(ModelManifold(3).kind, ManifoldKind.EUCLIDEAN)
        self.assertIs(ModelManifold(3, 0.5).kind, ManifoldKind.HYPERBOLIC)

    def test_warp(self):
        flat = ModelManifold(3)
        hyp = ModelManifold(3, 4.0)
        self.assertEqual(warp(flat, 1.5), 1.5)
        self.assertAlmostEqual(warp(hyp, 1.0), math.sinh(2.0) / 2.0, places=14)
        self.assertAlmostEqual(warp_derivative(hyp, 1.0), math.cosh(2.0), places=13)
        np.testing.assert_array_equal(warp_derivative(flat, np.array([0.0, 2.0])), [1.0, 1.0])

    def test_negative_radius(self):
        with self.assertRaises(NegativeRadius):
            warp(ModelManifold(3), -0.1)

    def test_mean_curvature_coefficient(self):
        flat = ModelManifold(4)
        hyp = ModelManifold(4, 1.0)
        self.assertAlmostEqual(mean_curvature_coeff(flat, 0.5), 6.0, places=14)
        self.assertAlmostEqual(mean_curvature_coeff(hyp, 1.0), 3.0 / math.tanh(1.0), places=13)
        with self.assertRaises(OriginSingularity):
            mean_curvature_coeff(flat, 0.0)
        with self.assertRaises(OriginSingularity):
            mean_curvature_coeff_derivative(hyp, np.array([0.0, 1.0]))

    def test_coefficient_derivative_matches_differences(self):
        r = np.linspace(0.2, 3.0, 50)
        step = 1e-5
        for m in (ModelManifold(3), ModelManifold(5, 2.0)):
            numeric = (mean_curvature_coeff(m, r + step) - mean_curvature_coeff(m, r - step)) / (2 * step)
            np.testing.assert_allclose(mean_curvature_coeff_derivative(m, r), numeric, rtol=1e-6)

    def test_scalar_curvature(self):
        self.assertEqual(scalar_curvature(ModelManifold(3, 1.0)), -6.0)
        flat = scalar_curvature(ModelManifold(4))
        self.assertEqual(flat, 0.0)
        self.assertEqual(math.copysign(1.0, flat), 1.0)


class TestIntegration(unittest.TestCase):
    def test_sphere_area(self):
        self.assertAlmostEqual(sphere_area(3), 4.0 * math.pi, places=12)
        self.assertAlmostEqual(sphere_area(4), 2.0 * math.pi ** 2, places=12)

    def test_ball_volume(self):
        self.assertAlmostEqual(ball_volume(ModelManifold(3), 1.0), 4.0 * math.pi / 3.0, places=12)
        self.assertEqual(ball_volume(ModelManifold(3), 0.0), 0.0)
        exact = 4.0 * math.pi * (math.sinh(2.0) / 4.0 - 0.5)
        self.assertLess(abs(ball_volume(ModelManifold(3, 1.0), 1.0) - exact), 1e-10 * exact)

    def test_callable_integral_matches_volume(self):
        for m in (ModelManifold(3), ModelManifold(4, 1.0)):
            value = ball_integral(m, lambda t: np.ones_like(t), 1.3)
            self.assertLess(abs(value - ball_volume(m, 1.3)), 1e-8 * ball_volume(m, 1.3))

    def test_sampled_integral_with_partial_cell(self):
        m = ModelManifold(3)
        grid = np.linspace(0.0, 2.0, 2001)
        r = 1.3004  # between nodes
        exact = 4.0 * math.pi * r ** 5 / 5.0
        value = ball_integral(m, grid ** 2, r, grid)
        self.assertLess(abs(value - exact), 1e-8 * exact)

    def test_sampled_integral_errors(self):
        grid = np.linspace(0.0, 1.0, 11)
        with self.assertRaises(GridMismatch):
            integrate_sampled(grid, np.ones(10), 0.5)
        with self.assertRaises(GridMismatch):
            integrate_sampled(grid, np.ones(11), 1.5)
        with self.assertRaises(GridMismatch):
            integrate_sampled(grid + 0.1, np.ones(11), 0.5)
        with self.assertRaises(GridMismatch):
            ball_integral(ModelManifold(3), np.ones(11), 0.5)

    def test_zero_radius(self):
        grid = np.linspace(0.0, 1.0, 11)
        self.assertEqual(integrate_sampled(grid, np.ones(11), 0.0), 0.0)
