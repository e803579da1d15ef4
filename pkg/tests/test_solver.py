import dataclasses
import math
import unittest
from unittest import mock

import numpy as np

from lichlab.errors import InvalidParams, PositivityViolated, SolverError
from lichlab.manifold import ModelManifold
from lichlab.params import Params
from lichlab.solver import (
    SolutionProfile, SolveStatus, SolverOptions, constant_root_scan, constant_solution, log_transform, observed_order,
    residual, solve_radial
)

BUBBLE = Params(n=4, mu=0.0, a=1.0, b=0.0, p=2.0, q=1.0)
BUBBLE_V0 = 2.0 * math.sqrt(2.0)

BUBBLE_3D = Params(n=3, mu=0.0, a=1.0, b=0.0, p=4.0, q=1.0)
# Δv + v^(3/2) = 0 in three dimensions has no positive entire solution
LIOUVILLE = Params(n=3, mu=0.0, a=1.0, b=0.0, p=0.5, q=1.0)


def bubble(r):
    """2√2/(1+r²) and its first two derivatives"""
    c = BUBBLE_V0
    d = 1.0 + r * r
    return c / d, -2.0 * c * r / d ** 2, c * (6.0 * r * r - 2.0) / d ** 3


def bubble_3d(r):
    """(1+r²/3)^(-1/2) and its derivative, solving Δv + v⁵ = 0 in three dimensions"""
    w = 1.0 + r * r / 3.0
    return w ** -0.5, -r / 3.0 * w ** -1.5


class TestClosedFormOracle(unittest.TestCase):
    def test_bubble_solves_the_equation(self):
        """Independent check of the closed form before it is used as a reference"""
        r = np.linspace(0.01, 5.0, 500)
        v, dv, ddv = bubble(r)
        lap = ddv + 3.0 / r * dv
        self.assertLess(np.max(np.abs(lap + v ** 3) / (1.0 + v ** 3)), 1e-12)

    def test_three_dimensional_bubble_solves_the_equation(self):
        r = np.linspace(0.01, 5.0, 500)
        v, dv = bubble_3d(r)
        w = 1.0 + r * r / 3.0
        ddv = -w ** -1.5 / 3.0 + r * r / 3.0 * w ** -2.5
        self.assertLess(np.max(np.abs(ddv + 2.0 / r * dv + v ** 5)), 1e-12)


class TestSolveRadial(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.m = ModelManifold(4)
        cls.profile = solve_radial(BUBBLE, cls.m, BUBBLE_V0, 5.0)

    def test_reproduces_bubble(self):
        self.assertIs(self.profile.status, SolveStatus.COMPLETE)
        self.assertIsNone(self.profile.r_stop)
        self.assertEqual(self.profile.r_end, 5.0)
        exact, exact_d1, _ = bubble(self.profile.grid)
        self.assertLess(np.max(np.abs(self.profile.v - exact) / exact), 1e-6)
        self.assertLess(np.max(np.abs(self.profile.dv - exact_d1)), 1e-6)
        self.assertLess(residual(self.profile), 1e-8)

    def test_grid_and_origin(self):
        self.assertEqual(self.profile.grid.size, 2001)
        self.assertEqual(self.profile.grid[0], 0.0)
        self.assertEqual(self.profile.v[0], BUBBLE_V0)
        self.assertEqual(self.profile.dv[0], 0.0)

    def test_observed_order_is_fourth(self):
        order = observed_order(BUBBLE, self.m, BUBBLE_V0, 5.0)
        self.assertGreater(order, 3.5)
        self.assertLess(order, 4.5)

    def test_observed_order_against_closed_form(self):
        """Step halving measured against the bubble itself, not another shot"""
        order = observed_order(BUBBLE, self.m, BUBBLE_V0, 5.0, exact=lambda r: bubble(r)[:2])
        self.assertGreater(order, 3.5)
        self.assertLess(order, 4.5)

    def test_observed_order_three_dimensional_bubble(self):
        order = observed_order(BUBBLE_3D, ModelManifold(3), 1.0, 5.0, exact=bubble_3d)
        self.assertGreater(order, 3.5)
        self.assertLess(order, 4.5)

    def test_loose_solve_shows_in_residual(self):
        loose = SolverOptions(rtol=1e-2, atol=1e-2)
        with mock.patch('lichlab.solver.log_message') as log:
            profile = solve_radial(BUBBLE_3D, ModelManifold(3), 1.0, 5.0, loose)
        self.assertGreater(residual(profile), 1e-6)
        warnings = [c for c in log.call_args_list if c[0][1] == 'warning']
        self.assertTrue(any('residual' in c[0][0] for c in warnings))

        tight = solve_radial(BUBBLE_3D, ModelManifold(3), 1.0, 5.0)
        self.assertLess(residual(tight), 1e-8)

    def test_residual_of_foreign_profile(self):
        """A profile that does not solve the equation is reported, not rejected"""
        grid = np.linspace(0.0, 1.0, 11)
        profile = SolutionProfile(grid, 1.0 + grid ** 2, 2.0 * grid, 2.0 + 0.0 * grid,
                                  Params(n=3, mu=0.0, a=1.0, b=0.0, p=1.0, q=1.0), ModelManifold(3))
        self.assertGreater(residual(profile), 1.0)

    def test_positivity_loss_is_data(self):
        """Δv + v² = 0 in three dimensions from v(0)=1 first vanishes near r* = 4.3529"""
        params = Params(n=3, mu=0.0, a=1.0, b=0.0, p=1.0, q=1.0)
        profile = solve_radial(params, ModelManifold(3), 1.0, 10.0)
        self.assertIs(profile.status, SolveStatus.POSITIVITY_LOST)
        self.assertAlmostEqual(profile.r_stop, 4.3529, places=3)
        self.assertAlmostEqual(profile.r_end, profile.r_stop, places=10)
        self.assertTrue(np.all(profile.v > 0))

    def test_liouville_case_loses_positivity_from_every_start(self):
        """No constant solution and every shot reaches zero at a finite radius"""
        self.assertIsNone(constant_solution(LIOUVILLE))
        stops = []
        for v0 in np.geomspace(0.1, 10.0, 10):
            profile = solve_radial(LIOUVILLE, ModelManifold(3), float(v0), 20.0)
            self.assertIs(profile.status, SolveStatus.POSITIVITY_LOST, v0)
            self.assertTrue(math.isfinite(profile.r_stop))
            self.assertLess(profile.r_stop, 20.0)
            stops.append(profile.r_stop)
        # r* scales like v0^(-p/2)
        self.assertTrue(all(a > b for a, b in zip(stops, stops[1:])))
        self.assertAlmostEqual(stops[0] / stops[-1], 100.0 ** 0.25, places=3)

    def test_blowup_is_data(self):
        params = Params(n=3, mu=0.0, a=-1.0, b=0.0, p=2.0, q=1.0)
        profile = solve_radial(params, ModelManifold(3), 10.0, 10.0, SolverOptions(v_ceil=1e4))
        self.assertIs(profile.status, SolveStatus.BLOWUP)
        self.assertLess(profile.r_stop, 10.0)

    def test_hyperbolic_background(self):
        params = Params(n=3, mu=0.0, a=-1.0, b=0.0, p=1.0, q=1.0, kappa=1.0)
        profile = solve_radial(params, ModelManifold(3, 1.0), 1.0, 2.0)
        self.assertIs(profile.status, SolveStatus.COMPLETE)
        self.assertTrue(np.all(np.diff(profile.v) >= 0))

    def test_invalid_input(self):
        with self.assertRaises(InvalidParams):
            solve_radial(BUBBLE, self.m, 0.0, 1.0)
        with self.assertRaises(InvalidParams):
            solve_radial(BUBBLE, self.m, 1.0, -1.0)
        with self.assertRaises(InvalidParams):
            solve_radial(BUBBLE, ModelManifold(3), 1.0, 1.0)
        with self.assertRaises(InvalidParams):
            SolverOptions(grid_points=2)


class TestConstantSolution(unittest.TestCase):
    def test_sign_change_root(self):
        params = Params(n=3, mu=-1.0, a=1.0, b=0.0, p=1.0, q=1.0)
        self.assertAlmostEqual(constant_solution(params), 1.0, places=12)

    def test_root_with_both_powers(self):
        # -t² + t^-6 = 0 at t = 1
        params = Params(n=4, mu=0.0, a=-1.0, b=1.0, p=2.0, q=6.0)
        self.assertAlmostEqual(constant_solution(params), 1.0, places=12)

    def test_tangential_root(self):
        # -2 + t + 1/t touches zero at t = 1
        params = Params(n=3, mu=-2.0, a=1.0, b=1.0, p=1.0, q=1.0)
        self.assertAlmostEqual(constant_solution(params), 1.0, places=6)

    def test_no_root(self):
        params = Params(n=4, mu=0.0, a=1.0, b=0.0, p=1.0, q=1.0)
        self.assertIsNone(constant_solution(params))

    def test_no_root_scan_is_logged(self):
        with mock.patch('lichlab.solver.log_message') as log:
            self.assertIsNone(constant_solution(LIOUVILLE))
        message, level = log.call_args[0]
        self.assertEqual(level, 'info')
        self.assertIn('sign +1 at both ends', message)

    def test_root_scan(self):
        scan = constant_root_scan(LIOUVILLE)
        np.testing.assert_allclose([scan.lower, scan.upper], [1e-10, 1e10], rtol=1e-12)
        self.assertEqual(scan.points, 2001)
        self.assertEqual((scan.sign_lower, scan.sign_upper), (1, 1))
        # g(t) = t^(1/2) comes closest to zero at the lower end
        self.assertAlmostEqual(scan.argmin / 1e-10, 1.0, places=12)
        self.assertAlmostEqual(scan.min_abs, 1e-5, delta=1e-15)
        self.assertEqual(set(scan.to_dict()), {'lower', 'upper', 'points', 'sign_lower', 'sign_upper', 'min_abs',
                                               'argmin'})

    def test_sign_change_scan(self):
        scan = constant_root_scan(Params(n=3, mu=-1.0, a=1.0, b=0.0, p=1.0, q=1.0))
        self.assertEqual((scan.sign_lower, scan.sign_upper), (-1, 1))

    def test_trivial_equation(self):
        params = Params(n=4, mu=0.0, a=0.0, b=0.0, p=1.0, q=1.0)
        self.assertEqual(constant_solution(params), 1.0)

    def test_constant_shot_stays_flat(self):
        params = Params(n=3, mu=-1.0, a=1.0, b=0.0, p=1.0, q=1.0)
        profile = solve_radial(params, ModelManifold(3), 1.0, 2.0)
        np.testing.assert_allclose(profile.v, 1.0, rtol=0, atol=1e-14)


class TestLogTransform(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.profile = solve_radial(BUBBLE, ModelManifold(4), BUBBLE_V0, 5.0)
        cls.lp = log_transform(cls.profile)

    def test_gradient_density_matches_closed_form(self):
        r = self.lp.grid
        np.testing.assert_allclose(self.lp.f, 4.0 * r ** 2 / (1.0 + r ** 2) ** 2, rtol=0, atol=1e-6)
        np.testing.assert_allclose(self.lp.u, -np.log(BUBBLE_V0 / (1.0 + r ** 2)), rtol=0, atol=1e-6)
        self.assertLess(self.lp.equation_residual, 1e-6)

    def test_reconstructs_v(self):
        np.testing.assert_allclose(self.lp.reconstruct_v(), self.profile.v, rtol=1e-12)

    def test_finite_difference_fallback(self):
        lp = log_transform(dataclasses.replace(self.profile, dddv=None))
        inner = slice(10, -10)
        np.testing.assert_allclose(lp.ddf[inner], self.lp.ddf[inner], rtol=0, atol=1e-3)

    def test_nonpositive_profile(self):
        v = self.profile.v.copy()
        v[100] = 0.0
        with self.assertRaises(PositivityViolated):
            log_transform(dataclasses.replace(self.profile, v=v))

    def test_strict_mode(self):
        broken = dataclasses.replace(self.profile, ddv=self.profile.ddv + 1.0)
        with self.assertRaises(SolverError):
            log_transform(broken, strict=True)
        self.assertGreater(log_transform(broken).equation_residual, 1e-6)

    def test_manual_profile(self):
        grid = np.linspace(0.0, 1.0, 5)
        ones = np.ones_like(grid)
        profile = SolutionProfile(grid, ones, 0 * grid, 0 * grid, Params(n=3, mu=0.0, a=0.0, b=0.0, p=1.0, q=1.0),
                                  ModelManifold(3))
        lp = log_transform(profile)
        self.assertEqual(float(np.max(lp.f)), 0.0)
        self.assertEqual(lp.equation_residual, 0.0)
