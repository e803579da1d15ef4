import dataclasses
import math
import unittest

import numpy as np

from lichlab.errors import DomainTooSmall, InvalidIota, InvalidParams, OutOfRegime
from lichlab.manifold import ModelManifold
from lichlab.params import ChainBranch, Params, build_constant_chain
from lichlab.solver import SolveStatus, log_transform, solve_radial
from lichlab.verifier import (
    LemmaId, check_gradient_bound, check_lemma_2_1, check_lemma_2_2, check_lemma_2_3, check_lemma_4_1,
    empirical_constant, lhs_identity_gap, verify_profile
)

# (n, mu, a, b, p, q, kappa, v0, R_max) spanning both exponent cases and the negative-mu bound
INSTANCES = [
    (4, 0.0, -1.0, 0.0, 2.0, 1.0, 0.0, 0.5, 2.0),
    (3, 0.0, -1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0),
    (3, 0.0, -1.0, 1.0, 1.0, 2.0, 0.0, 2.0, 1.0),
    (3, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 2.0),
    (4, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.5),
    (5, 0.0, 1.0, 0.0, 0.8, 1.0, 0.0, 1.0, 1.0),
    (3, 0.0, -1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0),
    (4, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0),
    (4, -0.5, 1.0, 2.0, 0.5, 1.0, 0.0, 1.0, 1.0),
    (4, -0.5, 1.0, 2.0, 0.5, 1.0, 1.0, 1.0, 1.0),
]


def solved(n, mu, a, b, p, q, kappa, v0, R_max):
    params = Params(n=n, mu=mu, a=a, b=b, p=p, q=q, kappa=kappa, R=R_max)
    profile = solve_radial(params, ModelManifold(n, kappa), v0, R_max)
    return params, profile


def corrupted(lp, seed=0):
    """f scaled by independent noise with derivatives rebuilt from the noisy samples"""
    rng = np.random.default_rng(seed)
    f = lp.f * (1.0 + 0.5 * rng.uniform(-1.0, 1.0, lp.f.size))
    df = np.gradient(f, lp.grid, edge_order=2)
    ddf = np.gradient(df, lp.grid, edge_order=2)
    return dataclasses.replace(lp, f=f, df=df, ddf=ddf)


class TestPointwiseChecks(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cases = []
        for instance in INSTANCES:
            params, profile = solved(*instance)
            cls.cases.append((params, profile, log_transform(profile)))

    def test_instances_are_complete(self):
        for params, profile, _ in self.cases:
            with self.subTest(params=params):
                self.assertIs(profile.status, SolveStatus.COMPLETE)

    def test_every_check_passes(self):
        for params, _, lp in self.cases:
            with self.subTest(params=params):
                result = verify_profile(lp, params, c_n=1.0)
                self.assertIsNotNone(result.chain)
                self.assertTrue(result.passed)
                self.assertGreaterEqual(result.worst_margin, -1e-6)
                ids = [r.lemma_id for r in result.reports]
                self.assertIn(LemmaId.L2_1, ids)
                expected = LemmaId.L4_1 if params.mu < 0 else LemmaId.L2_3
                self.assertIn(expected, ids)
                for report in result.reports:
                    self.assertGreater(report.points_checked, 0)

    def test_reduced_forms_ride_along(self):
        params, _, lp = self.cases[0]
        chain = build_constant_chain(params, 1.0)
        report = check_lemma_2_3(lp, params, chain)
        self.assertEqual([s.lemma_id for s in report.sub_reports], [LemmaId.L2_2_CASE1, LemmaId.L2_2_CASE2])
        self.assertTrue(all(s.passed for s in report.sub_reports))

    def test_corrupted_profiles_fail(self):
        for params, _, lp in self.cases[:3]:
            with self.subTest(params=params):
                bad = corrupted(lp)
                self.assertFalse(check_lemma_2_1(lp=bad, params=params, iota=1.0).passed)
                chain = build_constant_chain(params, 1.0)
                self.assertFalse(check_lemma_2_3(bad, params, chain).passed)

    def test_lhs_identity(self):
        for params, _, lp in self.cases:
            for iota in (1.0, 2.0, 5.0):
                self.assertLess(lhs_identity_gap(lp, iota), 1e-10)

    def test_regime_guards(self):
        params, _, lp = self.cases[0]
        negative_params, _, negative_lp = self.cases[8]
        negative_chain = build_constant_chain(negative_params, 1.0)
        self.assertIs(negative_chain.branch, ChainBranch.NEGATIVE_MU)
        with self.assertRaises(OutOfRegime):
            check_lemma_4_1(lp, params, build_constant_chain(params, 1.0))
        with self.assertRaises(OutOfRegime):
            check_lemma_2_3(negative_lp, negative_params, negative_chain)
        with self.assertRaises(OutOfRegime):
            check_lemma_2_2(negative_lp, negative_params, 1.0, 1)
        with self.assertRaises(InvalidParams):
            check_lemma_2_2(lp, params, 1.0, 3)
        with self.assertRaises(InvalidIota):
            check_lemma_2_1(lp, params, 0.5)

    def test_report_dict(self):
        params, _, lp = self.cases[0]
        data = verify_profile(lp, params, c_n=1.0).to_dict()
        self.assertTrue(data['passed'])
        self.assertEqual(data['constant_chain']['branch'], 'nonnegative_mu')
        self.assertEqual(data['checks'][-1]['lemma_id'], 'L2_1')


class TestVacuousAndUnknown(unittest.TestCase):
    def test_constant_solution_is_vacuous(self):
        params, profile = solved(3, -1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0)
        result = verify_profile(log_transform(profile), params, c_n=1.0)
        self.assertIsNone(result.chain)
        self.assertTrue(result.notes)
        self.assertTrue(result.passed)
        self.assertEqual(result.reports[0].points_checked, 0)
        self.assertEqual(result.reports[0].worst_margin, 0.0)

    def test_outside_every_regime_checks_full_bound(self):
        params, profile = solved(4, 0.0, 1.0, 0.0, 2.0, 1.0, 0.0, 2.0 * math.sqrt(2.0), 3.0)
        result = verify_profile(log_transform(profile), params, c_n=1.0)
        self.assertIsNone(result.chain)
        self.assertEqual([r.lemma_id for r in result.reports], [LemmaId.L2_1])
        self.assertTrue(result.passed)


class TestGradientBound(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        params = Params(n=4, mu=0.0, a=1.0, b=0.0, p=2.0, q=1.0)
        profile = solve_radial(params, ModelManifold(4), 2.0 * math.sqrt(2.0), 16.0)
        cls.lp = log_transform(profile)

    def test_bubble_constant(self):
        """sup over B_1 of 4r²/(1+r²)² is 1, reached at r = 1"""
        self.assertAlmostEqual(empirical_constant(self.lp, 2.0, 0.0), 4.0, places=6)
        self.assertTrue(check_gradient_bound(self.lp, 2.0, 0.0, 4.1).passed)
        self.assertFalse(check_gradient_bound(self.lp, 2.0, 0.0, 3.9).passed)

    def test_scaling_with_radius(self):
        radii = [2.0, 4.0, 8.0, 16.0, 32.0]
        constants = [empirical_constant(self.lp, R, 0.0) for R in radii]
        sup = constants[0] / 4.0
        for R, c in zip(radii, constants):
            self.assertAlmostEqual(c / R ** 2, sup, places=12)

    def test_curvature_factor(self):
        flat = empirical_constant(self.lp, 2.0, 0.0)
        self.assertAlmostEqual(empirical_constant(self.lp, 2.0, 1.0), flat / 9.0, places=12)

    def test_domain_too_small(self):
        with self.assertRaises(DomainTooSmall):
            empirical_constant(self.lp, 40.0, 0.0)
        with self.assertRaises(InvalidParams):
            check_gradient_bound(self.lp, 2.0, 0.0, 0.0)

    def test_constant_solution_constant_is_zero(self):
        params, profile = solved(3, -1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 2.0)
        self.assertEqual(empirical_constant(log_transform(profile), 2.0, 0.0), 0.0)
