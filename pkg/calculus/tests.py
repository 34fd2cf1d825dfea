from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from common.choices import Verdict
from common.exceptions import DimensionMismatch, InsufficientSamples
from fock.matrices import FockMatrix
from fock.quantize import QuadratureConfig, default_half_width, quantize, quantize_monomial
from symbols.expr import PhasePoint
from symbols.parser import parse

from .derivatives import covariance_residual, form_derivative, intertwining_residual, nested_derivative
from .oscillation import LOWER_BOUND_CAVEAT, OscillationProfile, criterion_fit, default_shifts, oscillation_profile


class FormDerivativeTests(SimpleTestCase):
    def test_identity_has_zero_derivative(self):
        A = FockMatrix(np.eye(16), 16)
        D = form_derivative(A, (0.3, -1.2))
        self.assertEqual(np.max(np.abs(D.entries)), 0.0)

    def test_position_derivative_is_identity(self):
        N = 64
        D = form_derivative(quantize_monomial((1,), (0,), N), PhasePoint.axis(1, 0, 1.0))
        block = D.entries[: N // 2, : N // 2]
        self.assertLess(np.max(np.abs(block - np.eye(N // 2))), 1e-8)

    def test_square_derivative(self):
        N = 64
        D = form_derivative(quantize(parse("x^2", 1), N), (1.0, 0.0))
        ref = quantize(parse("2*x", 1), N).entries
        self.assertLess(np.max(np.abs((D.entries - ref)[: N // 2, : N // 2])), 1e-8)

    def test_linear_in_both_arguments(self):
        N = 24
        A = quantize(parse("x^2*xi", 1), N)
        B = quantize(parse("xi^3 + x", 1), N)
        w, v = PhasePoint.of(0.5, 1.5), PhasePoint.of(-2.0, 0.25)
        lhs = form_derivative(A + 2 * B, w + v).entries
        rhs = sum(
            form_derivative(M, d).entries * c
            for M, c in ((A, 1), (B, 2))
            for d in (w, v)
        )
        self.assertLess(np.max(np.abs(lhs - rhs)), 1e-12 * max(1.0, np.max(np.abs(lhs))))

    def test_mixed_derivatives_commute(self):
        N = 48
        A = quantize(parse("x^3*xi^2", 1), N)
        xy = form_derivative(form_derivative(A, (1, 0)), (0, 1)).entries
        yx = form_derivative(form_derivative(A, (0, 1)), (1, 0)).entries
        self.assertLess(np.max(np.abs((xy - yx)[: N // 2, : N // 2])), 1e-8)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            form_derivative(FockMatrix(np.eye(4), 4), (1, 0, 0, 0))

    def test_nested_derivative_order_zero(self):
        A = quantize(parse("x", 1), 8)
        np.testing.assert_array_equal(nested_derivative(A, (0, 0)).entries, A.entries)


class IntertwiningTests(SimpleTestCase):
    def test_polynomial(self):
        self.assertLessEqual(intertwining_residual(parse("x^2", 1), (1, 0), 64, 16), 1e-8)

    def test_cosine_plus_kinetic(self):
        self.assertLessEqual(intertwining_residual(parse("cos(x) + xi^2", 1), (1, 0), 96, 24), 1e-4)

    def test_constant(self):
        self.assertLessEqual(intertwining_residual(parse("3", 1), (1, 1), 32, 16), 1e-12)

    def test_non_increasing_in_N(self):
        f = parse("x^2*xi + xi^3", 1)
        residuals = [intertwining_residual(f, (1, 1), N, 8) for N in (32, 64, 128)]
        for a, b in zip(residuals, residuals[1:]):
            self.assertLessEqual(b, a + 1e-10)

    def test_requires_trusted_block(self):
        with self.assertRaises(DimensionMismatch):
            intertwining_residual(parse("x", 1), (1, 0), 16, 9)


class CovarianceTests(SimpleTestCase):
    def test_linear_symbol(self):
        for a in (-1.0, 0.5, 1.0):
            with self.subTest(a=a):
                self.assertLessEqual(covariance_residual(parse("x", 1), (a, 0.0), 128, 16), 1e-6)

    def test_constant(self):
        self.assertLessEqual(covariance_residual(parse("1", 1), (0.7, -1.1), 32, 16), 1e-10)

    def test_harmonic(self):
        f = parse("x^2 + xi^2", 1)
        for z in [(1.0, 0.0), (0.6, -0.8), (0.0, 1.0)]:
            with self.subTest(z=z):
                self.assertLessEqual(covariance_residual(f, z, 128, 16), 1e-4)

    def test_zero_shift_is_exact(self):
        self.assertEqual(covariance_residual(parse("x^2 + xi^2", 1), (0.0, 0.0), 32, 16), 0.0)
        self.assertEqual(covariance_residual(parse("cos(x)", 1), (0.0, 0.0), 16, 8), 0.0)


class OscillationTests(SimpleTestCase):
    def test_default_shifts(self):
        shifts = default_shifts(1, [1, 2, 4, 8])
        self.assertEqual(len(shifts), 9)
        self.assertEqual(shifts[0], PhasePoint.zero(1))

    def test_harmonic_closed_form(self):
        profile = oscillation_profile(parse("x^2 + xi^2", 1), 1, refine=False)
        self.assertEqual(profile.norms[0], 0.0)
        for z, n in zip(profile.shifts, profile.norms):
            if z.xi[0] == 0.0:
                self.assertAlmostEqual(n, 2 * abs(z.x[0]), delta=1e-8)
            else:
                self.assertEqual(n, 0.0)

    def test_harmonic_passes(self):
        verdict = criterion_fit(oscillation_profile(parse("x^2 + xi^2", 1), 1))
        self.assertEqual(verdict.verdict, Verdict.PASS)
        self.assertGreaterEqual(verdict.c_estimate, 1.6)
        self.assertLessEqual(verdict.c_estimate, 2.0)
        self.assertIn(LOWER_BOUND_CAVEAT, verdict.caveats)

    def test_linear_symbol_is_zero(self):
        verdict = criterion_fit(oscillation_profile(parse("2*x + 3*xi", 1), 2))
        self.assertEqual(verdict.verdict, Verdict.PASS)
        self.assertEqual(verdict.c_estimate, 0.0)

    def test_cubic_fails(self):
        verdict = criterion_fit(oscillation_profile(parse("xi^2 + x^3", 1), 1))
        self.assertEqual(verdict.verdict, Verdict.FAIL)
        self.assertGreater(verdict.refined_c_estimate, verdict.c_estimate * 1.05)

    def test_insufficient_samples(self):
        profile = oscillation_profile(parse("x^2", 1), 1, shifts=[(0, 0), (1, 0), (2, 0)], refine=False)
        with self.assertRaises(InsufficientSamples):
            criterion_fit(profile)

    def test_serialization(self):
        profile = OscillationProfile(1, (PhasePoint.zero(1),), (0.0,), 8, 4)
        payload = profile.as_dict()
        self.assertEqual(payload["direction"], 1)
        self.assertEqual(payload["shifts"], [[0.0, 0.0]])
        self.assertIsNone(payload["refined_norms"])

    def test_max_ratio_is_largest_norm_over_shift(self):
        verdict = criterion_fit(oscillation_profile(parse("x^2 + xi^2", 1), 1, refine=False))
        self.assertEqual(verdict.max_ratio, max(row["ratio"] for row in verdict.evidence))
        self.assertAlmostEqual(verdict.max_ratio, 16.0 / 9.0, delta=1e-8)

    def test_max_ratio_includes_refined_norms(self):
        verdict = criterion_fit(oscillation_profile(parse("xi^2 + x^3", 1), 1))
        self.assertEqual(verdict.max_ratio, verdict.refined_c_estimate)

    def test_refined_profile_keeps_quadrature_config(self):
        cfg = QuadratureConfig.default_for(8, xi_points=2048)
        with mock.patch("calculus.oscillation.quantize", wraps=quantize) as spy:
            oscillation_profile(parse("cos(x)", 1), 1, shifts=[(0, 0), (1, 0)], N=8, M=4, cfg=cfg)
        refined = [c.args[3] for c in spy.call_args_list if c.args[1] == 16]
        self.assertEqual(len(refined), 2)
        for used in refined:
            self.assertEqual(used.xi_points, 2048)
            self.assertGreaterEqual(used.R_x, default_half_width(16))
