import numpy as np
from django.test import SimpleTestCase, override_settings

from common.choices import Growth, Verdict
from common.exceptions import DimensionMismatch, DivisionByZero, SymbolSyntaxError, UnknownIdentifier

from .expr import MatrixSymbol, MultiIndex, PhasePoint, SymbolExpr, multi_indices
from .parser import parse, parse_matrix, parse_symbol
from .scan import is_hermitian, points_per_axis, sup_scan


def _random_points(d, n=100, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-5.0, 5.0, size=(n, 2 * d))


class ParseTests(SimpleTestCase):
    def test_polynomial(self):
        f = parse("x^2 + xi^2", 1)
        self.assertEqual(f.evaluate((1, 1)), 2)

    def test_function_call(self):
        f = parse("cos(x) * xi", 1)
        self.assertAlmostEqual(f.evaluate((0, 3)), 3)

    def test_unknown_identifier(self):
        with self.assertRaises(UnknownIdentifier) as ctx:
            parse("x + q", 1)
        self.assertEqual(ctx.exception.name, "q")

    def test_indexed_variable_with_d1(self):
        with self.assertRaises(DimensionMismatch):
            parse("x2 + xi", 1)

    def test_unindexed_variable_with_d2(self):
        with self.assertRaises(DimensionMismatch):
            parse("x + xi1", 2)

    def test_syntax_error_has_position(self):
        with self.assertRaises(SymbolSyntaxError) as ctx:
            parse("x + * xi", 1)
        self.assertEqual(ctx.exception.position, 4)

    def test_unbalanced_parenthesis(self):
        with self.assertRaises(SymbolSyntaxError):
            parse("(x + xi", 1)

    def test_precedence(self):
        # ^ liga más fuerte que el menos unario, * más fuerte que +
        self.assertEqual(parse("-x^2", 1).evaluate((3, 0)), -9)
        self.assertEqual(parse("2*x + 1", 1).evaluate((3, 0)), 7)
        self.assertEqual(parse("8/2/2", 1).evaluate((0, 0)), 2)
        self.assertEqual(parse("1/x^2", 1).evaluate((2, 0)), 0.25)

    def test_negative_exponent_rejected(self):
        for text in ("x^-2", "x^+2", "x^1.5"):
            with self.subTest(text=text), self.assertRaises(SymbolSyntaxError) as ctx:
                parse(text, 1)
            self.assertEqual(ctx.exception.position, 2)

    def test_decimal_is_exact(self):
        f = parse("0.1*x", 1)
        self.assertEqual(f.to_text(), "x/10")

    def test_imaginary_literal(self):
        f = parse("2i*x", 1)
        self.assertEqual(f.evaluate((1.5, 0)), 3j)

    def test_matrix_symbol(self):
        F = parse_matrix("[[x, xi],[xi, x]]", 1)
        self.assertEqual(F.k, 2)
        np.testing.assert_allclose(F.evaluate((1, 2)), [[1, 2], [2, 1]])

    def test_non_square_matrix(self):
        with self.assertRaises(DimensionMismatch):
            parse_matrix("[[x, xi],[xi]]", 1)

    def test_parse_symbol_dispatch(self):
        self.assertIsInstance(parse_symbol("x", 1), SymbolExpr)
        self.assertIsInstance(parse_symbol(" [[x]]", 1), MatrixSymbol)


class PrintRoundTripTests(SimpleTestCase):
    CASES = [
        ("x^2 + xi^2", 1),
        ("sin(x)*cosh(xi) - 3/7*x^3", 1),
        ("exp(-x^2-xi^2)", 1),
        ("tanh(x1*xi2) + 0.25i*x2", 2),
        ("1/(1 + x^2) - 2.5*xi", 1),
    ]

    def test_reparse_evaluates_identically(self):
        for text, d in self.CASES:
            with self.subTest(text=text):
                f = parse(text, d)
                g = parse(f.to_text(), d)
                pts = _random_points(d)
                np.testing.assert_allclose(g.evaluate_grid(pts), f.evaluate_grid(pts), rtol=1e-14, atol=0)

    def test_float_shift_round_trip(self):
        f = parse("x^3 + xi", 1).shift((0.3, -1.7))
        g = parse(f.to_text(), 1)
        pts = _random_points(1)
        np.testing.assert_allclose(g.evaluate_grid(pts), f.evaluate_grid(pts), rtol=1e-13)


class EvaluateTests(SimpleTestCase):
    def test_cubic(self):
        self.assertEqual(parse("x^3 + xi^2", 1).evaluate((2, 1)), 9)

    def test_division_by_zero_reports_point(self):
        with self.assertRaises(DivisionByZero) as ctx:
            parse("1/x", 1).evaluate((0, 0))
        self.assertEqual(ctx.exception.point, (0.0, 0.0))

    def test_literal_division_by_zero(self):
        with self.assertRaises(DivisionByZero):
            parse("x/0", 1).evaluate((1, 1))

    def test_gaussian(self):
        self.assertEqual(parse("exp(-x^2-xi^2)", 1).evaluate((0, 0)), 1)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            parse("x", 1).evaluate((0, 0, 0, 0))

    def test_phase_point_rejects_odd_length(self):
        with self.assertRaises(DimensionMismatch):
            PhasePoint.of(1.0, 2.0, 3.0)


class DifferentiateTests(SimpleTestCase):
    def test_power_rule(self):
        g = parse("x^3", 1).differentiate(MultiIndex.of(2, 0))
        self.assertEqual(g.to_text(), "6*x")

    def test_counterexample_symbol(self):
        g = parse("xi^2 + x^3", 1).differentiate((1, 0))
        self.assertEqual(g.to_text(), "3*x^2")

    def test_periodicity(self):
        g = parse("cos(x)", 1).differentiate((4, 0))
        self.assertEqual(g.to_text(), "cos(x)")

    def test_linearity(self):
        f = parse("sin(x)*xi^2", 1)
        g = parse("exp(x)*cosh(xi)", 1)
        gamma = MultiIndex.of(1, 2)
        lhs = (2 * f + 3 * g).differentiate(gamma)
        rhs = 2 * f.differentiate(gamma) + 3 * g.differentiate(gamma)
        pts = _random_points(1)
        np.testing.assert_allclose(lhs.evaluate_grid(pts), rhs.evaluate_grid(pts), rtol=1e-12)

    def test_tanh_closed(self):
        g = parse("tanh(x)", 1).differentiate((3, 0))
        self.assertTrue(g.expr.has(parse("tanh(x)", 1).expr))

    def test_multi_indices_order(self):
        self.assertEqual([g.orders for g in multi_indices(1, 2)], [(2, 0), (1, 1), (0, 2)])
        self.assertEqual(len(multi_indices(2, 2)), 10)


class ShiftTests(SimpleTestCase):
    def test_substitution(self):
        g = parse("x", 1).shift((2, 5))
        self.assertEqual(g.to_text(), "x + 2")

    def test_composition(self):
        f = parse("sin(x)*xi^2 + x^3", 1)
        z, w = PhasePoint.of(0.5, -1.0), PhasePoint.of(2.0, 0.25)
        pts = _random_points(1)
        np.testing.assert_allclose(
            f.shift(z).shift(w).evaluate_grid(pts), f.shift(z + w).evaluate_grid(pts), rtol=1e-12
        )

    def test_linear_symbol(self):
        # alpha_z(w.R) = w.R + (w.z)
        f = parse("2*x + 3*xi", 1)
        g = f.shift((1.5, -0.5))
        pts = _random_points(1)
        np.testing.assert_allclose(g.evaluate_grid(pts), f.evaluate_grid(pts) + (2 * 1.5 - 3 * 0.5), rtol=1e-13)

    def test_evaluate_shift(self):
        f = parse("cos(x)*exp(xi)", 1)
        z = PhasePoint.of(0.3, 0.7)
        w = PhasePoint.of(-1.1, 0.2)
        self.assertAlmostEqual(f.shift(z).evaluate(w), f.evaluate(w + z), places=13)

    def test_commutes_with_derivative(self):
        f = parse("sin(x)*xi^3", 1)
        z, gamma = PhasePoint.of(1.0, 2.0), MultiIndex.of(1, 1)
        pts = _random_points(1)
        np.testing.assert_allclose(
            f.shift(z).differentiate(gamma).evaluate_grid(pts),
            f.differentiate(gamma).shift(z).evaluate_grid(pts),
            rtol=1e-12,
        )

    def test_matrix_shift(self):
        F = parse_matrix("[[x, xi],[xi, x]]", 1).shift((1, 0))
        np.testing.assert_allclose(F.evaluate((0, 0)), [[1, 0], [0, 1]])


class SupScanTests(SimpleTestCase):
    def test_linear_growth(self):
        est = sup_scan(parse("6*x", 1), [1, 10, 100])
        np.testing.assert_allclose(est.sups, [6, 60, 600])
        self.assertEqual(est.verdict, Growth.GROWING)

    def test_bounded(self):
        est = sup_scan(parse("cos(x)", 1), [1, 10, 100])
        self.assertTrue(all(s <= 1.0 + 1e-12 for s in est.sups))
        self.assertEqual(est.verdict, Growth.BOUNDED)

    def test_constant(self):
        est = sup_scan(parse("2", 1), [1, 10])
        self.assertEqual(est.sups, (2.0, 2.0))
        self.assertEqual(est.verdict, Growth.BOUNDED)

    def test_single_box_inconclusive(self):
        self.assertEqual(sup_scan(parse("x", 1), [1]).verdict, Growth.INCONCLUSIVE)

    def test_sups_non_decreasing(self):
        est = sup_scan(parse("sin(3*x)*xi", 1), [0.5, 1, 2, 4], points=51)
        self.assertEqual(list(est.sups), sorted(est.sups))

    def test_rejects_non_increasing_schedule(self):
        with self.assertRaises(ValueError):
            sup_scan(parse("x", 1), [10, 1])

    def test_grid_clamp(self):
        self.assertEqual(points_per_axis(201, 1, 10_000_000), 201)
        self.assertLessEqual(points_per_axis(201, 2, 10_000_000) ** 4, 10_000_000)
        self.assertEqual(points_per_axis(201, 2, 10_000_000) % 2, 1)

    def test_matrix_uses_operator_norm(self):
        est = sup_scan(parse_matrix("[[1, 0],[0, 2]]", 1), [1, 2])
        self.assertAlmostEqual(est.sups[-1], 2.0)

    @override_settings(WEYL_LAB_CHUNK_POINTS=97)
    def test_independent_of_workers(self):
        from common.parallel import set_workers

        f = parse("sin(x)*xi + x^2", 1)
        try:
            set_workers(1)
            serial = sup_scan(f, [1, 3], points=101)
            set_workers(4)
            parallel = sup_scan(f, [1, 3], points=101)
        finally:
            set_workers(None)
        self.assertEqual(serial.sups, parallel.sups)


class HermitianTests(SimpleTestCase):
    def test_real_scalar(self):
        check = is_hermitian(parse("x^2 + xi^2", 1))
        self.assertEqual(check.verdict, Verdict.PASS)
        self.assertEqual(check.deviation, 0.0)

    def test_real_symmetric_matrix(self):
        self.assertEqual(is_hermitian(parse_matrix("[[x, xi],[xi, x]]", 1)).verdict, Verdict.PASS)

    def test_complex_hermitian_matrix(self):
        F = parse_matrix("[[x, 1i*xi],[-1i*xi, x]]", 1)
        self.assertEqual(is_hermitian(F).verdict, Verdict.PASS)

    def test_imaginary_scalar_grows(self):
        f = parse("1i*x", 1)
        small, large = is_hermitian(f, L=1), is_hermitian(f, L=10)
        self.assertEqual(small.verdict, Verdict.FAIL)
        self.assertGreater(large.deviation, small.deviation)
