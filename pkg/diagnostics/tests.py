import csv
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, TestCase

from bargmann.heat import SampledSymbol
from common.choices import BoundaryCondition, Verdict
from common.exceptions import InvalidConfig, Unconverged
from symbols.parser import parse, parse_matrix

from .criteria import aggregate, check_oscillation_criterion, check_simple_criterion, cv_bound_check, has_plateau
from .mnorm import m_infty_one_norm
from .models import DiagnosticRun
from .report import SCHEMA, build_report, schrodinger_potential
from .spectra import BC_COLUMNS, bc_sensitivity, quantized_spectrum, richardson_eigenvalues


class AggregateTests(SimpleTestCase):
    def test_rules(self):
        self.assertEqual(aggregate([Verdict.PASS, Verdict.PASS]), Verdict.PASS)
        self.assertEqual(aggregate([Verdict.PASS, Verdict.FAIL, Verdict.INCONCLUSIVE]), Verdict.FAIL)
        self.assertEqual(aggregate([Verdict.PASS, Verdict.INCONCLUSIVE]), Verdict.INCONCLUSIVE)
        self.assertEqual(aggregate([]), Verdict.INCONCLUSIVE)

    def test_plateau(self):
        self.assertTrue(has_plateau([0.9, 0.99, 1.0], 0.02))
        self.assertFalse(has_plateau([4.0, 5.6, 8.0], 0.02))
        self.assertTrue(has_plateau([0.0, 0.0], 0.02))


class SimpleCriterionTests(SimpleTestCase):
    def test_cubic_potential_fails_with_witness(self):
        report = check_simple_criterion(parse("xi^2 + x^3", 1))
        self.assertEqual(report.verdict, Verdict.FAIL)
        self.assertEqual(report.evidence["witness"], [2, 0])

    def test_harmonic_passes(self):
        self.assertEqual(check_simple_criterion(parse("x^2 + xi^2", 1)).verdict, Verdict.PASS)

    def test_cosine_plus_kinetic_passes(self):
        report = check_simple_criterion(parse("cos(x) + xi^2", 1))
        self.assertEqual(report.verdict, Verdict.PASS)
        self.assertEqual(report.evidence["orders"], [2, 5])
        self.assertEqual(len(report.evidence["table"]), 3 + 4 + 5 + 6)

    def test_product_fails(self):
        self.assertEqual(check_simple_criterion(parse("x^2*xi^2", 1)).verdict, Verdict.FAIL)

    def test_singular_symbol_is_inconclusive(self):
        report = check_simple_criterion(parse("xi^2 + 1/x", 1))
        self.assertEqual(report.verdict, Verdict.INCONCLUSIVE)
        self.assertTrue(report.reasons)


class OscillationCriterionTests(SimpleTestCase):
    def test_harmonic(self):
        report = check_oscillation_criterion(parse("x^2 + xi^2", 1))
        self.assertEqual(report.verdict, Verdict.PASS)
        self.assertEqual(len(report.evidence["directions"]), 2)

    def test_linear(self):
        self.assertEqual(check_oscillation_criterion(parse("2*x - 3*xi", 1)).verdict, Verdict.PASS)

    def test_cubic_potential(self):
        report = check_oscillation_criterion(parse("xi^2 + x^3", 1))
        self.assertEqual(report.verdict, Verdict.FAIL)
        self.assertEqual(report.evidence["directions"][0]["verdict"], Verdict.FAIL)


class CVBoundTests(SimpleTestCase):
    def test_constant(self):
        cv = cv_bound_check(parse("1", 1))
        for n in cv.norms:
            self.assertAlmostEqual(n, 1.0, places=10)
        self.assertEqual(cv.verdict, Verdict.PASS)

    def test_position_grows(self):
        cv = cv_bound_check(parse("x", 1))
        self.assertFalse(cv.plateau)
        self.assertEqual(cv.verdict, Verdict.FAIL)
        # ||Q_N|| es el mayor cero de H_N, del orden de sqrt(2N)
        self.assertGreater(cv.norms[-1], 0.8 * math.sqrt(2 * cv.N_schedule[-1]))

    def test_bounded_trigonometric(self):
        cv = cv_bound_check(parse("cos(x)*cos(xi)", 1))
        self.assertTrue(cv.plateau)
        self.assertLessEqual(cv.norms[-1], 2.0)
        self.assertEqual(cv.verdict, Verdict.PASS)

    def test_simple_criterion_implies_plateau(self):
        for text in ("x^2 + xi^2", "cos(x) + xi^2"):
            f = parse(text, 1)
            self.assertEqual(check_simple_criterion(f).verdict, Verdict.PASS)
            for alpha in ((2, 0), (1, 1), (0, 2)):
                with self.subTest(symbol=text, alpha=alpha):
                    self.assertTrue(cv_bound_check(f.differentiate(alpha)).plateau)


class MNormTests(SimpleTestCase):
    def test_zero(self):
        est = m_infty_one_norm(parse("0", 1))
        self.assertEqual(est.value, 0.0)
        self.assertTrue(est.converged)

    def test_gaussian_is_stable(self):
        est = m_infty_one_norm(parse("exp(-(x^2 + xi^2))", 1))
        self.assertGreater(est.value, 0.0)
        self.assertTrue(est.converged)
        self.assertEqual(est.verdict, Verdict.PASS)

    def test_linear_is_unconverged(self):
        est = m_infty_one_norm(parse("x", 1))
        self.assertFalse(est.converged)
        self.assertEqual(est.verdict, Verdict.FAIL)
        with self.assertRaises(Unconverged):
            est.require_converged()

    def test_homogeneous(self):
        g = parse("cos(x)*exp(-xi^2)", 1)
        base = m_infty_one_norm(g).value
        scaled = m_infty_one_norm(g * -3).value
        self.assertLessEqual(abs(scaled - 3 * base), 1e-10 * 3 * base)

    def test_triangle_inequality(self):
        g, h = parse("cos(x)", 1), parse("exp(-x^2 - xi^2)", 1)
        total = m_infty_one_norm(g + h).value
        self.assertLessEqual(total, m_infty_one_norm(g).value + m_infty_one_norm(h).value + 1e-10)

    def test_sampled_symbol(self):
        s = SampledSymbol.from_symbol(parse("exp(-(x^2 + xi^2))", 1), 16.0, 256)
        est = m_infty_one_norm(s)
        closed = m_infty_one_norm(parse("exp(-(x^2 + xi^2))", 1))
        self.assertTrue(est.converged)
        self.assertAlmostEqual(est.value, closed.value, delta=0.05 * closed.value)


class BCSensitivityTests(SimpleTestCase):
    def test_harmonic_levels(self):
        table = bc_sensitivity(parse("x^2", 1), [12], 4000, 5)
        for bc in BoundaryCondition.values:
            np.testing.assert_allclose(table.eigenvalues[(12.0, bc)], [1, 3, 5, 7, 9], atol=1e-4)
        self.assertLessEqual(max(table.final_discrepancy), 1e-6)
        self.assertEqual(table.verdict, Verdict.PASS)

    def test_harmonic_converges_in_L(self):
        table = bc_sensitivity(parse("x^2", 1), [10, 12], 4000, 5)
        a = np.asarray(table.eigenvalues[(10.0, BoundaryCondition.DIRICHLET.value)])
        b = np.asarray(table.eigenvalues[(12.0, BoundaryCondition.DIRICHLET.value)])
        self.assertLessEqual(np.max(np.abs(a - b)), 1e-6)

    def test_cubic_depends_on_boundary(self):
        table = bc_sensitivity(parse("x^3", 1), [8, 10, 12], 4000, 5)
        for L in table.L:
            with self.subTest(L=L):
                self.assertGreater(max(table.discrepancy(L)[:3]), 0.1)
        self.assertEqual(table.verdict, Verdict.FAIL)

    def test_particle_in_a_box(self):
        values = richardson_eigenvalues(parse("0", 1), math.pi, 4000, BoundaryCondition.DIRICHLET, 1, 1e-2)
        self.assertAlmostEqual(values[0], 0.25, delta=1e-4)

    def test_csv_shape(self):
        table = bc_sensitivity(parse("x^3", 1), [8, 10, 12], 4000, 5)
        with tempfile.TemporaryDirectory() as tmp:
            path = table.to_csv(Path(tmp) / "bc.csv", {"grid": 4000})
            with path.open(encoding="utf-8") as fh:
                rows = list(csv.reader(fh))
            self.assertTrue(path.with_name("bc.csv.config.json").exists())
        self.assertEqual(tuple(rows[0]), BC_COLUMNS)
        self.assertEqual(len(rows) - 1, 2 * 3 * 5)

    def test_grid_minimum(self):
        with self.assertRaises(InvalidConfig):
            bc_sensitivity(parse("x^2", 1), [8], 100, 3)

    def test_potential_must_depend_on_x_only(self):
        with self.assertRaises(InvalidConfig):
            bc_sensitivity(parse("x*xi", 1), [8], 4000, 3)


class SpectrumTests(SimpleTestCase):
    def test_harmonic_spectrum(self):
        values = quantized_spectrum(parse("(x^2 + xi^2)/2", 1), 64)
        np.testing.assert_allclose(values[:16], np.arange(16) + 0.5, atol=1e-8)


class ReportTests(SimpleTestCase):
    def test_pattern_detection(self):
        self.assertEqual(schrodinger_potential(parse("xi^2 + x^3", 1)).to_text(), "x^3")
        self.assertIsNone(schrodinger_potential(parse("x*xi", 1)))
        self.assertIsNone(schrodinger_potential(parse("xi1^2 + x1^2", 2)))

    def test_cosine_plus_kinetic_passes(self):
        report = build_report(parse("cos(x) + xi^2", 1))
        self.assertEqual(report.verdict, Verdict.PASS)
        self.assertTrue(report.criterion("bc_sensitivity").applicable)

    def test_bounded_calculus_symbols_pass(self):
        for text in ("x^2 + xi^2", "cos(x)*cos(xi)", "2*x + 3*xi"):
            with self.subTest(symbol=text):
                report = build_report(parse(text, 1))
                self.assertEqual(report.verdict, Verdict.PASS)
                self.assertEqual(report.as_dict()["verdict"], "PASS")

    def test_product_fails(self):
        report = build_report(parse("x^2*xi^2", 1))
        self.assertEqual(report.verdict, Verdict.FAIL)
        self.assertEqual(report.criterion("simple_criterion").verdict, Verdict.FAIL)
        self.assertFalse(report.criterion("bc_sensitivity").applicable)

    def test_cubic_potential_fails_with_two_witnesses(self):
        report = build_report(parse("xi^2 + x^3", 1))
        self.assertEqual(report.verdict, Verdict.FAIL)
        self.assertEqual(report.criterion("simple_criterion").verdict, Verdict.FAIL)
        self.assertEqual(report.criterion("simple_criterion").evidence["witness"], [2, 0])
        self.assertEqual(report.criterion("bc_sensitivity").verdict, Verdict.FAIL)

    def test_singular_symbol_is_inconclusive(self):
        report = build_report(parse("xi^2 + 1/x", 1))
        self.assertEqual(report.verdict, Verdict.INCONCLUSIVE)

    def test_matrix_symbol_passes(self):
        F = parse_matrix("[[cos(x) + xi^2, sin(x)],[sin(x), -cos(x) + xi^2]]", 1)
        report = build_report(F)
        self.assertEqual(report.k, 2)
        self.assertFalse(report.criterion("bc_sensitivity").applicable)
        self.assertEqual(report.verdict, Verdict.PASS)

    def test_deterministic_json(self):
        f = parse("x^2 + xi^2", 1)
        a = build_report(f, config={"N": 32}).to_json()
        b = build_report(f, config={"N": 32}).to_json()
        self.assertEqual(a, b)
        self.assertIn(f'"schema": "{SCHEMA}"', a)


class DiagnosticRunTests(TestCase):
    def test_record(self):
        report = build_report(parse("2*x + 3*xi", 1), config={"d": 1})
        run = DiagnosticRun.record(report)
        self.assertEqual(run.verdict, Verdict.PASS)
        self.assertEqual(run.report["schema"], SCHEMA)
        self.assertEqual(DiagnosticRun.objects.get(pk=run.pk).config, {"d": 1})
