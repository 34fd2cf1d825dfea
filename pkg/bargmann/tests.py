import math
import tempfile
from pathlib import Path

import numpy as np
import sympy
from django.test import SimpleTestCase

from common.exceptions import BoxTooSmall, DimensionMismatch, InvalidConfig, QuadratureUnconverged, TailGuard, UnsupportedDimension
from fock.ladder import position
from symbols.expr import PhasePoint
from symbols.parser import parse, parse_matrix

from . import oracles
from .heat import HeatTransformed, SampledSymbol, heat_transform
from .toeplitz import PolarGrid, calibrate_heat_time, coherent_state, heat_toeplitz_residual, toeplitz_matrix


def _same(a, b) -> bool:
    return sympy.simplify(a.expr - b.expr) == 0


class HeatTransformTests(SimpleTestCase):
    def test_constant(self):
        self.assertTrue(_same(heat_transform(parse("1", 1), 0.7), parse("1", 1)))

    def test_square_gets_variance(self):
        self.assertTrue(_same(heat_transform(parse("x^2", 1)), parse("x^2 + 1/2", 1)))

    def test_linear_is_fixed(self):
        self.assertTrue(_same(heat_transform(parse("x", 1), 3.0), parse("x", 1)))

    def test_harmonic(self):
        out = heat_transform(parse("(x^2 + xi^2)/2", 1))
        self.assertTrue(_same(out, parse("(x^2 + xi^2)/2 + 1/2", 1)))

    def test_commutes_with_shift(self):
        f = parse("x^2*xi + xi^3", 1)
        z = PhasePoint.of(0.7, -1.3)
        lhs = heat_transform(f.shift(z))
        rhs = heat_transform(f).shift(z)
        pts = np.random.default_rng(3).uniform(-3, 3, (50, 2))
        self.assertLess(np.max(np.abs(lhs.evaluate_grid(pts) - rhs.evaluate_grid(pts))), 1e-10)

    def test_cosine_by_quadrature(self):
        t = 1.0
        out = heat_transform(parse("cos(x)", 1), t)
        self.assertIsInstance(out, HeatTransformed)
        pts = np.array([[0.0, 0.0], [1.2, -0.4], [-2.5, 3.0]])
        expected = math.exp(-t / 4) * np.cos(pts[:, 0])
        np.testing.assert_allclose(out.evaluate_grid(pts), expected, atol=1e-10)

    def test_matches_direct_convolution(self):
        result = oracles.heat_moment(parse("sin(x)*xi + x^2", 1), (0.4, -0.9))
        self.assertLess(result.difference, 1e-8)

    def test_sampled_square(self):
        s = SampledSymbol.from_symbol(parse("x^2", 1), 8.0, 64)
        out = heat_transform(s)
        expected = s.points()[..., 0] ** 2 + 0.5
        self.assertLess(np.max(np.abs(out.values - expected)), 1e-8)

    def test_sampled_commutes_with_grid_shift(self):
        # z alineado con la malla: 4 nodos en x, -2 nodos en xi
        f = parse("exp(-(x^2 + xi^2))", 1)
        z = PhasePoint.of(1.0, -0.5)
        base = heat_transform(SampledSymbol.from_symbol(f, 8.0, 64)).values
        shifted = heat_transform(SampledSymbol.from_symbol(f.shift(z), 8.0, 64)).values
        rolled = np.roll(base, shift=(-4, 2), axis=(0, 1))
        inner = (slice(8, 56), slice(8, 56))
        self.assertLess(np.max(np.abs(shifted[inner] - rolled[inner])), 1e-10)

    def test_sampled_box_too_small(self):
        s = SampledSymbol.from_symbol(parse("x^2", 1), 2.0, 16)
        with self.assertRaises(BoxTooSmall):
            heat_transform(s)

    def test_sampled_grid_must_be_power_of_two(self):
        with self.assertRaises(DimensionMismatch):
            SampledSymbol(4.0, 12, 1, np.zeros((12, 12)))

    def test_invalid_time(self):
        with self.assertRaises(InvalidConfig):
            heat_transform(parse("x", 1), 0.0)

    def test_sampled_save_and_load(self):
        s = SampledSymbol.from_symbol(parse("x*xi", 1), 4.0, 8)
        with tempfile.TemporaryDirectory() as tmp:
            path = s.save(Path(tmp) / "sym.bin")
            self.assertTrue(path.with_name("sym.bin.config.json").exists())
            back = SampledSymbol.load(path)
        self.assertEqual((back.R, back.n, back.d), (4.0, 8, 1))
        np.testing.assert_array_equal(back.values, s.values)


class CoherentStateTests(SimpleTestCase):
    def test_origin_is_vacuum(self):
        v = coherent_state((0.0, 0.0), 16)
        np.testing.assert_allclose(v, np.eye(16)[0], atol=1e-15)

    def test_unit_norm(self):
        for z in [(1.0, 0.0), (0.0, -2.0), (1.2, 1.5)]:
            with self.subTest(z=z):
                self.assertAlmostEqual(np.linalg.norm(coherent_state(z, 64)), 1.0, delta=1e-10)

    def test_closed_form(self):
        for n in (0, 1, 5):
            with self.subTest(n=n):
                self.assertLess(oracles.coherent_overlap((0.9, -1.4), n).difference, 1e-10)

    def test_centred_at_point(self):
        v = coherent_state((1.5, 0.0), 64)
        self.assertAlmostEqual((v.conj() @ position(64) @ v).real, 1.5, delta=1e-10)

    def test_tail_guard(self):
        with self.assertRaises(TailGuard):
            coherent_state((5.0, 0.0), 16)


class ToeplitzTests(SimpleTestCase):
    def test_constant_is_identity(self):
        T = toeplitz_matrix(parse("1", 1), 32)
        self.assertLess(np.max(np.abs(T.restrict(16) - np.eye(16))), 1e-6)

    def test_harmonic_is_number_plus_one(self):
        T = toeplitz_matrix(parse("(x^2 + xi^2)/2", 1), 32)
        self.assertLess(np.max(np.abs(T.restrict(16) - np.diag(np.arange(1.0, 17.0)))), 1e-5)

    def test_position(self):
        T = toeplitz_matrix(parse("x", 1), 32)
        self.assertLess(np.max(np.abs(T.restrict(16) - position(32)[:16, :16])), 1e-8)

    def test_radial_symbol_is_diagonal(self):
        T = toeplitz_matrix(parse("exp(-(x^2 + xi^2)/4)", 1), 24).entries
        self.assertLess(np.max(np.abs(T - np.diag(np.diag(T)))), 1e-8)

    def test_positive_symbol(self):
        T = toeplitz_matrix(parse("x^2", 1), 24)
        self.assertGreaterEqual(np.min(np.linalg.eigvalsh(T.entries)), -1e-8)

    def test_norm_bounded_by_symbol(self):
        T = toeplitz_matrix(parse("cos(x)", 1), 24)
        self.assertLessEqual(np.linalg.norm(T.entries, 2), 1.0 + 1e-6)
        self.assertLess(T.hermitian_deviation(), 1e-10)

    def test_matches_cartesian_quadrature(self):
        result = oracles.toeplitz_coherent(parse("x*xi", 1), 1, 3)
        self.assertGreater(abs(result.fast), 0.1)
        self.assertLess(result.difference, 1e-8)

    def test_matrix_symbol(self):
        T = toeplitz_matrix(parse_matrix("[[1, x],[x, 1]]", 1), 16)
        self.assertEqual(T.k, 2)
        np.testing.assert_allclose(T.entries[0::2, 0::2], np.eye(16), atol=1e-10)
        np.testing.assert_allclose(T.entries[0::2, 1::2], position(16), atol=1e-10)

    def test_two_modes_harmonic(self):
        T = toeplitz_matrix(parse("(x1^2 + xi1^2 + x2^2 + xi2^2)/2", 2), 4)
        n = np.arange(4.0)
        self.assertEqual(T.d, 2)
        np.testing.assert_allclose(T.entries, np.diag(np.add.outer(n, n).ravel() + 2.0), atol=1e-6)

    def test_two_modes_is_tensor_product(self):
        grid = PolarGrid(28, 32)
        two = toeplitz_matrix(parse("cos(x1)", 2), 4, grid=grid, verify=False).entries
        one = toeplitz_matrix(parse("cos(x)", 1), 4, grid=grid, verify=False).entries
        self.assertLess(np.max(np.abs(two - np.kron(one, np.eye(4)))), 1e-10)

    def test_two_modes_mixed_symbol(self):
        grid = PolarGrid(30, 32)
        T = toeplitz_matrix(parse("x1*xi2", 2), 6, grid=grid, verify=False).entries
        q = toeplitz_matrix(parse("x", 1), 6, grid=grid, verify=False).entries
        p = toeplitz_matrix(parse("xi", 1), 6, grid=grid, verify=False).entries
        self.assertLess(np.max(np.abs(T - np.kron(q, p))), 1e-10)
        np.testing.assert_allclose(q, position(6), atol=1e-10)

    def test_three_modes_unsupported(self):
        with self.assertRaises(UnsupportedDimension):
            toeplitz_matrix(parse("x1", 3), 4)

    def test_coarse_polar_grid_unconverged(self):
        with self.assertRaises(QuadratureUnconverged) as ctx:
            toeplitz_matrix(parse("cos(3*x)", 1), 8, grid=PolarGrid(4, 8))
        self.assertGreater(ctx.exception.change, 0.0)


class HeatToeplitzTests(SimpleTestCase):
    def test_constant(self):
        self.assertLessEqual(heat_toeplitz_residual(parse("1", 1), 32, 16), 1e-6)

    def test_harmonic(self):
        self.assertLessEqual(heat_toeplitz_residual(parse("(x^2 + xi^2)/2", 1), 64, 16), 1e-4)

    def test_position(self):
        self.assertLessEqual(heat_toeplitz_residual(parse("x", 1), 64, 16), 1e-4)

    def test_calibrated_time(self):
        calibration = calibrate_heat_time()
        self.assertEqual(calibration.t, 1.0)
        self.assertGreater(calibration.residuals[0.5], 1e-3)

    def test_requires_trusted_block(self):
        with self.assertRaises(DimensionMismatch):
            heat_toeplitz_residual(parse("1", 1), 16, 9)
