import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from common.choices import Method
from common.exceptions import CostGuard, GridTooCoarse, InvalidConfig, MethodMismatch, UnsupportedDimension
from symbols.expr import PhasePoint
from symbols.parser import parse, parse_matrix

from . import oracles
from .hermite import gauss_hermite_physical, hermite_eval, hermite_functions
from .ladder import ladder_matrices, momentum, position
from .matrices import HEADER, FockMatrix, operator_norm, trusted_indices
from .quantize import QuadratureConfig, quantize, quantize_kernel, quantize_monomial
from .weyl import PROJECTIVE_PHASE, symplectic_form, unitarity_deviation, weyl_operator


class HermiteTests(SimpleTestCase):
    def test_closed_form_values(self):
        self.assertAlmostEqual(hermite_eval(0, 0.0), math.pi**-0.25, places=14)
        self.assertEqual(hermite_eval(1, 0.0), 0.0)
        self.assertAlmostEqual(hermite_eval(2, 0.0), -(2**-0.5) * math.pi**-0.25, places=14)

    def test_orthonormal(self):
        y, w = gauss_hermite_physical(40)
        phi = hermite_functions(19, y)
        gram = (phi * w) @ phi.T
        np.testing.assert_allclose(gram, np.eye(20), atol=1e-12)

    def test_high_order_is_finite(self):
        values = hermite_functions(2000, np.array([0.0, 10.0, 40.0, 70.0]))
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertLess(np.max(np.abs(values)), 1.0)

    def test_order_cap(self):
        with self.assertRaises(ValueError):
            hermite_functions(2001, 0.0)


class LadderTests(SimpleTestCase):
    def test_position_entry_matches_quadrature(self):
        result = oracles.ladder_entry(0, 1)
        self.assertAlmostEqual(result.fast, math.sqrt(0.5), places=14)
        self.assertLess(result.difference, 1e-12)

    def test_momentum_entry_matches_quadrature(self):
        result = oracles.momentum_entry(0, 1)
        self.assertAlmostEqual(result.fast, -1j * math.sqrt(0.5), places=14)
        self.assertLess(result.difference, 1e-12)

    def test_momentum_hermitian_imaginary(self):
        p = momentum(16)
        np.testing.assert_allclose(p, p.conj().T)
        self.assertEqual(np.max(np.abs(p.real)), 0.0)

    def test_tridiagonal(self):
        q = position(10)
        m, n = np.nonzero(q)
        self.assertTrue(np.all(np.abs(m - n) == 1))

    def test_canonical_commutator(self):
        N = 64
        q, p = position(N), momentum(N)
        c = (q @ p - p @ q)[: N - 2, : N - 2]
        self.assertLess(np.max(np.abs(c - 1j * np.eye(N - 2))), 1e-10)

    def test_two_modes_commute(self):
        Qs, Ps = ladder_matrices(6, d=2)
        self.assertEqual(Qs[0].side, 36)
        c = Qs[0].entries @ Ps[1].entries - Ps[1].entries @ Qs[0].entries
        self.assertLess(np.max(np.abs(c)), 1e-14)


class MonomialTests(SimpleTestCase):
    def test_position(self):
        np.testing.assert_array_equal(quantize_monomial((1,), (0,), 32).entries, position(32))

    def test_symmetrized_product(self):
        N = 32
        op = quantize_monomial((1,), (1,), N).entries
        ref = oracles.symmetrized_product(N).entries
        self.assertLess(np.max(np.abs(op - ref)), 1e-12)

    def test_harmonic_oscillator(self):
        N = 64
        f = parse("(x^2 + xi^2)/2", 1)
        op = quantize(f, N, "MONOMIAL").entries
        np.testing.assert_allclose(np.diag(op).real[: N - 2], np.arange(N - 2) + 0.5, atol=1e-10)
        self.assertLess(np.max(np.abs(op - np.diag(np.diag(op)))), 1e-10)

    def test_harmonic_oracle(self):
        result = oracles.harmonic_level(7)
        self.assertLess(result.difference, 1e-10)
        self.assertAlmostEqual(result.fast, 7.5, places=10)

    def test_truncation_locality(self):
        f = parse("x^3*xi + xi^2", 1)
        small = quantize(f, 24, "MONOMIAL").entries
        large = quantize(f, 32, "MONOMIAL").entries[:24, :24]
        np.testing.assert_allclose(small, large, atol=1e-12)

    def test_cost_guard(self):
        with self.assertRaises(CostGuard):
            quantize_monomial((13,), (0,), 8)

    def test_two_modes(self):
        op = quantize(parse("x1*xi2", 2), 6, "MONOMIAL")
        Qs, Ps = ladder_matrices(6, d=2)
        np.testing.assert_allclose(op.entries, Qs[0].entries @ Ps[1].entries, atol=1e-12)


class KernelTests(SimpleTestCase):
    def test_identity(self):
        op = quantize_kernel(parse("1", 1), 32)
        self.assertLess(np.max(np.abs(op.entries - np.eye(32))), 1e-8)
        self.assertEqual(op.method, Method.KERNEL_QUADRATURE)

    def test_position_and_momentum(self):
        N = 32
        Q = quantize_kernel(parse("x", 1), N).entries[:16, :16]
        P = quantize_kernel(parse("xi", 1), N).entries[:16, :16]
        self.assertLess(np.max(np.abs(Q - position(N)[:16, :16])), 1e-8)
        self.assertLess(np.max(np.abs(P - momentum(N)[:16, :16])), 1e-8)

    def test_cosine_is_hermitian_and_matches_direct_quadrature(self):
        f = parse("cos(x)", 1)
        op = quantize_kernel(f, 32)
        self.assertTrue(op.is_hermitian(1e-10))
        for m, n in [(0, 0), (1, 3), (2, 2)]:
            result = oracles.kernel_element(f, m, n)
            self.assertLess(result.difference, 1e-6)

    def test_agrees_with_monomial(self):
        for text in ("x^2*xi", "x^4", "xi^4 + x", "x^2*xi^2", "x^3*xi - 2*xi^3", "x*xi + 3"):
            with self.subTest(symbol=text):
                result = oracles.method_agreement(parse(text, 1), N=96)
                self.assertLess(result.fast, 1e-6)

    def test_harmonic_spectrum(self):
        op = quantize_kernel(parse("(x^2 + xi^2)/2", 1), 64)
        values = np.linalg.eigvalsh(op.entries)
        np.testing.assert_allclose(values[:16], np.arange(16) + 0.5, atol=1e-6)

    def test_refinement(self):
        cfg = QuadratureConfig.default_for(16, refine=True)
        op = quantize_kernel(parse("exp(-x^2-xi^2)", 1), 16, cfg)
        self.assertLess(op.metadata["refinement_change"], 1e-8)

    def test_refinement_on_by_default(self):
        self.assertTrue(QuadratureConfig.default_for(16).refine)
        self.assertIn("refinement_change", quantize_kernel(parse("cos(x)", 1), 16).metadata)
        with override_settings(WEYL_LAB_KERNEL_REFINE=False):
            self.assertFalse(QuadratureConfig.default_for(16).refine)

    def test_coarse_grid(self):
        cfg = QuadratureConfig(R_x=8.0, R_xi=2.0, xi_points=64)
        with self.assertRaises(GridTooCoarse) as ctx:
            quantize_kernel(parse("cos(x)", 1), 16, cfg)
        self.assertGreater(ctx.exception.change, cfg.tolerance)

    def test_config_validation(self):
        with self.assertRaises(ValueError):
            QuadratureConfig(R_x=8, R_xi=8, xi_points=100)
        with self.assertRaises(ValueError):
            QuadratureConfig(R_x=8, R_xi=8, xi_oversample=3)

    def test_two_modes_is_tensor_product(self):
        N, cfg = 4, QuadratureConfig(R_x=6.0, R_xi=6.0)
        two = quantize_kernel(parse("cos(x1) + xi2^2", 2), N, cfg)
        cosine = quantize_kernel(parse("cos(x)", 1), N, cfg).entries
        kinetic = quantize_monomial((0,), (2,), N).entries
        expected = np.kron(cosine, np.eye(N)) + np.kron(np.eye(N), kinetic)
        self.assertEqual(two.d, 2)
        self.assertTrue(two.is_hermitian(1e-10))
        self.assertLess(np.max(np.abs(two.entries - expected)), 1e-7)

    def test_two_modes_polynomial_matches_monomial(self):
        f = parse("x1*xi2 + x2^2", 2)
        kern = quantize_kernel(f, 4, QuadratureConfig(R_x=6.0, R_xi=6.0)).entries
        mono = quantize(f, 4, "MONOMIAL").entries
        self.assertLess(np.max(np.abs(kern - mono)), 1e-7)

    def test_two_modes_cost_guard(self):
        with override_settings(WEYL_LAB_KERNEL_MAX_POINTS=1000), self.assertRaises(CostGuard):
            quantize_kernel(parse("cos(x1)", 2), 4)

    def test_three_modes_unsupported(self):
        with self.assertRaises(UnsupportedDimension):
            quantize_kernel(parse("cos(x1)", 3), 2)


class DispatchTests(SimpleTestCase):
    def test_auto(self):
        self.assertEqual(quantize(parse("x^2", 1), 8).method, Method.MONOMIAL)
        self.assertEqual(quantize(parse("cos(x)", 1), 8).method, Method.KERNEL_QUADRATURE)

    def test_method_mismatch(self):
        with self.assertRaises(MethodMismatch):
            quantize(parse("cos(x)", 1), 8, "MONOMIAL")

    def test_matrix_symbol_blocks(self):
        op = quantize(parse_matrix("[[x, 0],[0, -x]]", 1), 16, "MONOMIAL")
        self.assertEqual(op.k, 2)
        np.testing.assert_allclose(op.entries[0::2, 0::2], position(16))
        np.testing.assert_allclose(op.entries[1::2, 1::2], -position(16))
        self.assertEqual(np.max(np.abs(op.entries[0::2, 1::2])), 0.0)

    def test_hermitian_matrix_symbol(self):
        F = parse_matrix("[[cos(x) + xi^2, sin(x)],[sin(x), -cos(x) + xi^2]]", 1)
        op = quantize(F, 24)
        self.assertLess(op.hermitian_deviation(), 1e-10)


class WeylOperatorTests(SimpleTestCase):
    def test_zero_is_identity(self):
        W = weyl_operator(PhasePoint.zero(1), 16)
        np.testing.assert_allclose(W.entries, np.eye(16), atol=1e-15)

    def test_unitary(self):
        for z in [(1.0, 0.5), (-2.0, 0.0), (1.2, -1.5)]:
            with self.subTest(z=z):
                self.assertLess(unitarity_deviation(weyl_operator(z, 64)), 1e-10)

    def test_explicit_action_overlap(self):
        for z in [(1.0, 0.5), (0.0, -1.5), (-1.3, 1.1)]:
            with self.subTest(z=z):
                result = oracles.weyl_overlap(z, 0, 0)
                self.assertLess(result.difference, 1e-8)
                self.assertAlmostEqual(abs(result.fast), math.exp(-sum(c * c for c in z) / 4), places=10)

    def test_translates_position(self):
        N, x = 64, 0.8
        W = weyl_operator((x, 0.0), N).entries
        q = position(N)
        shifted = (W @ q @ W.conj().T)[:16, :16]
        self.assertLess(np.max(np.abs(shifted - q[:16, :16] - x * np.eye(16))), 1e-10)

    def test_projective_phase(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            z = PhasePoint.of(*rng.uniform(-0.7, 0.7, 2))
            w = PhasePoint.of(*rng.uniform(-0.7, 0.7, 2))
            Wz, Ww, Wzw = (weyl_operator(p, 64).entries for p in (z, w, z + w))
            ratio = (Wz @ Ww @ Wzw.conj().T)[:16, :16]
            expected = np.exp(PROJECTIVE_PHASE * symplectic_form(z, w))
            self.assertLess(np.max(np.abs(ratio - expected * np.eye(16))), 1e-8)

    def test_projective_phase_oracle(self):
        result = oracles.projective_phase((0.6, -0.4), (-0.3, 0.9))
        self.assertLess(result.difference, 1e-8)
        self.assertAlmostEqual(abs(result.oracle), 1.0, places=8)

    def test_operator_norm(self):
        self.assertAlmostEqual(operator_norm(FockMatrix(np.eye(8), 8)), 1.0)
        self.assertAlmostEqual(operator_norm(np.diag(np.arange(8.0))), 7.0)
        self.assertAlmostEqual(operator_norm(quantize(parse("2", 1), 8)), 2.0)


class FockMatrixTests(SimpleTestCase):
    def test_json_round_trip(self):
        m = quantize(parse("x*xi", 1), 6)
        back = FockMatrix.from_dict(m.to_dict())
        np.testing.assert_array_equal(back.entries, m.entries)
        self.assertEqual(back.method, Method.MONOMIAL)

    def test_binary_layout(self):
        m = FockMatrix(np.eye(4) * (1 + 2j), 4, method=Method.EXPONENTIAL)
        blob = m.to_bytes()
        self.assertEqual(HEADER.size, 32)
        self.assertEqual(blob[:8], b"WEYL0001")
        self.assertEqual(int.from_bytes(blob[20:24], "little"), 3)
        self.assertEqual(blob[24:32], b"\x00" * 8)
        self.assertEqual(len(blob), 32 + 16 * 16)
        back = FockMatrix.from_bytes(blob)
        np.testing.assert_array_equal(back.entries, m.entries)

    def test_bad_magic(self):
        with self.assertRaises(InvalidConfig):
            FockMatrix.from_bytes(b"NOTWEYL!" + b"\x00" * 24)

    def test_trusted_indices(self):
        np.testing.assert_array_equal(trusted_indices(8, 1, 2, 2), [0, 1, 2, 3])
        np.testing.assert_array_equal(trusted_indices(4, 2, 1, 2), [0, 1, 4, 5])

    def test_immutable(self):
        m = FockMatrix(np.eye(2), 2)
        with self.assertRaises(ValueError):
            m.entries[0, 0] = 3
