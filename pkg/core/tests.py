import csv
import json
import re
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from common.exceptions import InvalidConfig
from diagnostics.models import DiagnosticRun
from fock.matrices import FockMatrix

from .forms import RunConfigForm


def run(name, *args, **options) -> str:
    out = StringIO()
    call_command(name, *args, stdout=out, stderr=StringIO(), **options)
    return out.getvalue()


def printed(output: str, label: str) -> float:
    match = re.search(rf"{label}: ([-+0-9.e]+)", output)
    return float(match.group(1))


class TmpDirMixin:
    def setUp(self):
        super().setUp()
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()
        super().tearDown()


class RunConfigFormTests(TmpDirMixin, SimpleTestCase):
    def test_lists_and_method(self):
        form = RunConfigForm.from_sources({"L_schedule": "1,10,100", "method": "kernel", "cv_schedule": [16, 32]})
        self.assertEqual(form.cleaned_data["L_schedule"], [1.0, 10.0, 100.0])
        self.assertEqual(form.cleaned_data["method"], "KERNEL")
        self.assertEqual(form.cleaned_data["cv_schedule"], [16, 32])

    def test_unknown_key_in_file(self):
        path = self.tmp / "cfg.json"
        path.write_text(json.dumps({"N": 16, "colour": "blue"}), encoding="utf-8")
        with self.assertRaises(InvalidConfig):
            RunConfigForm.from_sources({}, path)

    def test_flags_override_file(self):
        path = self.tmp / "cfg.json"
        path.write_text(json.dumps({"N": 16, "M": 4}), encoding="utf-8")
        form = RunConfigForm.from_sources({"N": 8}, path)
        self.assertEqual(form.cleaned_data["N"], 8)
        self.assertEqual(form.cleaned_data["M"], 4)

    def test_settings_fill_effective_config(self):
        form = RunConfigForm.from_sources({"symbol": "x"})
        cfg = form.effective(("symbol", "N", "L_schedule"))
        self.assertEqual(cfg["N"], 32)
        self.assertEqual(cfg["L_schedule"], [1.0, 10.0, 100.0, 1000.0])

    def test_invalid_values(self):
        for flags in ({"N": 8, "M": 16}, {"grid": 100}, {"L_schedule": "10,1"}, {"method": "fft"}, {"heat_time": 0}, {"d": 3}):
            with self.subTest(flags=flags), self.assertRaises(InvalidConfig):
                RunConfigForm.from_sources(flags)


class QuantizeCommandTests(TmpDirMixin, SimpleTestCase):
    def test_harmonic_monomial(self):
        path = self.tmp / "m.json"
        output = run("weyl_quantize", symbol="x^2+xi^2", d=1, N=64, method="monomial", out=str(path))
        self.assertLessEqual(printed(output, "desviacion hermitiana"), 1e-10)
        A = FockMatrix.load(path)
        self.assertEqual(A.N, 64)
        self.assertEqual(A.metadata["config"]["symbol"], "x^2+xi^2")
        self.assertLessEqual(A.hermitian_deviation(), 1e-10)

    def test_syntax_error_exit_code(self):
        with self.assertRaises(CommandError) as ctx:
            run("weyl_quantize", symbol="x +", N=8)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn("posición", str(ctx.exception))

    def test_identity_norm(self):
        output = run("weyl_quantize", symbol="1", N=32, method="kernel")
        self.assertAlmostEqual(printed(output, "norma"), 1.0, delta=1e-8)

    def test_binary_with_sidecar(self):
        path = self.tmp / "m.bin"
        run("weyl_quantize", symbol="x*xi", N=16, format="binary", out=str(path))
        self.assertEqual(FockMatrix.load(path).N, 16)
        cfg = json.loads((self.tmp / "m.bin.config.json").read_text(encoding="utf-8"))
        self.assertEqual(cfg["format"], "binary")

    def test_method_mismatch_is_numeric_failure(self):
        with self.assertRaises(CommandError) as ctx:
            run("weyl_quantize", symbol="cos(x)", N=8, method="monomial")
        self.assertEqual(ctx.exception.returncode, 3)

    def test_unknown_config_key(self):
        path = self.tmp / "cfg.json"
        path.write_text(json.dumps({"symbol": "x", "nope": 1}), encoding="utf-8")
        with self.assertRaises(CommandError) as ctx:
            run("weyl_quantize", config=str(path))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_kernel_refinement_flag(self):
        refined, plain = self.tmp / "r.json", self.tmp / "p.json"
        run("weyl_quantize", symbol="cos(x)", N=16, method="kernel", out=str(refined))
        run("weyl_quantize", symbol="cos(x)", N=16, method="kernel", refine=False, out=str(plain))
        self.assertIn("refinement_change", FockMatrix.load(refined).metadata)
        self.assertNotIn("refinement_change", FockMatrix.load(plain).metadata)
        self.assertFalse(FockMatrix.load(plain).metadata["config"]["refine"])

    def test_output_independent_of_workers(self):
        blobs = []
        for workers in (1, 4):
            path = self.tmp / f"w{workers}.json"
            run("weyl_quantize", symbol="cos(x)*exp(-xi^2)", N=32, method="kernel", workers=workers, out=str(path))
            blobs.append(path.read_bytes())
        self.assertEqual(blobs[0], blobs[1])


class CheckCommandTests(TmpDirMixin, SimpleTestCase):
    def test_cubic_potential_fails(self):
        path = self.tmp / "report.json"
        with self.assertRaises(SystemExit) as ctx:
            run("weyl_check", symbol="xi^2 + x^3", out=str(path))
        self.assertEqual(ctx.exception.code, 10)
        report = json.loads(path.read_text(encoding="utf-8"))
        self.assertEqual(report["verdict"], "FAIL")
        self.assertEqual(report["criteria"]["simple_criterion"]["evidence"]["witness"], [2, 0])
        self.assertEqual(report["config"]["symbol"], "xi^2 + x^3")

    def test_cosine_plus_kinetic_passes(self):
        output = run("weyl_check", symbol="cos(x) + xi^2")
        self.assertEqual(json.loads(output)["verdict"], "PASS")

    def test_singular_symbol_is_inconclusive(self):
        with self.assertRaises(SystemExit) as ctx:
            run("weyl_check", symbol="xi^2 + 1/x")
        self.assertEqual(ctx.exception.code, 11)

    def test_report_independent_of_workers(self):
        blobs = []
        for workers in (1, 8):
            path = self.tmp / f"check{workers}.json"
            run("weyl_check", symbol="cos(x) + xi^2", workers=workers, out=str(path))
            blobs.append(path.read_bytes())
        self.assertEqual(blobs[0], blobs[1])


class RecordedCheckTests(TmpDirMixin, TestCase):
    def test_record(self):
        run("weyl_check", symbol="2*x + 3*xi", record=True, out=str(self.tmp / "r.json"))
        run_ = DiagnosticRun.objects.get()
        self.assertEqual(run_.verdict, "PASS")
        self.assertEqual(run_.config["symbol"], "2*x + 3*xi")


class SpectrumCommandTests(TmpDirMixin, SimpleTestCase):
    def test_harmonic_levels(self):
        path = self.tmp / "espectro.csv"
        run("weyl_spectrum", symbol="(x^2+xi^2)/2", N=64, levels=16, out=str(path))
        with path.open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        self.assertEqual(rows[0], ["level", "eigenvalue"])
        values = np.array([float(r[1]) for r in rows[1:]])
        np.testing.assert_allclose(values, np.arange(16) + 0.5, atol=1e-8)
        self.assertTrue((self.tmp / "espectro.csv.config.json").exists())


class BCCommandTests(TmpDirMixin, SimpleTestCase):
    def test_csv_shape(self):
        path = self.tmp / "bc.csv"
        run("weyl_bc", potential="x^3", bc_L_schedule="8,10,12", grid=4000, levels=5, out=str(path))
        with path.open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        self.assertEqual(rows[0], ["L", "bc", "level", "eigenvalue"])
        self.assertEqual(len(rows) - 1, 2 * 3 * 5)
        cfg = json.loads((self.tmp / "bc.csv.config.json").read_text(encoding="utf-8"))
        self.assertEqual(cfg["bc_L_schedule"], [8.0, 10.0, 12.0])

    def test_coarse_grid_rejected(self):
        with self.assertRaises(CommandError) as ctx:
            run("weyl_bc", potential="x^2", grid=100)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_output_independent_of_workers(self):
        blobs = []
        for workers in (1, 8):
            path = self.tmp / f"bc{workers}.csv"
            run("weyl_bc", potential="x^2", bc_L_schedule="8,10", workers=workers, out=str(path))
            blobs.append(path.read_bytes())
        self.assertEqual(blobs[0], blobs[1])


class ToeplitzCommandTests(TmpDirMixin, SimpleTestCase):
    def test_verify_heat(self):
        path = self.tmp / "t.json"
        output = run("weyl_toeplitz", symbol="(x^2+xi^2)/2", N=64, verify_heat=True, out=str(path))
        self.assertLessEqual(printed(output, "residuo heat/Toeplitz"), 1e-4)
        T = FockMatrix.load(path)
        np.testing.assert_allclose(np.diag(T.restrict(16)).real, np.arange(16) + 1.0, atol=1e-5)

    def test_two_modes(self):
        path = self.tmp / "t2.json"
        run("weyl_toeplitz", symbol="(x1^2 + xi1^2 + x2^2 + xi2^2)/2", d=2, N=4, out=str(path))
        T = FockMatrix.load(path)
        self.assertEqual(T.d, 2)
        n = np.arange(4.0)
        np.testing.assert_allclose(np.diag(T.entries).real, np.add.outer(n, n).ravel() + 2.0, atol=1e-6)

    def test_three_modes_rejected(self):
        with self.assertRaises(CommandError) as ctx:
            run("weyl_toeplitz", symbol="x1*xi3", d=3, N=4)
        self.assertEqual(ctx.exception.returncode, 2)


class MNormCommandTests(TmpDirMixin, SimpleTestCase):
    def test_gaussian(self):
        path = self.tmp / "mnorm.json"
        run("weyl_mnorm", symbol="exp(-(x^2 + xi^2))", out=str(path))
        payload = json.loads(path.read_text(encoding="utf-8"))
        self.assertTrue(payload["converged"])
        self.assertEqual(payload["config"]["R"], 8.0)

    def test_linear_unconverged(self):
        with self.assertRaises(CommandError) as ctx:
            run("weyl_mnorm", symbol="x")
        self.assertEqual(ctx.exception.returncode, 3)


class OracleCommandTests(TmpDirMixin, SimpleTestCase):
    def test_ladder_entry(self):
        output = run("weyl_oracle", "ladder-entry", row=0, col=1, tolerance=1e-12)
        self.assertIn("0.707106781186547", output)
        self.assertLessEqual(printed(output, "diferencia"), 1e-12)

    def test_random_projective_phases(self):
        path = self.tmp / "phase.json"
        run("weyl_oracle", "projective-phase", seed=7, samples=20, tolerance=1e-8, out=str(path))
        payload = json.loads(path.read_text(encoding="utf-8"))
        self.assertEqual(len(payload["results"]), 20)
        for r in payload["results"]:
            fast = complex(*r["fast"]) if isinstance(r["fast"], list) else complex(r["fast"])
            self.assertAlmostEqual(abs(fast), 1.0, places=8)

    def test_coherent_overlap(self):
        output = run("weyl_oracle", "coherent-overlap", z="1,0.5", level=3)
        self.assertLessEqual(printed(output, "diferencia"), 1e-10)

    def test_symbol_required(self):
        with self.assertRaises(CommandError) as ctx:
            run("weyl_oracle", "kernel-element")
        self.assertEqual(ctx.exception.returncode, 2)
