import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase, override_settings

from .exceptions import (
    BoxTooSmall,
    DimensionMismatch,
    DivisionByZero,
    EvaluationError,
    InvalidConfig,
    SymbolSyntaxError,
    exit_code_for,
)
from .parallel import chunk_slices, get_workers, ordered_map, set_workers
from .utils import dumps_stable, write_csv


class ExitCodeTests(SimpleTestCase):
    def test_mapping(self):
        self.assertEqual(exit_code_for(SymbolSyntaxError("x", 3)), 2)
        self.assertEqual(exit_code_for(DimensionMismatch("d")), 2)
        self.assertEqual(exit_code_for(InvalidConfig("cfg")), 2)
        self.assertEqual(exit_code_for(DivisionByZero((0.0, 0.0))), 3)
        self.assertEqual(exit_code_for(BoxTooSmall("R")), 3)

    def test_structured_attributes(self):
        exc = SymbolSyntaxError("se esperaba un operando", 4)
        self.assertEqual(exc.position, 4)
        self.assertIn("posición 4", str(exc))
        self.assertIsInstance(DivisionByZero((1.0, 2.0)), EvaluationError)


class ParallelTests(SimpleTestCase):
    def tearDown(self):
        set_workers(None)

    def test_order_and_result_independent_of_workers(self):
        items = list(range(40))
        results = []
        for workers in (1, 3, 8):
            set_workers(workers)
            results.append(ordered_map(lambda v: v * v, items))
        self.assertEqual(results[0], [v * v for v in items])
        self.assertEqual(results[0], results[1])
        self.assertEqual(results[1], results[2])

    @override_settings(WEYL_LAB_WORKERS=5)
    def test_settings_fallback(self):
        set_workers(None)
        self.assertEqual(get_workers(), 5)
        set_workers(2)
        self.assertEqual(get_workers(), 2)

    def test_chunks_cover_range(self):
        slices = chunk_slices(10, 4)
        self.assertEqual([(s.start, s.stop) for s in slices], [(0, 4), (4, 8), (8, 10)])
        self.assertEqual(chunk_slices(0, 4), [])


class ArtifactTests(SimpleTestCase):
    def test_stable_json(self):
        self.assertEqual(dumps_stable({"b": 1, "a": [1.5]}), dumps_stable({"a": [1.5], "b": 1}))

    def test_csv_with_sidecar(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_csv(Path(tmp) / "out" / "t.csv", ("level", "eigenvalue"), [(0, 0.5), (1, 1.5)], {"N": 64})
            self.assertEqual(path.read_text(encoding="utf-8"), "level,eigenvalue\n0,0.5\n1,1.5\n")
            sidecar = json.loads((Path(tmp) / "out" / "t.csv.config.json").read_text(encoding="utf-8"))
        self.assertEqual(sidecar, {"N": 64})
