import os
import tempfile
from pathlib import Path

import numpy as np

from ..helpers import (
    atomic_write_text,
    csv_text,
    dumps_json,
    format_float,
    text_digest,
)
from ..utils import NoSocketsSimpleTestCase


class TestFormatFloat(NoSocketsSimpleTestCase):
    def test_seventeen_significant_digits(self):
        self.assertEqual(format_float(0.1), "0.10000000000000001")

    def test_round_trip(self):
        for value in (1 / 3, 2.0 ** -40, 123456.789, -7.5e300):
            self.assertEqual(float(format_float(value)), value)

    def test_integral_floats_are_short(self):
        self.assertEqual(format_float(1.0), "1")

    def test_non_finite(self):
        self.assertEqual(format_float(float("nan")), "nan")
        self.assertEqual(format_float(float("inf")), "inf")
        self.assertEqual(format_float(float("-inf")), "-inf")


class TestDumpsJson(NoSocketsSimpleTestCase):
    def test_sorted_keys_and_layout(self):
        # when
        result = dumps_json({"b": 1, "a": [1.5, None, True]})
        # then
        self.assertEqual(
            result, '{\n  "a": [\n    1.5,\n    null,\n    true\n  ],\n  "b": 1\n}\n'
        )

    def test_numpy_values(self):
        result = dumps_json(
            {"array": np.array([0.5, 2.0]), "int": np.int64(3), "flag": np.bool_(True)}
        )
        self.assertEqual(
            result,
            '{\n  "array": [\n    0.5,\n    2\n  ],\n  "flag": true,\n  "int": 3\n}\n',
        )

    def test_non_finite_floats_become_null(self):
        self.assertEqual(dumps_json([float("nan")]), "[\n  null\n]\n")

    def test_empty_containers(self):
        self.assertEqual(dumps_json({"a": {}, "b": []}), '{\n  "a": {},\n  "b": []\n}\n')

    def test_identical_input_identical_output(self):
        obj = {"x": [1 / 3, 2 / 3], "y": {"z": 0.1}}
        self.assertEqual(dumps_json(obj), dumps_json(dict(reversed(list(obj.items())))))

    def test_raises_for_unknown_types(self):
        with self.assertRaises(TypeError):
            dumps_json({"a": object()})


class TestCsvText(NoSocketsSimpleTestCase):
    def test_rows(self):
        result = csv_text(("a", "b"), [(1, 0.5), (None, True)])
        self.assertEqual(result, "a,b\n1,0.5\n,true\n")

    def test_quotes_cells_with_commas(self):
        result = csv_text(("function", "value"), [("affine:0.3,-2", 1.0)])
        self.assertEqual(result, 'function,value\n"affine:0.3,-2",1\n')

    def test_floats_round_trip(self):
        result = csv_text(("x",), [(1 / 3,)])
        self.assertEqual(float(result.splitlines()[1]), 1 / 3)


class TestAtomicWriteText(NoSocketsSimpleTestCase):
    def test_writes_file_and_leaves_no_temporary_files(self):
        with tempfile.TemporaryDirectory() as directory:
            # when
            path = atomic_write_text(Path(directory) / "sub" / "out.json", "hello\n")
            # then
            self.assertEqual(path.read_text(encoding="utf-8"), "hello\n")
            self.assertListEqual(os.listdir(path.parent), ["out.json"])

    def test_replaces_existing_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "out.csv"
            path.write_text("old", encoding="utf-8")
            atomic_write_text(path, "new")
            self.assertEqual(path.read_text(encoding="utf-8"), "new")


class TestTextDigest(NoSocketsSimpleTestCase):
    def test_sha256(self):
        self.assertEqual(
            text_digest(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855",
        )
