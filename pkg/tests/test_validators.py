# pylint: disable=missing-module-docstring, missing-function-docstring, missing-class-docstring

import json
import unittest
from fractions import Fraction
from pathlib import Path
from unittest.mock import mock_open, patch
import nilbohr.validators as local_validators
from nilbohr.errors import ParameterError
from nilbohr.sequences import sequence_spec
from nilbohr.setalg import index_set
from nilbohr.toruspoly import RealPolynomialApprox, TorusPoint


class TestParseRational(unittest.TestCase):
    def test_valid_forms(self):
        self.assertEqual(local_validators.parse_rational("3/4"), Fraction(3, 4))
        self.assertEqual(local_validators.parse_rational(5), Fraction(5))
        self.assertEqual(local_validators.parse_rational("-2/6"), Fraction(-1, 3))
        self.assertEqual(local_validators.parse_rational(" 1/2 "), Fraction(1, 2))

    def test_convergent_form(self):
        self.assertEqual(local_validators.parse_rational("cf:sqrt(2):8"), Fraction(1393, 985))

    def test_zero_denominator_names_field(self):
        with self.assertRaises(ParameterError) as context:
            local_validators.parse_rational("1/0", "epsilon")
        self.assertEqual(context.exception.field, "epsilon")

    def test_invalid_forms(self):
        for text in ("abc", "1.5", True, 0.25, "1/2/3"):
            with self.assertRaises(ParameterError):
                local_validators.parse_rational(text, "x")


class TestFields(unittest.TestCase):
    def test_int_field_bounds(self):
        self.assertEqual(local_validators.int_field({"k": 3}, "k"), 3)
        with self.assertRaises(ParameterError):
            local_validators.int_field({"k": 9}, "k")
        with self.assertRaises(ParameterError):
            local_validators.int_field({"N": 0}, "N", low=1)

    def test_int_field_type(self):
        with self.assertRaises(ParameterError):
            local_validators.int_field({"k": True}, "k")
        with self.assertRaises(ParameterError):
            local_validators.int_field({"k": "3"}, "k")

    def test_missing_and_default(self):
        self.assertEqual(local_validators.int_field({}, "k", 2), 2)
        with self.assertRaises(ParameterError) as context:
            local_validators.int_field({}, "k")
        self.assertEqual(context.exception.field, "k")

    def test_rational_field_lower_bound(self):
        self.assertEqual(local_validators.rational_field({"tol": "1/3"}, "tol", low=0), Fraction(1, 3))
        with self.assertRaises(ParameterError):
            local_validators.rational_field({"tol": "-1/3"}, "tol", low=0)


class TestBuildConfig(unittest.TestCase):
    def test_thm_a(self):
        raw = {"p": ["0", "cf:1/sqrt(2):8"], "n": "id", "k": 2, "N": 16}
        config = local_validators.build_config("thm-a", raw)
        self.assertEqual(config.params["p"], RealPolynomialApprox((0, Fraction(408, 577))))
        self.assertEqual(config.params["n"], list(range(1, 17)))
        self.assertEqual(config.params["epsilon"], Fraction(1, 20))
        self.assertEqual(config.out, Path("results"))
        self.assertEqual(config.workers, 1)
        self.assertEqual(
            config.echo(),
            {
                "command": "thm-a",
                "params": {
                    "p": ["0/1", "408/577"],
                    "n": list(range(1, 17)),
                    "k": 2,
                    "epsilon": "1/20",
                    "N": 16,
                },
            },
        )

    def test_thm_b_defaults(self):
        raw = {"heisenberg": ["1/2", "1/2", "0"], "n": "const:1", "N": 8}
        config = local_validators.build_config("thm-b", raw)
        self.assertEqual(config.params["k"], 3)
        self.assertEqual(config.params["radius"], 2)
        self.assertEqual(config.params["n"], [1] * 8)

    def test_staged_matrix(self):
        raw = {"g": [[1, "1/3", 0], [0, 1, "1/2"], [0, 0, 1]], "N": 4, "pool_size": 10}
        config = local_validators.build_config("staged", raw)
        self.assertEqual(config.params["g"].entry(0, 1), Fraction(1, 3))
        self.assertEqual(config.params["pool_size"], 10)

    def test_bad_matrix(self):
        with self.assertRaises(ParameterError) as context:
            local_validators.build_config("thm-b", {"g": [[1, 1], [1, 1]], "N": 4})
        self.assertEqual(context.exception.field, "g")

    def test_counterexample_default_blocks(self):
        config = local_validators.build_config("counterexample", {"k": 3, "d": 2, "l": 3})
        blocks = config.params["blocks"]
        self.assertEqual(blocks.length, 8)
        self.assertEqual(blocks.block(1), index_set(1, 4, 7, 10))

    def test_counterexample_explicit_blocks(self):
        raw = {"k": 3, "d": 2, "l": 0, "blocks": [[1, 4], [2]]}
        config = local_validators.build_config("counterexample", raw)
        self.assertEqual(config.params["blocks"].block(2), index_set(2))
        raw["blocks"] = [[1, 4], [4]]
        with self.assertRaises(ParameterError) as context:
            local_validators.build_config("counterexample", raw)
        self.assertEqual(context.exception.field, "blocks")

    def test_counterexample_degree_above_gap(self):
        with self.assertRaises(ParameterError) as context:
            local_validators.build_config("counterexample", {"k": 2, "d": 3, "l": 0})
        self.assertEqual(context.exception.field, "d")

    def test_poly_check_from_stable_coefficients(self):
        raw = {"k": 2, "stable": {"d": 1, "coeffs": [{"gamma": [1], "a": "1/3"}]}}
        config = local_validators.build_config("poly-check", raw)
        self.assertEqual(config.params["window"], 6)
        self.assertEqual(config.params["blocks"], 2)
        self.assertEqual(config.params["f"].coefficient((5,)), TorusPoint.of(Fraction(1, 3)))
        self.assertTrue(config.params["f"].coefficient((2,)).is_zero())
        self.assertNotIn("l", config.params)

    def test_poly_check_tracked_defaults(self):
        raw = {"k": 3, "l": 0, "stable": {"d": 1, "coeffs": [{"gamma": [1], "a": "1/3"}]}}
        config = local_validators.build_config("poly-check", raw)
        self.assertEqual(config.params["tracked"], [index_set(1), index_set(2), index_set(3)])

    def test_poly_check_window_multiple(self):
        raw = {"k": 2, "window": 5, "stable": {"d": 1, "coeffs": []}}
        with self.assertRaises(ParameterError) as context:
            local_validators.build_config("poly-check", raw)
        self.assertEqual(context.exception.field, "window")

    def test_hk_check_shapes(self):
        full = local_validators.build_config("hk-check", {"d": 1, "values": ["0", "1/3", "1/2", "5/6"]})
        self.assertTrue(full.params["complete"])
        corner = local_validators.build_config("hk-check", {"d": 1, "values": ["0", "1/3", "1/2"]})
        self.assertFalse(corner.params["complete"])
        with self.assertRaises(ParameterError):
            local_validators.build_config("hk-check", {"d": 1, "values": ["0"] * 5})
        with self.assertRaises(ParameterError):
            local_validators.build_config("hk-check", {"d": 1})

    def test_unknown_command(self):
        with self.assertRaises(ParameterError) as context:
            local_validators.build_config("thm-c", {})
        self.assertEqual(context.exception.field, "command")

    def test_resource_bound(self):
        with self.assertRaises(ParameterError) as context:
            local_validators.build_config("sg-enum", {"N": 25, "k": 1, "bound": 10})
        self.assertEqual(context.exception.field, "N")

    def test_options_override_config(self):
        raw = {"n": "random:50", "N": 5, "k": 1, "bound": 100, "seed": 1, "workers": 2, "out": "a"}
        config = local_validators.build_config("sg-enum", raw, out="b", workers=3, seed=7, emit_latex=True)
        self.assertEqual(config.params["seed"], 7)
        self.assertEqual(config.params["n"], sequence_spec("random:50", 5, 7))
        self.assertEqual(config.workers, 3)
        self.assertEqual(config.out, Path("b"))
        self.assertTrue(config.emit_latex)

    def test_bad_worker_count(self):
        with self.assertRaises(ParameterError) as context:
            local_validators.build_config("sg-enum", {"N": 5, "k": 1, "bound": 10}, workers=0)
        self.assertEqual(context.exception.field, "workers")

    def test_echo_ignores_run_options(self):
        raw = {"N": 5, "k": 1, "bound": 10}
        first = local_validators.build_config("sg-enum", raw, out="x", workers=1)
        second = local_validators.build_config("sg-enum", raw, out="y", workers=4)
        self.assertEqual(first.echo(), second.echo())


class TestLoadConfig(unittest.TestCase):
    def test_reads_object(self):
        with patch("builtins.open", mock_open(read_data=json.dumps({"k": 2}))):
            self.assertEqual(local_validators.load_config("config.json"), {"k": 2})

    def test_invalid_json(self):
        with patch("builtins.open", mock_open(read_data="{k: 2")):
            with self.assertRaises(ParameterError) as context:
                local_validators.load_config("config.json")
        self.assertEqual(context.exception.field, "config")

    def test_not_an_object(self):
        with patch("builtins.open", mock_open(read_data="[1, 2]")):
            with self.assertRaises(ParameterError):
                local_validators.load_config("config.json")

    @patch("builtins.open", side_effect=FileNotFoundError("missing"))
    def test_missing_file(self, _mock_open):
        with self.assertRaises(ParameterError):
            local_validators.load_config("missing.json")


if __name__ == "__main__":
    unittest.main()
