import math

import numpy as np
import pytest

from src.core.expression import FUNCTIONS, MAX_SOURCE_BYTES, format_expression, parse_expression
from src.errors import (
    ExpressionDomainError,
    ExpressionError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)


class TestEvaluation:

    @pytest.mark.parametrize("text, x, expected", [
        ("3.5", 9.0, 3.5),
        ("x^7", 2.0, 128.0),
        ("2^3^2", 0.0, 512.0),
        ("-2^2", 0.0, 4.0),
        ("1-2-3", 0.0, -4.0),
        ("8/4/2", 0.0, 1.0),
        ("2*x+1", 1.5, 4.0),
        ("x^-1", 4.0, 0.25),
        ("exp(0) + cos(0)", 0.0, 2.0),
        ("sqrt(abs(-x))", -4.0, 2.0),
        ("  ( 1 - x ) * exp( x )  ", 0.5, 0.5 * math.exp(0.5)),
        ("-7*exp(x)", 1.0, -7.0 * math.e),
        ("1.5e2 + .5", 0.0, 150.5),
        ("x^0.5", 4.0, 2.0),
    ])
    def test_values(self, text, x, expected):
        assert parse_expression(text)(x) == pytest.approx(expected, rel=1e-15)

    def test_example_exact_solution(self):
        assert parse_expression("(1-x)*exp(x)")(0.5) == pytest.approx(0.82436063535006, rel=1e-13)

    def test_long_expression_evaluates(self):
        expression = parse_expression("+".join(["x"] * 10000))
        assert expression(1.0) == 10000.0

    def test_integer_powers_are_exact(self):
        assert parse_expression("x^7")(3.0) == 2187.0
        assert parse_expression("x^-3")(2.0) == 0.125


class TestSyntaxErrors:

    @pytest.mark.parametrize("text, offset, expected_token", [
        ("1+", 2, "number"),
        ("(1", 2, ")"),
        ("1 $ 2", 2, "end of input"),
        ("", 0, "x"),
        ("2 3", 2, "+"),
        ("sin x", 4, "("),
        ("x * * 2", 4, "function"),
    ])
    def test_offset_and_expected(self, text, offset, expected_token):
        with pytest.raises(ExpressionSyntaxError) as info:
            parse_expression(text)
        assert info.value.offset == offset
        assert expected_token in info.value.expected
        assert f"at byte {offset}" in str(info.value)

    def test_non_ascii_character(self):
        with pytest.raises(ExpressionSyntaxError, match="'é'") as info:
            parse_expression("x + é")
        assert info.value.offset == 4

    def test_number_out_of_range(self):
        with pytest.raises(ExpressionSyntaxError, match="out of range"):
            parse_expression("1e999")

    def test_source_size_limit(self):
        text = "1+" * (MAX_SOURCE_BYTES // 2 + 1) + "1"
        with pytest.raises(ExpressionSyntaxError, match="limit"):
            parse_expression(text)

    def test_deep_nesting_is_reported(self):
        with pytest.raises(ExpressionSyntaxError, match="nested too deeply"):
            parse_expression("(" * 5000 + "x" + ")" * 5000)


class TestUnknownIdentifiers:

    def test_y_is_not_a_variable(self):
        with pytest.raises(UnknownIdentifierError) as info:
            parse_expression("7*exp(x) + y")
        assert info.value.name == 'y'
        assert info.value.offset == 11
        for name in FUNCTIONS:
            assert name in str(info.value)

    def test_unknown_function(self):
        with pytest.raises(UnknownIdentifierError, match="'sinh'"):
            parse_expression("sinh(x)")

    def test_is_an_expression_error(self):
        with pytest.raises(ExpressionError):
            parse_expression("z")


class TestDomainErrors:

    @pytest.mark.parametrize("text, x, match", [
        ("1/ (x-1)", 1.0, "division by zero"),
        ("log(x)", 0.0, "log"),
        ("sqrt(x)", -1.0, "sqrt"),
        ("x^0.5", -1.0, "non-integer power"),
        ("0^-1", 0.0, "division by zero"),
        ("exp(x)", 1000.0, "exp"),
        ("x^2", 1e200, "not finite"),
        ("x^(-400)", 0.1, "power overflows"),
    ])
    def test_raises_with_location(self, text, x, match):
        with pytest.raises(ExpressionDomainError, match=match) as info:
            parse_expression(text)(x)
        assert info.value.x == x

    def test_non_finite_point(self):
        with pytest.raises(ExpressionDomainError):
            parse_expression("x")(math.nan)


class TestFormatting:

    def test_fully_parenthesised(self):
        assert format_expression(parse_expression("-2^2")) == "((-2.0) ^ 2.0)"
        assert str(parse_expression("1-x*exp(x)")) == "(1.0 - (x * exp(x)))"

    @pytest.mark.parametrize("text", [
        "(1-x)*exp(x)",
        "-7*exp(x)",
        "2^3^2 - x/3",
        "sin(x)^2 + cos(x)^2",
        "sqrt(abs(x - 1.5e-1)) * log(x + 1)",
        "-x^-2 + 1/x",
        "x^0.5 - 0.1",
    ])
    def test_reparse_evaluates_identically(self, text):
        original = parse_expression(text)
        reparsed = parse_expression(format_expression(original))
        rng = np.random.default_rng(17)
        for x in rng.uniform(0.1, 2.0, 100):
            assert reparsed(x) == original(x)
