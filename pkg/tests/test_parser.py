from fractions import Fraction

import pytest

from conftest import EX_HERMITE, EX_RATIONAL_EXPONENTS, X, poly
from ibasis.core.errors import OperatorSyntaxError
from ibasis.core.exactmath import NumberField, RatFun, UniPoly
from ibasis.core.localsolver import fundamental_system
from ibasis.core.oreops import OrePoly
from ibasis.core.parser import (
    format_operator,
    format_poly,
    format_ratfun,
    format_series,
    parse_operator,
    parse_polynomial,
    parse_ratfun,
)


# -----------------------------------------------------------
# PARSING
# -----------------------------------------------------------
def test_parse_operator_coefficients():
    L = parse_operator(EX_HERMITE)
    assert L.coeffs == (
        RatFun(2 * X + 1),
        RatFun(-4 * X * X - 1),
        RatFun(4 * X * X - 2 * X),
    )


def test_juxtaposition_and_power_spellings():
    assert parse_operator("2x") == parse_operator("2*x")
    assert parse_operator("x**2*D") == parse_operator("x^2*D")
    assert parse_operator("(x+1)(x-1)") == parse_operator("x^2 - 1")


def test_products_follow_commutation_rule():
    assert parse_operator("D*x") == OrePoly([1, X])
    assert parse_operator("D^2*x") == OrePoly([0, 2, X])


def test_division_multiplies_on_the_right():
    assert parse_operator("1/x") == OrePoly([RatFun(1, X)])
    assert parse_operator("D/x") == OrePoly([RatFun(-1, X * X), RatFun(1, X)])
    assert parse_operator("(1/x)*D") == OrePoly([0, RatFun(1, X)])


@pytest.mark.parametrize(
    "text, offset",
    [
        ("D^", 2),
        ("x +", 3),
        ("x $ 1", 2),
        ("1/(x*D)", 1),
        ("(x + 1", 6),
        ("y*D", 0),
        ("", 0),
        ("1/0", 1),
    ],
)
def test_syntax_errors_carry_offsets(text, offset):
    with pytest.raises(OperatorSyntaxError) as info:
        parse_operator(text)
    assert info.value.offset == offset
    assert f"at offset {offset}" in str(info.value)


def test_parse_ratfun_and_polynomial():
    assert parse_ratfun("(x^2 - 1)/(x - 1)") == RatFun(X + 1)
    assert parse_polynomial("t^2 - 2", var="t").coeffs == poly(-2, 0, 1).coeffs
    assert parse_polynomial("2*x - 1") == poly(-1, 2)
    with pytest.raises(OperatorSyntaxError):
        parse_ratfun("x*D")
    with pytest.raises(OperatorSyntaxError):
        parse_polynomial("1/x")


# -----------------------------------------------------------
# PRINTING
# -----------------------------------------------------------
def test_format_poly():
    assert format_poly(poly(-1, 2)) == "2*x - 1"
    assert format_poly(poly(4, 0, -4, 0, 1)) == "x^4 - 4*x^2 + 4"
    assert format_poly(poly(0, Fraction(-1, 3))) == "-1/3*x"
    assert format_poly(poly()) == "0"


def test_format_ratfun():
    assert format_ratfun(RatFun(-3, 2 * X ** 3)) == "-3/(2*x^3)"
    assert format_ratfun(RatFun(1, X ** 3)) == "1/x^3"
    assert format_ratfun(RatFun(X + 1, X)) == "(x + 1)/x"
    assert format_ratfun(RatFun(Fraction(1, 3), X - 1)) == "1/(3*x - 3)"


def test_format_operator():
    assert format_operator(parse_operator("x^3*D^3 + x*D - 1")) == "x^3*D^3 + x*D - 1"
    assert format_operator(OrePoly([RatFun(Fraction(9, 2), X ** 3), RatFun(Fraction(-7, 2), X * X), RatFun(1, X)])) == (
        "(1/x)*D^2 - (7/(2*x^2))*D + 9/(2*x^3)"
    )
    assert format_operator(OrePoly([0, -2 * X + 1])) == "-(2*x - 1)*D"
    assert format_operator(OrePoly()) == "0"


@pytest.mark.parametrize(
    "text",
    [
        EX_HERMITE,
        EX_RATIONAL_EXPONENTS,
        "(1/x)*D^2 - (7/(2*x^2))*D + 9/(2*x^3)",
        "-(2*x - 1)*D + 1/(3*x - 3)",
        "1/2*x*D - 1/3",
    ],
)
def test_print_then_parse(text):
    L = parse_operator(text)
    assert parse_operator(str(L)) == L


def test_format_series():
    (sol,) = fundamental_system(parse_operator("1 + x*D"), 0, terms=3)
    assert format_series(sol) == "x^-1 + O(x^2)"
    root = fundamental_system(parse_operator("(2 - x) + 2*(2 - 2*x + x^2)*D + 4*(x - 1)*x*D^2"), 1, terms=2)[1]
    assert format_series(root) == "(x - 1)^(1/2) + O((x - 1)^(5/2))"


def test_format_series_at_algebraic_point():
    field = NumberField(poly(-2, 0, 1, var="t"))
    (sol,) = fundamental_system(parse_operator("(x^4 - 5*x^2 + 6)*D + 2*x^3 - 7*x"), field, terms=1)
    assert format_series(sol) == "(x - t)^(-3/2) + O((x - t)^(-1/2))"


def test_format_series_folds_sign_of_algebraic_coefficient():
    field = NumberField(poly(-2, 0, 1, var="t"))
    (sol,) = fundamental_system(parse_operator("D + x^2 - 2"), field, terms=3)
    assert format_series(sol) == "1 - t*(x - t)^2 + O((x - t)^3)"


def test_format_poly_with_algebraic_coefficients():
    F = NumberField(poly(-2, 0, 1, var="t"))
    t = F.gen()
    p = UniPoly([F.one(), -t, 1 - t])
    assert format_poly(p) == "-(t - 1)*x^2 - t*x + 1"
