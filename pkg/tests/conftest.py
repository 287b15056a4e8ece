from fractions import Fraction

import pytest

from ibasis.core.exactmath import RatFun, UniPoly
from ibasis.core.logger import clear_logs, reset_progress, set_echo
from ibasis.core.oreops import BasisElement
from ibasis.core.parser import parse_operator, parse_ratfun

# Operators used across the suite.
EX_LOG = "x^3*D^3 + x*D - 1"
EX_RATIONAL_EXPONENTS = "24*x^3*D^3 - 134*x^2*D^2 + 373*x*D - 450"
EX_HALF = "(-1 + 2*x) + (1 - 4*x)*D + 2*x*D^2"
EX_THIRD_ORDER = "9*x^2*D^3 + 9*x*D^2 - D"
EX_SQRT = "(2 - x) + 2*(2 - 2*x + x^2)*D + 4*(x - 1)*x*D^2"
EX_TWO_POINTS = "(x - 1) + D - x*D^2"
EX_HERMITE = "(2*x + 1) - (4*x^2 + 1)*D + 2*(2*x - 1)*x*D^2"
EX_SPLIT = "(x^4 - 5*x^2 + 6)*D + 2*x^3 - 7*x"
EX_IRREGULAR = "(-1 - 2*x) + (x + 2*x^2)*D + (x^3 + x^4)*D^2"


def op(text):
    return parse_operator(text)


def rf(text):
    return parse_ratfun(text)


def poly(*coeffs, var="x"):
    return UniPoly([Fraction(c) for c in coeffs], var)


def element(*texts):
    return BasisElement([parse_ratfun(t) for t in texts])


X = UniPoly.gen("x")
ONE = RatFun(1)


@pytest.fixture(autouse=True)
def clean_logger():
    clear_logs()
    reset_progress()
    set_echo(None)
    yield
    set_echo(None)
