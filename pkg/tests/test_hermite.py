from fractions import Fraction

import pytest

from conftest import EX_HALF, EX_HERMITE, X, op, poly
from ibasis.core.closure import IntegralBasis
from ibasis.core.errors import BadDenominatorShape, ReductionObstruction
from ibasis.core.exactmath import RatFun
from ibasis.core.hermite import BasisVector, derivative_matrix, hermite_reduce
from ibasis.core.oreops import BasisElement


def hermite_basis():
    L = op(EX_HERMITE)
    elements = (
        BasisElement([1, 0]),
        BasisElement([RatFun(-1, 2 * X - 1), RatFun(2 * X, 2 * X - 1)]),
    )
    return IntegralBasis(L, elements)


def worked_integrand():
    a = (poly(-11, 37, 4), poly(-1, -1, 40, -28))
    return BasisVector(hermite_basis(), a, poly(4), poly(0, -1, 1), 2)


# -----------------------------------------------------------
# DERIVATIVE MATRIX
# -----------------------------------------------------------
def test_derivative_matrix_of_hermite_basis():
    basis = hermite_basis()
    M = derivative_matrix(basis.operator, basis)
    assert M.rows == (
        (RatFun(1, 2 * X), RatFun(2 * X - 1, 2 * X)),
        (RatFun(0), RatFun(1)),
    )


def test_derivative_matrix_of_standard_basis_is_companion():
    L = op(EX_HALF)
    M = derivative_matrix(L, [BasisElement([1, 0]), BasisElement([0, 1])])
    assert M.rows == (
        (RatFun(0), RatFun(1)),
        (RatFun(1 - 2 * X, 2 * X), RatFun(4 * X - 1, 2 * X)),
    )


def test_differentiate_uses_matrix():
    M = derivative_matrix(op("1 - D"), [BasisElement([1])])
    assert M.rows == ((RatFun(1),),)
    assert M.differentiate([RatFun(X)]) == [RatFun(X + 1)]


# -----------------------------------------------------------
# REDUCTION
# -----------------------------------------------------------
def test_worked_integrand_reduces_completely():
    result = hermite_reduce(worked_integrand())
    (step,) = result.steps
    assert step.m == 2
    assert step.b == (poly(Fraction(-11, 2), -2), poly(Fraction(5, 2), -5))
    assert step.c == (poly(), poly())
    assert result.h.is_zero()
    assert result.g.m == 1
    assert result.antiderivative() == BasisElement([
        RatFun(-(2 * X + 3), X * (X - 1)),
        RatFun(-5, X - 1),
    ])


def test_simple_pole_is_left_alone():
    f = BasisVector(IntegralBasis(op("1 - D"), (BasisElement([1]),)), [poly(1)], poly(1), X, 1)
    result = hermite_reduce(f)
    assert result.steps == ()
    assert result.h == f
    assert result.g.is_zero()


def test_exponential_integrand():
    # 1/x^2 * e^x = D(-e^x / x) + e^x / x
    basis = IntegralBasis(op("1 - D"), (BasisElement([1]),))
    result = hermite_reduce(BasisVector(basis, [poly(1)], poly(1), X, 2))
    assert result.g.numerators == (poly(-1),)
    assert result.h.numerators == (poly(1),)
    assert result.h.m == 1
    assert result.antiderivative() == BasisElement([RatFun(-1, X)])


def test_logarithmic_integrand_is_an_obstruction():
    # y = x, f = 1/x^2 * y = 1/x has no rational antiderivative
    basis = IntegralBasis(op("x*D - 1"), (BasisElement([1]),))
    with pytest.raises(ReductionObstruction) as info:
        hermite_reduce(BasisVector(basis, [poly(1)], poly(1), X, 2))
    g, rest = info.value.partial
    assert g.is_zero()
    assert rest.m == 2


@pytest.mark.parametrize(
    "u, v, m",
    [
        (poly(1), X * X, 2),
        (X, X * (X - 1), 2),
        (poly(1), poly(0), 2),
        (poly(1), X, -1),
    ],
)
def test_bad_denominator_shapes(u, v, m):
    basis = IntegralBasis(op("1 - D"), (BasisElement([1]),))
    with pytest.raises(BadDenominatorShape):
        BasisVector(basis, [poly(1)], u, v, m)


def test_numerator_count_must_match_basis():
    with pytest.raises(BadDenominatorShape):
        BasisVector(hermite_basis(), [poly(1)], poly(1), X, 2)
