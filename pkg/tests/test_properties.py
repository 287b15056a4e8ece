"""Seeded randomized checks of the algebraic laws the library relies on."""
import random
from fractions import Fraction

import pytest
import sympy

from conftest import EX_LOG, EX_RATIONAL_EXPONENTS, EX_THIRD_ORDER, X, op, poly
from ibasis.core.closure import integral_basis, module_equal
from ibasis.core.exactmath import NumberField, RatFun, UniPoly, poly_gcd, squarefree_part
from ibasis.core.localsolver import PointKind, classify_point, fundamental_system, indicial_roots
from ibasis.core.logseries import IotaPolicy, LogSeries, is_integral, residue_class, series_det
from ibasis.core.oreops import BasisElement, OrePoly, apply_to_series, reduce_pow
from ibasis.core.parser import parse_operator

CLASSES = [Fraction(0), Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4)]


def random_poly(rng, degree, bound=4):
    return UniPoly([Fraction(rng.randint(-bound, bound)) for _ in range(degree + 1)])


def nonzero_poly(rng, degree, bound=4):
    while True:
        p = random_poly(rng, degree, bound)
        if not p.is_zero():
            return p


# -----------------------------------------------------------
# IOTA POLICY AND INTEGRALITY
# -----------------------------------------------------------
def test_default_policy_is_subadditive():
    rng = random.Random(1)
    policy = IotaPolicy()
    for _ in range(500):
        c1 = Fraction(rng.randint(0, 11), 12)
        c2 = Fraction(rng.randint(0, 11), 12)
        j1, j2 = rng.randint(0, 4), rng.randint(0, 4)
        assert policy.iota(c1, j1) + policy.iota(c2, j2) >= policy.iota(c1 + c2, j1 + j2)


def iota_table(policy, q, jmax):
    """q * iota(k/q, j) for k < q and j <= jmax, as integers."""
    table = []
    for j in range(jmax + 1):
        row = []
        for k in range(q):
            value = policy.iota(Fraction(k, q), j) * q
            assert value.denominator == 1
            row.append(int(value))
        table.append(row)
    return table


def test_default_policy_axioms_on_small_denominators():
    policy = IotaPolicy()
    assert policy.iota(0, 0) == 0
    for q in range(1, 65):
        for k in range(q):
            c = Fraction(k, q)
            for j in range(9):
                assert residue_class(policy.iota(c, j)) == c
        table = iota_table(policy, q, 16)
        for j1 in range(9):
            for j2 in range(9):
                lhs1, lhs2, rhs = table[j1], table[j2], table[j1 + j2]
                for k1 in range(q):
                    for k2 in range(q):
                        assert lhs1[k1] + lhs2[k2] >= rhs[(k1 + k2) % q]


def random_integral_series(rng, field, policy):
    coeffs = {}
    for _ in range(rng.randint(1, 4)):
        cls = rng.choice(CLASSES)
        j = rng.randint(0, 2)
        mu = policy.iota(cls, j) + rng.randint(0, 3)
        coeffs[(mu, j)] = rng.choice([-3, -2, -1, 1, 2, 3])
    return LogSeries(field, coeffs)


def test_integral_series_form_a_ring():
    rng = random.Random(2)
    field = NumberField.rational(0)
    policy = IotaPolicy()
    for _ in range(200):
        f = random_integral_series(rng, field, policy)
        g = random_integral_series(rng, field, policy)
        assert is_integral(f, policy)
        assert is_integral(f + g, policy)
        assert is_integral(f * g, policy)


def test_lowering_an_exponent_breaks_integrality():
    rng = random.Random(3)
    field = NumberField.rational(0)
    policy = IotaPolicy()
    for _ in range(200):
        cls = rng.choice(CLASSES)
        j = rng.randint(0, 3)
        mu = policy.iota(cls, j)
        assert is_integral(LogSeries.monomial(field, mu, j), policy)
        assert not is_integral(LogSeries.monomial(field, mu - 1, j), policy)
        assert residue_class(mu - 1) == cls


# -----------------------------------------------------------
# ORDINARY POINTS
# -----------------------------------------------------------
def random_ordinary_case(rng):
    """(L, a) with a an ordinary point of a random polynomial operator L."""
    while True:
        r = rng.randint(1, 3)
        coeffs = [random_poly(rng, rng.randint(0, 2)) for _ in range(r)]
        coeffs.append(nonzero_poly(rng, rng.randint(0, 2)))
        a = rng.randint(-3, 3)
        if coeffs[-1](a) != 0:
            return OrePoly(coeffs), a


def test_ordinary_points_have_exponents_zero_to_r():
    rng = random.Random(4)
    for _ in range(100):
        L, a = random_ordinary_case(rng)
        assert classify_point(L, a) is PointKind.ORDINARY
        assert indicial_roots(L, a) == [(Fraction(k), 1) for k in range(L.order())]


def test_series_solutions_are_annihilated():
    rng = random.Random(5)
    for _ in range(50):
        L, a = random_ordinary_case(rng)
        for s in fundamental_system(L, a, terms=5):
            assert apply_to_series(L, s).terms() == []


def test_classical_wronskian_identity():
    # l_r * W' + l_{r-1} * W = 0
    rng = random.Random(6)
    for _ in range(50):
        L, a = random_ordinary_case(rng)
        r = L.order()
        row = fundamental_system(L, a, terms=6)
        rows = []
        for _ in range(r):
            rows.append(row)
            row = [f.derivative() for f in row]
        W = series_det(rows)
        first_order = OrePoly([L.coeff(r - 1), L.coeff(r)])
        assert apply_to_series(first_order, W).terms() == []


# -----------------------------------------------------------
# OPERATOR ALGEBRA
# -----------------------------------------------------------
def random_small_operator(rng):
    coeffs = []
    for _ in range(rng.randint(1, 3)):
        den = nonzero_poly(rng, 1, 3) if rng.random() < 0.3 else poly(1)
        coeffs.append(RatFun(random_poly(rng, rng.randint(0, 2), 3), den))
    return OrePoly(coeffs)


def test_products_are_associative_and_distributive():
    rng = random.Random(12)
    for _ in range(40):
        A, B, C = (random_small_operator(rng) for _ in range(3))
        assert (A * B) * C == A * (B * C)
        assert A * (B + C) == A * B + A * C
        assert (A + B) * C == A * C + B * C


def known_terms(series, bound):
    return [(t.exponent, t.logpow, t.coefficient) for t in series.terms() if t.exponent < bound]


def common_horizon(*series):
    return min([b for s in series for b in s.cutoffs.values()] + [float("inf")])


def test_action_on_series_respects_products():
    rng = random.Random(13)
    field = NumberField.rational(0)
    for _ in range(40):
        A = OrePoly([random_poly(rng, rng.randint(0, 2), 3) for _ in range(rng.randint(1, 3))])
        B = OrePoly([random_poly(rng, rng.randint(0, 2), 3) for _ in range(rng.randint(1, 3))])
        if A.is_zero() or B.is_zero():
            continue
        f = LogSeries(field, {(k, 0): rng.randint(-3, 3) for k in range(8)}, {0: 8})
        lhs = apply_to_series(A * B, f)
        rhs = apply_to_series(A, apply_to_series(B, f))
        bound = common_horizon(lhs, rhs)
        assert known_terms(lhs, bound) == known_terms(rhs, bound)


def test_low_powers_of_d_reduce_to_unit_vectors():
    rng = random.Random(14)
    for _ in range(30):
        L, a = random_ordinary_case(rng)
        r = L.order()
        for k in range(r):
            assert reduce_pow(L, k) == BasisElement.unit(r, k)
        sols = fundamental_system(L, a, terms=8)
        for k in range(r, r + 3):
            reduced = reduce_pow(L, k)
            for s in sols:
                direct = apply_to_series(OrePoly.D() ** k, s)
                via = apply_to_series(reduced, s)
                bound = common_horizon(direct, via)
                assert known_terms(direct, bound) == known_terms(via, bound)


# -----------------------------------------------------------
# BASES
# -----------------------------------------------------------
@pytest.mark.parametrize("text", [EX_LOG, EX_RATIONAL_EXPONENTS, EX_THIRD_ORDER, "1 + x*D"])
def test_denominators_divide_powers_of_leading_coefficient(text):
    L = op(text).clear_denominators()
    lc = L.lc.num
    for e in integral_basis(L):
        d = e.denominator()
        assert (lc ** d.degree() % d).is_zero()


def random_unimodular(rng, n):
    """Upper unitriangular over Q[x], scaled by constants, rows shuffled."""
    M = [[RatFun(0)] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = RatFun(rng.choice([-2, -1, 1, 3]))
        for j in range(i + 1, n):
            M[i][j] = RatFun(random_poly(rng, rng.randint(0, 2), 3))
    rng.shuffle(M)
    return M


def transform(M, elements):
    out = []
    for row in M:
        acc = 0 * elements[0]
        for c, e in zip(row, elements):
            acc = acc + c * e
        out.append(acc)
    return out


def test_module_equal_under_unimodular_change():
    rng = random.Random(7)
    base = list(integral_basis(op(EX_LOG)))
    for _ in range(40):
        M = random_unimodular(rng, len(base))
        moved = transform(M, base)
        assert module_equal(base, moved)
        assert module_equal(moved, base)


def test_module_equal_detects_a_proper_submodule():
    rng = random.Random(8)
    base = list(integral_basis(op(EX_LOG)))
    for _ in range(40):
        moved = transform(random_unimodular(rng, len(base)), base)
        k = rng.randrange(len(moved))
        moved[k] = RatFun(X - rng.randint(-2, 2)) * moved[k]
        assert not module_equal(base, moved)
        assert module_equal(moved, base) is False


# -----------------------------------------------------------
# PARSING
# -----------------------------------------------------------
def random_operator(rng):
    coeffs = []
    for _ in range(rng.randint(1, 4)):
        num = random_poly(rng, rng.randint(0, 3), 5)
        den = nonzero_poly(rng, rng.randint(0, 2), 5) if rng.random() < 0.5 else poly(1)
        coeffs.append(RatFun(num, den))
    coeffs.append(RatFun(nonzero_poly(rng, rng.randint(0, 2), 5), nonzero_poly(rng, rng.randint(0, 1), 5)))
    return OrePoly(coeffs)


def test_print_then_parse_random_operators():
    rng = random.Random(9)
    for _ in range(200):
        L = random_operator(rng)
        assert parse_operator(str(L)) == L


# -----------------------------------------------------------
# ORACLE
# -----------------------------------------------------------
def test_gcd_agrees_with_sympy():
    x = sympy.Symbol("x")
    rng = random.Random(10)

    def to_sympy(p):
        return sum(sympy.Rational(c.numerator, c.denominator) * x ** k for k, c in enumerate(p.coeffs))

    for _ in range(200):
        common = nonzero_poly(rng, rng.randint(0, 2))
        p = nonzero_poly(rng, rng.randint(0, 3)) * common
        q = nonzero_poly(rng, rng.randint(0, 3)) * common
        expected = sympy.Poly(sympy.gcd(to_sympy(p), to_sympy(q)), x).monic().all_coeffs()
        expected = [Fraction(int(c.p), int(c.q)) for c in reversed(expected)]
        assert list(poly_gcd(p, q).coeffs) == expected


def test_squarefree_part_agrees_with_sympy():
    x = sympy.Symbol("x")
    rng = random.Random(11)
    for _ in range(200):
        p = nonzero_poly(rng, rng.randint(0, 2)) ** rng.randint(1, 3) * nonzero_poly(rng, rng.randint(0, 2))
        if p.degree() < 1:
            continue
        expr = sum(sympy.Rational(c.numerator, c.denominator) * x ** k for k, c in enumerate(p.coeffs))
        expected = sympy.Poly(sympy.sqf_part(expr), x).monic().all_coeffs()
        expected = [Fraction(int(c.p), int(c.q)) for c in reversed(expected)]
        assert list(squarefree_part(p).coeffs) == expected
