import json
from fractions import Fraction

import pytest

from conftest import X, poly
from ibasis.core.errors import InvalidPolicy, PointMismatch, TruncationTooShort
from ibasis.core.exactmath import NumberField, RatFun
from ibasis.core.logseries import (
    IotaPolicy,
    LogSeries,
    defect,
    is_integral,
    non_integral_terms,
    ratfun_valuation,
    rational_expansion,
    residue_class,
)

AT_ZERO = NumberField.rational(0)
HALF = Fraction(1, 2)


def mono(mu, j=0, coeff=1):
    return LogSeries.monomial(AT_ZERO, Fraction(mu), j, coeff)


# -----------------------------------------------------------
# IOTA
# -----------------------------------------------------------
def test_residue_class():
    assert residue_class(Fraction(-1, 2)) == HALF
    assert residue_class(3) == 0
    assert residue_class(Fraction(7, 3)) == Fraction(1, 3)


def test_default_iota():
    policy = IotaPolicy()
    assert policy.iota(0, 0) == 0
    assert policy.iota(0, 1) == 1
    assert policy.iota(0, 5) == 1
    assert policy.iota(Fraction(-1, 2), 0) == HALF
    assert policy.iota(HALF, 3) == HALF
    assert policy.max_rep == 1


def test_override_applies_from_min_logpow():
    policy = IotaPolicy.from_document({"overrides": [{"class": "0", "min_logpow": 1, "rep": "0"}]})
    assert policy.iota(0, 0) == 0
    assert policy.iota(0, 1) == 0
    assert policy.iota(0, 4) == 0
    assert policy.iota(HALF, 1) == HALF


@pytest.mark.parametrize(
    "doc",
    [
        {"overrides": [{"class": "1/2", "rep": "0"}]},
        {"overrides": [{"class": "1/2", "rep": "3/2"}]},
        {"overrides": [{"class": "1/2", "rep": "-1/2"}]},
        {"overrides": [{"class": "1", "rep": "1"}]},
        {"overrides": [{"class": "0", "rep": "1"}]},
        {"overrides": [{"class": "0", "min_logpow": 1, "rep": "0"}, {"class": "0", "min_logpow": 1, "rep": "1"}]},
        {"overrides": [{"rep": "0"}]},
        {"jmax": 0},
        ["not", "an", "object"],
    ],
)
def test_invalid_policies_are_rejected(doc):
    with pytest.raises(InvalidPolicy):
        IotaPolicy.from_document(doc)


def test_policy_document_round_trip(tmp_path):
    policy = IotaPolicy.from_document({"overrides": [{"class": "0", "min_logpow": 1, "rep": "0"}], "jmax": 8})
    path = tmp_path / "iota.json"
    path.write_text(json.dumps(policy.to_document()), encoding="utf-8")
    assert IotaPolicy.load(str(path)) == policy


# -----------------------------------------------------------
# SERIES
# -----------------------------------------------------------
def test_product_cutoff():
    f = LogSeries(AT_ZERO, {(0, 0): 1, (1, 0): 1}, {0: 3})
    g = LogSeries(AT_ZERO, {(0, 0): 1, (1, 0): -1}, {0: 3})
    h = f * g
    assert h.coefficient(0) == 1
    assert h.coefficient(1) == 0
    assert h.coefficient(2) == -1
    assert h.cutoff(0) == 3


def test_derivative_of_powers_and_logs():
    root = mono(HALF).derivative()
    assert root.coefficient(Fraction(-1, 2)) == HALF
    log_x = mono(0, 1).derivative()
    assert log_x.coefficient(-1) == 1
    assert log_x.max_logpow() == 0


def test_series_at_different_points_do_not_mix():
    other = LogSeries.monomial(NumberField.rational(1), 0)
    with pytest.raises(PointMismatch):
        mono(0) + other


def test_rational_expansion_geometric():
    f = rational_expansion(RatFun(1, 1 - X), 0, 4)
    assert [t.coefficient for t in f.terms()] == [1, 1, 1, 1]
    assert f.cutoff(0) == 4


def test_ratfun_valuation():
    q = RatFun(X * X, X - 1)
    assert ratfun_valuation(q, 0) == 2
    assert ratfun_valuation(q, 1) == -1
    sqrt2 = NumberField(poly(-2, 0, 1, var="t"))
    assert ratfun_valuation(RatFun(1, X * X - 2), sqrt2) == -1


# -----------------------------------------------------------
# INTEGRALITY
# -----------------------------------------------------------
def test_integrality_of_monomials():
    policy = IotaPolicy()
    assert not is_integral(mono(-1), policy)
    assert is_integral(mono(HALF), policy)
    assert not is_integral(mono(0, 1), policy)
    assert is_integral(mono(1, 1), policy)
    assert is_integral(mono(0), policy)


def test_log_override_makes_log_integral():
    policy = IotaPolicy.from_document({"overrides": [{"class": "0", "min_logpow": 1, "rep": "0"}]})
    assert is_integral(mono(0, 1), policy)


def test_non_integral_terms():
    f = mono(-1) + mono(0) + mono(Fraction(-1, 2))
    bad = non_integral_terms(f, IotaPolicy())
    assert [(t.exponent, t.logpow) for t in bad] == [(-1, 0), (Fraction(-1, 2), 0)]


def test_defect():
    policy = IotaPolicy()
    assert defect(mono(-1) + mono(0), policy) == 1
    assert defect(mono(0) + mono(1), policy) == 0
    assert defect(mono(2), policy) == -2
    assert defect(mono(Fraction(-3, 2)), policy) == 2


def test_short_truncation_is_reported():
    f = LogSeries(AT_ZERO, {(-2, 0): 1}, {0: -1})
    with pytest.raises(TruncationTooShort):
        is_integral(f, IotaPolicy())
    with pytest.raises(TruncationTooShort):
        defect(LogSeries(AT_ZERO, {}, {0: 5}), IotaPolicy())
