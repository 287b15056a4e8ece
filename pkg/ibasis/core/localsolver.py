"""
Local analysis of L at a point a: indicial polynomial, classification,
truncated Frobenius solutions with logarithms, Wronskians and the
truncation orders that make integrality of B*t_i decide integrality of B*b_i.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb

from ibasis.core.config import MAX_WRONSKIAN_TERMS
from ibasis.core.errors import (
    CannotBoundWronskian,
    InvariantViolation,
    IrregularSingularity,
    UnsupportedExponent,
)
from ibasis.core.exactmath import (
    NumberField,
    SplitEvent,
    UniPoly,
    nf_charpoly,
    nullspace,
    poly_gcd,
    rational_roots,
    row_echelon,
    taylor_shift,
)
from ibasis.core.logger import log
from ibasis.core.logseries import (
    INF,
    IotaPolicy,
    LogSeries,
    as_point_field,
    is_integral,
    residue_class,
    series_det,
)
from ibasis.core.oreops import OrePoly, apply_to_series, ore_order


class PointKind(Enum):
    ORDINARY = "ordinary"
    REGULAR_SINGULAR = "regular-singular"
    IRREGULAR = "irregular"


def describe_point(field: NumberField) -> str:
    if field.is_rational():
        return str(field.rational_value())
    from ibasis.core.parser import format_poly
    return f"root of {format_poly(field.modulus)}"


def _falling_factorial(i: int) -> UniPoly:
    p = UniPoly((1,), "nu")
    for m in range(i):
        p = p * UniPoly((-m, 1), "nu")
    return p


# -----------------------------------------------------------
# L SHIFTED TO z = x - a
# -----------------------------------------------------------
class _LocalOperator:
    """
    L with polynomial coefficients expanded at the point. Terms are grouped by
    shift s = k - i - s0: the coefficient l_{i,k} z^k D^i sends z^nu to z^(nu + s + s0).
    Q_s(nu) = sum over that group of l_{i,k} * nu(nu-1)...(nu-i+1); Q_0 is the indicial polynomial.
    """

    def __init__(self, L: OrePoly, field: NumberField):
        L = L.clear_denominators()
        self.order = ore_order(L)
        self.field = field
        alpha = field.gen()
        expansions = [taylor_shift(c.num, alpha) for c in L.coeffs]
        vals = []
        for exp in expansions:
            v = None
            for k, c in enumerate(exp):
                if not c.is_zero():
                    v = k
                    break
            vals.append(v)
        self.valuations = vals
        self.shift0 = min(v - i for i, v in enumerate(vals) if v is not None)

        groups = {}
        for i, exp in enumerate(expansions):
            for k, c in enumerate(exp):
                if not c:
                    continue
                s = k - i - self.shift0
                if s < 0:
                    continue
                groups[s] = groups.get(s, UniPoly((), "nu")) + _falling_factorial(i) * c
        self.shift_polys = groups
        self.max_shift = max(groups)
        self._deriv_cache = {}

        r = self.order
        if not expansions[r][0].is_zero():
            self.kind = PointKind.ORDINARY
        elif vals[r] - r == self.shift0:
            self.kind = PointKind.REGULAR_SINGULAR
        else:
            self.kind = PointKind.IRREGULAR

    @property
    def indicial(self) -> UniPoly:
        return self.shift_polys[0]

    def shift_value(self, s: int, l: int, nu: Fraction):
        """l-th derivative of Q_s at nu."""
        if s not in self.shift_polys:
            return self.field.zero()
        key = (s, l)
        poly = self._deriv_cache.get(key)
        if poly is None:
            poly = self.shift_polys[s]
            for _ in range(l):
                poly = poly.derivative()
            self._deriv_cache[key] = poly
        value = poly(nu)
        return value if not isinstance(value, (int, Fraction)) else self.field.coerce(value)

    def exponents(self) -> list[tuple[Fraction, int]]:
        """Rational indicial roots with multiplicity."""
        ind = self.indicial.monic()
        for c in ind.coeffs:
            if c.is_rational():
                continue
            chi = nf_charpoly(c)
            roots = rational_roots(chi)
            if not roots:
                raise UnsupportedExponent(
                    f"indicial roots at {describe_point(self.field)} are not rational"
                )
            q = roots[0][0]
            g = poly_gcd(self.field.modulus, (c - q).rep)
            raise SplitEvent(self.field.modulus, (g, self.field.modulus // g))
        qpoly = UniPoly([c.rational_value() for c in ind.coeffs], "nu")
        roots = rational_roots(qpoly)
        if sum(m for _, m in roots) != ind.degree():
            raise UnsupportedExponent(
                f"indicial polynomial {qpoly} at {describe_point(self.field)} has irrational roots"
            )
        return roots


def _local(L, point) -> _LocalOperator:
    return _LocalOperator(L, as_point_field(point))


# -----------------------------------------------------------
# FROBENIUS SOLUTIONS
# -----------------------------------------------------------
@dataclass(frozen=True)
class _Solution:
    series: LogSeries
    exponent: Fraction
    leading_logpow: int
    logdegree: int
    base: Fraction
    offset: int


def _class_groups(roots):
    groups = {}
    for rho, mult in roots:
        groups.setdefault(residue_class(rho), []).append((rho, mult))
    return [sorted(g) for _, g in sorted(groups.items())]


def _solve_class(local: _LocalOperator, group, terms: int) -> list[_Solution]:
    """Solutions whose exponents lie in one residue class; coefficients for offsets 0..K."""
    field = local.field
    base = group[0][0]
    n_max = int(group[-1][0] - base)
    total = sum(m for _, m in group)
    K = max(n_max, terms - 1)
    zero = field.zero()
    one = field.one()

    logs = total - 1
    while True:
        size = logs + 1
        index = [(n, j) for n in range(n_max + 1) for j in range(size)]
        pos = {key: k for k, key in enumerate(index)}
        matrix = []
        for n_row in range(n_max + 1):
            for j_row in range(size):
                row = [zero] * len(index)
                for n in range(n_row + 1):
                    s = n_row - n
                    if s > local.max_shift:
                        continue
                    for j in range(j_row, size):
                        l = j - j_row
                        value = local.shift_value(s, l, base + n)
                        if value:
                            row[pos[(n, j)]] = value * comb(j, l)
                matrix.append(row)
        # descending (n, j): each kernel vector's free column is its leading position
        order = sorted(range(len(index)), key=lambda k: index[k], reverse=True)
        kernel = nullspace(matrix, order, one=one, zero=zero)
        if len(kernel) >= total:
            break
        if logs >= local.order - 1:
            raise InvariantViolation(
                f"only {len(kernel)} of {total} solutions found at {describe_point(field)}"
            )
        logs += 1

    size = logs + 1
    out = []
    for vec in kernel:
        coeffs = {}
        for k, (n, j) in enumerate(index):
            if vec[k]:
                coeffs[(n, j)] = vec[k]
        free = min(coeffs)
        for n in range(n_max + 1, K + 1):
            ind_inv = local.shift_value(0, 0, base + n).inverse()
            for j_row in range(size - 1, -1, -1):
                acc = zero
                for s in range(1, min(n, local.max_shift) + 1):
                    for j in range(j_row, size):
                        c = coeffs.get((n - s, j))
                        if c is None:
                            continue
                        l = j - j_row
                        acc = acc + c * local.shift_value(s, l, base + n - s) * comb(j, l)
                for j in range(j_row + 1, size):
                    c = coeffs.get((n, j))
                    if c is None:
                        continue
                    l = j - j_row
                    acc = acc + c * local.shift_value(0, l, base + n) * comb(j, l)
                if acc:
                    coeffs[(n, j_row)] = -acc * ind_inv
        data = {(base + n, j): c for (n, j), c in coeffs.items()}
        series = LogSeries(field, data, {residue_class(base): base + K + 1})
        out.append(
            _Solution(
                series=series,
                exponent=base + free[0],
                leading_logpow=free[1],
                logdegree=max((j for _, j in coeffs), default=0),
                base=base,
                offset=free[0],
            )
        )
    return out


def _solutions(local: _LocalOperator, terms) -> list[_Solution]:
    """
    All r solutions. `terms` is an int (terms per class, counted from the class's
    lowest exponent) or a callable base -> int.
    """
    if local.kind is PointKind.IRREGULAR:
        raise IrregularSingularity(describe_point(local.field))
    sols = []
    for group in _class_groups(local.exponents()):
        want = terms(group[0][0]) if callable(terms) else terms
        sols.extend(_solve_class(local, group, want))
    sols.sort(key=lambda s: (s.exponent, s.leading_logpow))
    if len(sols) != local.order:
        raise InvariantViolation(f"{len(sols)} solutions for an operator of order {local.order}")
    return sols


def _integrality_terms(local: _LocalOperator, margin: int = 2):
    """Terms per class so that every cutoff reaches at least `margin`."""
    groups = {g[0][0]: int(g[-1][0] - g[0][0]) for g in _class_groups(local.exponents())}

    def terms(base):
        return max(groups[base] + 3, math.ceil(margin - base))

    return terms


# -----------------------------------------------------------
# PUBLIC OPERATIONS
# -----------------------------------------------------------
def indicial_polynomial(L: OrePoly, point) -> UniPoly:
    return _local(L, point).indicial


def indicial_roots(L: OrePoly, point) -> list[tuple[Fraction, int]]:
    return _local(L, point).exponents()


def classify_point(L: OrePoly, point) -> PointKind:
    return _local(L, point).kind


def fundamental_system(L: OrePoly, point, terms: int = 6) -> list[LogSeries]:
    return [s.series for s in _solutions(_local(L, point), terms)]


def generalized_wronskian(L: OrePoly, point, elements) -> LogSeries:
    """det(B_i * b_j) for the canonical local solutions b_j."""
    local = _local(L, point)
    r = local.order
    sols = _solutions(local, max(r, 2) + 4)
    matrix = [[apply_to_series(B, s.series) for s in sols] for B in elements]
    return series_det(matrix)


def _classical_wronskian(sols) -> LogSeries:
    r = len(sols)
    rows = []
    row = [s.series for s in sols]
    for _ in range(r):
        rows.append(row)
        row = [f.derivative() for f in row]
    return series_det(rows)


def _wronskian_offset(local: _LocalOperator, max_terms: int) -> int:
    if local.kind is PointKind.ORDINARY:
        return 0
    r = local.order
    sols = _solutions(local, max(r, 2))
    base = sum(s.exponent for s in sols) - Fraction(r * (r - 1), 2)
    terms = max(r, 2)
    while True:
        W = _classical_wronskian(sols)
        val = W.valuation()
        horizon = min(W.cutoffs.values(), default=INF)
        if val is not None and val < horizon:
            m = val - base
            if m.denominator != 1 or m < 0:
                raise InvariantViolation(f"wronskian offset {m} at {describe_point(local.field)}")
            return int(m)
        terms *= 2
        if terms > max_terms:
            raise CannotBoundWronskian(describe_point(local.field), max_terms)
        sols = _solutions(local, terms)


def wronskian_valuation_m(L: OrePoly, point, max_terms: int = MAX_WRONSKIAN_TERMS) -> int:
    return _wronskian_offset(_local(L, point), max_terms)


@dataclass(frozen=True)
class LocalData:
    field: NumberField
    kind: PointKind
    exponents: tuple
    logdegrees: tuple
    m: int
    bounds: tuple
    solutions: tuple

    @property
    def point(self):
        return self.field.gen()

    @property
    def order(self) -> int:
        return len(self.solutions)

    @property
    def wronskian_valuation(self) -> Fraction:
        r = self.order
        return sum(self.exponents, Fraction(0)) - Fraction(r * (r - 1), 2) + self.m

    def exact_solutions(self) -> list[LogSeries]:
        return [t.as_exact() for t in self.solutions]

    def summary(self) -> dict:
        return {
            "point": describe_point(self.field),
            "kind": self.kind.value,
            "exponents": [str(e) for e in self.exponents],
            "logdegrees": list(self.logdegrees),
            "m": self.m,
            "bounds": list(self.bounds),
        }


def _check_independent(solutions, field) -> None:
    positions = sorted({key for s in solutions for key in s.support()})
    matrix = [[s.coefficient(mu, j) for (mu, j) in positions] for s in solutions]
    _, pivots = row_echelon(matrix)
    if len(pivots) != len(solutions):
        raise InvariantViolation(f"dependent local solutions at {describe_point(field)}")


def truncation_bounds(
    L: OrePoly,
    point,
    policy: IotaPolicy | None = None,
    max_terms: int = MAX_WRONSKIAN_TERMS,
    scale: int = 1,
) -> LocalData:
    policy = policy or IotaPolicy()
    local = _local(L, point)
    if local.kind is PointKind.IRREGULAR:
        raise IrregularSingularity(describe_point(local.field))
    r = local.order
    initial = _solutions(local, _integrality_terms(local))
    m = _wronskian_offset(local, max_terms)

    bounds = []
    for si in initial:
        worst = None
        for sj in initial:
            diff = si.exponent - sj.exponent
            for k in range(si.logdegree + r):
                value = policy.iota(diff, k) - diff
                worst = value if worst is None else max(worst, value)
        bounds.append(int(m + worst) * scale)

    # offsets reached per class, then cut each t_i at nu_i + N_i
    reach = {}
    for si, n in zip(initial, bounds):
        reach[si.base] = max(reach.get(si.base, 0), si.offset + n + 1)
    sols = _solutions(local, lambda base: reach[base])
    truncated = tuple(s.series.truncate(s.exponent + n + 1) for s, n in zip(sols, bounds))
    _check_independent(truncated, local.field)

    data = LocalData(
        field=local.field,
        kind=local.kind,
        exponents=tuple(s.exponent for s in sols),
        logdegrees=tuple(s.logdegree for s in initial),
        m=m,
        bounds=tuple(bounds),
        solutions=truncated,
    )
    log(
        f"LOCAL DATA {describe_point(local.field)} -> nu={[str(e) for e in data.exponents]} "
        f"d={list(data.logdegrees)} m={m} N={list(bounds)}"
    )
    return data


def is_locally_integral(L: OrePoly, point, policy: IotaPolicy | None = None) -> bool:
    policy = policy or IotaPolicy()
    local = _local(L, point)
    if local.kind is PointKind.IRREGULAR:
        return False
    sols = _solutions(local, _integrality_terms(local))
    return all(is_integral(s.series, policy) for s in sols)


def local_solutions(L: OrePoly, point, terms) -> list[_Solution]:
    """Solutions with their leading data, for defect scans and display."""
    local = _local(L, point)
    if terms is None:
        terms = _integrality_terms(local)
    return _solutions(local, terms)
