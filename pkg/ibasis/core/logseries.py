"""
Truncated generalized series  sum c * (x - a)^mu * log(x - a)^j  at a point a,
the iota policy that decides which terms count as integral, and the
integrality / defect tests built on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ibasis.core.config import (
    DEFAULT_JMAX,
    POLICY_DENOMINATOR_CAP,
    POLICY_CHECK_DENOMINATOR,
    POLICY_REP_BOUND,
    load_json_file,
)
from ibasis.core.errors import InvalidPolicy, PointMismatch, TruncationTooShort
from ibasis.core.exactmath import (
    NumberField,
    NumberFieldElem,
    RatFun,
    as_rational,
    taylor_shift,
)

INF = math.inf


def residue_class(mu) -> Fraction:
    """Representative of mu + Z in [0, 1)."""
    mu = as_rational(mu)
    return mu - math.floor(mu)


def as_point_field(point) -> NumberField:
    """Accept a NumberField, its generator, or a rational number."""
    if isinstance(point, NumberField):
        return point
    if isinstance(point, NumberFieldElem):
        if point != point.field.gen():
            raise ValueError("expansion point must be the generator of its field")
        return point.field
    return NumberField.rational(point)


@dataclass(frozen=True)
class Term:
    exponent: Fraction
    logpow: int
    coefficient: NumberFieldElem


# -----------------------------------------------------------
# SERIES
# -----------------------------------------------------------
class LogSeries:
    """
    Known terms keyed by (mu, j) plus a cutoff per residue class:
    every term of class c with mu >= cutoffs[c] is unknown. A class
    with cutoff INF is exact. Classes absent from `cutoffs` are exactly zero.
    """

    __slots__ = ("field", "_coeffs", "cutoffs")

    def __init__(self, field: NumberField, coeffs=None, cutoffs=None):
        cut = {}
        for cls, bound in (cutoffs or {}).items():
            cls = residue_class(cls)
            bound = bound if bound == INF else as_rational(bound)
            cut[cls] = min(cut.get(cls, INF), bound)
        data = {}
        for (mu, j), c in (coeffs or {}).items():
            mu = as_rational(mu)
            if not isinstance(c, NumberFieldElem):
                c = field.coerce(c)
            if not c:
                continue
            cls = residue_class(mu)
            if mu >= cut.get(cls, INF):
                continue
            cut.setdefault(cls, INF)
            data[(mu, j)] = c
        for cls in [c for c, bound in cut.items() if bound == INF]:
            if not any(residue_class(mu) == cls for mu, _ in data):
                del cut[cls]
        self.field = field
        self._coeffs = data
        self.cutoffs = cut

    # ----- constructors -----
    @classmethod
    def zero(cls, field: NumberField) -> "LogSeries":
        return cls(field)

    @classmethod
    def monomial(cls, field: NumberField, mu, j: int = 0, coeff=1, cutoff=None) -> "LogSeries":
        mu = as_rational(mu)
        cut = None if cutoff is None else {residue_class(mu): cutoff}
        return cls(field, {(mu, j): coeff}, cut)

    # ----- inspection -----
    @property
    def point(self) -> NumberFieldElem:
        return self.field.gen()

    def terms(self) -> list[Term]:
        return [Term(mu, j, c) for (mu, j), c in sorted(self._coeffs.items(), key=lambda kv: kv[0])]

    def support(self) -> list[tuple[Fraction, int]]:
        return sorted(self._coeffs)

    def coefficient(self, mu, j: int = 0) -> NumberFieldElem:
        return self._coeffs.get((as_rational(mu), j), self.field.zero())

    def cutoff(self, cls) -> Fraction | float | None:
        return self.cutoffs.get(residue_class(cls))

    def classes(self) -> list[Fraction]:
        return sorted(self.cutoffs)

    def is_exact(self) -> bool:
        return all(bound == INF for bound in self.cutoffs.values())

    def is_known_zero(self) -> bool:
        return not self._coeffs and not self.cutoffs

    def max_logpow(self) -> int:
        return max((j for _, j in self._coeffs), default=0)

    def class_valuation(self, cls):
        """Lowest known exponent in class cls, or its cutoff when no term is known."""
        cls = residue_class(cls)
        exps = [mu for mu, _ in self._coeffs if residue_class(mu) == cls]
        if exps:
            return min(exps)
        return self.cutoffs.get(cls, INF)

    def valuation(self):
        """Lowest exponent with a nonzero coefficient (splitting zero test), None if none is known."""
        for (mu, j), c in sorted(self._coeffs.items(), key=lambda kv: kv[0]):
            if not c.is_zero():
                return mu
        return None

    # ----- transformations -----
    def derivative(self) -> "LogSeries":
        data = {}
        for (mu, j), c in self._coeffs.items():
            if mu != 0:
                key = (mu - 1, j)
                data[key] = data[key] + c * mu if key in data else c * mu
            if j > 0:
                key = (mu - 1, j - 1)
                data[key] = data[key] + c * j if key in data else c * j
        cut = {cls: bound - 1 for cls, bound in self.cutoffs.items()}
        return LogSeries(self.field, data, cut)

    def shift(self, k) -> "LogSeries":
        """Multiply by (x - a)^k."""
        k = as_rational(k)
        data = {(mu + k, j): c for (mu, j), c in self._coeffs.items()}
        cut = {cls + k: bound + k for cls, bound in self.cutoffs.items()}
        return LogSeries(self.field, data, cut)

    def truncate(self, bound) -> "LogSeries":
        """Forget every term with exponent >= bound."""
        cut = {cls: min(b, bound) for cls, b in self.cutoffs.items()}
        return LogSeries(self.field, dict(self._coeffs), cut)

    def as_exact(self) -> "LogSeries":
        """The same known terms, declared exact (for truncations t_i used as finite sums)."""
        return LogSeries(self.field, dict(self._coeffs), {})

    def scale(self, c) -> "LogSeries":
        c = self.field.coerce(c) if not isinstance(c, NumberFieldElem) else c
        return LogSeries(self.field, {k: v * c for k, v in self._coeffs.items()}, dict(self.cutoffs))

    # ----- arithmetic -----
    def __add__(self, other):
        return series_add(self, other)

    def __neg__(self):
        return LogSeries(self.field, {k: -v for k, v in self._coeffs.items()}, dict(self.cutoffs))

    def __sub__(self, other):
        return series_add(self, -other)

    def __mul__(self, other):
        if isinstance(other, LogSeries):
            return series_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, LogSeries):
            return NotImplemented
        return self.field == other.field and self._coeffs == other._coeffs and self.cutoffs == other.cutoffs

    __hash__ = None

    def __repr__(self):
        return f"LogSeries({self.terms()!r}, cutoffs={self.cutoffs!r})"

    def __str__(self):
        from ibasis.core.parser import format_series
        return format_series(self)


def _same_point(f: LogSeries, g: LogSeries) -> None:
    if f.field != g.field:
        raise PointMismatch(f"series at {f.field.modulus} and {g.field.modulus}")


def series_add(f: LogSeries, g: LogSeries) -> LogSeries:
    _same_point(f, g)
    data = dict(f._coeffs)
    for key, c in g._coeffs.items():
        data[key] = data[key] + c if key in data else c
    cut = dict(f.cutoffs)
    for cls, bound in g.cutoffs.items():
        cut[cls] = min(cut.get(cls, INF), bound)
    return LogSeries(f.field, data, cut)


def series_mul(f: LogSeries, g: LogSeries) -> LogSeries:
    _same_point(f, g)
    data = {}
    for (m1, j1), c1 in f._coeffs.items():
        for (m2, j2), c2 in g._coeffs.items():
            key = (m1 + m2, j1 + j2)
            prod = c1 * c2
            data[key] = data[key] + prod if key in data else prod
    # product class c1 + c2 is known below min(v1 + T2, v2 + T1)
    cut = {}
    for c1, t1 in f.cutoffs.items():
        v1 = f.class_valuation(c1)
        for c2, t2 in g.cutoffs.items():
            v2 = g.class_valuation(c2)
            bound = min(v1 + t2, v2 + t1)
            cls = residue_class(c1 + c2)
            cut[cls] = min(cut.get(cls, INF), bound)
    return LogSeries(f.field, data, cut)


def series_det(matrix) -> LogSeries:
    """Determinant of a square matrix of LogSeries (Laplace expansion over column subsets)."""
    n = len(matrix)
    field = matrix[0][0].field
    one = LogSeries.monomial(field, 0)
    memo = {}

    def minor(k, cols):
        if k == n:
            return one
        if cols in memo:
            return memo[cols]
        acc = LogSeries.zero(field)
        for idx, c in enumerate(cols):
            entry = matrix[k][c]
            if entry.is_known_zero():
                continue
            term = entry * minor(k + 1, cols[:idx] + cols[idx + 1:])
            acc = acc + term if idx % 2 == 0 else acc - term
        memo[cols] = acc
        return acc

    return minor(0, tuple(range(n)))


# -----------------------------------------------------------
# RATIONAL FUNCTIONS AS SERIES
# -----------------------------------------------------------
@dataclass(frozen=True)
class LaurentData:
    valuation: int
    num: tuple
    den: tuple
    den_inverse: NumberFieldElem

    def series(self, field: NumberField, terms: int) -> LogSeries:
        out = []
        for k in range(terms):
            acc = self.num[k] if k < len(self.num) else field.zero()
            for i in range(1, min(k, len(self.den) - 1) + 1):
                acc = acc - self.den[i] * out[k - i]
            out.append(acc * self.den_inverse)
        data = {(Fraction(self.valuation + k), 0): c for k, c in enumerate(out)}
        return LogSeries(field, data, {Fraction(0): Fraction(self.valuation + terms)})


@lru_cache(maxsize=4096)
def laurent_data(q: RatFun, field: NumberField) -> LaurentData:
    """Shifted numerator/denominator of q at the field generator, leading zeros stripped."""
    alpha = field.gen()
    num = taylor_shift(q.num, alpha)
    den = taylor_shift(q.den, alpha)
    v = 0
    while den[v].is_zero():
        v += 1
    w = 0
    while num[w].is_zero():
        w += 1
    return LaurentData(w - v, tuple(num[w:]), tuple(den[v:]), den[v].inverse())


def rational_expansion(q, point, terms: int) -> LogSeries:
    """Laurent expansion of q at the point, `terms` terms from its valuation on."""
    field = as_point_field(point)
    q = RatFun.coerce(q)
    if q.is_zero():
        return LogSeries.zero(field)
    return laurent_data(q, field).series(field, terms)


def ratfun_valuation(q, point) -> int:
    field = as_point_field(point)
    q = RatFun.coerce(q)
    if q.is_zero():
        raise ValueError("valuation of zero")
    return laurent_data(q, field).valuation


# -----------------------------------------------------------
# IOTA POLICY
# -----------------------------------------------------------
@dataclass(frozen=True)
class IotaOverride:
    residue: Fraction
    min_logpow: int
    rep: Fraction


@dataclass(frozen=True)
class IotaPolicy:
    """
    iota(c, j): the integrality threshold for exponents of class c at log power j.
    Default: representative in [0, 1) for j = 0 and in (0, 1] for j >= 1.
    An override applies from its min_logpow upward; the largest applicable threshold wins.
    """

    overrides: tuple = ()
    jmax: int = DEFAULT_JMAX

    def __post_init__(self):
        _validate_policy(self)

    def iota(self, cls, j: int) -> Fraction:
        cls = residue_class(cls)
        best = None
        for o in self.overrides:
            if o.residue == cls and o.min_logpow <= j and (best is None or o.min_logpow > best.min_logpow):
                best = o
        if best is not None:
            return best.rep
        if j == 0 or cls != 0:
            return cls
        return Fraction(1)

    def max_iota(self, cls, jmax: int) -> Fraction:
        return max(self.iota(cls, j) for j in range(jmax + 1))

    @property
    def max_rep(self) -> Fraction:
        return max([Fraction(1)] + [o.rep for o in self.overrides])

    @classmethod
    def from_document(cls, doc) -> "IotaPolicy":
        if not isinstance(doc, dict):
            raise InvalidPolicy("policy document must be a JSON object")
        items = []
        try:
            for entry in doc.get("overrides", []):
                items.append(
                    IotaOverride(
                        residue=Fraction(str(entry["class"])),
                        min_logpow=int(entry.get("min_logpow", 0)),
                        rep=Fraction(str(entry["rep"])),
                    )
                )
            jmax = int(doc.get("jmax", DEFAULT_JMAX))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            raise InvalidPolicy(f"malformed policy entry: {e}")
        return cls(tuple(items), jmax)

    @classmethod
    def load(cls, path) -> "IotaPolicy":
        return cls.from_document(load_json_file(path))

    def to_document(self) -> dict:
        return {
            "overrides": [
                {"class": str(o.residue), "min_logpow": o.min_logpow, "rep": str(o.rep)}
                for o in self.overrides
            ],
            "jmax": self.jmax,
        }


def _validate_policy(policy: IotaPolicy) -> None:
    if policy.jmax < 1:
        raise InvalidPolicy("jmax must be at least 1")
    den = 1
    seen = set()
    for o in policy.overrides:
        if not (0 <= o.residue < 1):
            raise InvalidPolicy(f"class {o.residue} is not in [0, 1)")
        if o.min_logpow < 0:
            raise InvalidPolicy("min_logpow must be nonnegative")
        if (o.residue, o.min_logpow) in seen:
            raise InvalidPolicy(f"duplicate override for class {o.residue}, min_logpow {o.min_logpow}")
        seen.add((o.residue, o.min_logpow))
        if residue_class(o.rep) != o.residue:
            raise InvalidPolicy(f"rep {o.rep} is not in class {o.residue} + Z")
        if abs(o.rep) > POLICY_REP_BOUND:
            raise InvalidPolicy(f"rep {o.rep} outside [-1, 1]")
        den = math.lcm(den, o.residue.denominator)
    if den > POLICY_DENOMINATOR_CAP:
        raise InvalidPolicy(f"override denominators need lcm {den} > {POLICY_DENOMINATOR_CAP}")
    if policy.iota(0, 0) != 0:
        raise InvalidPolicy("iota(Z, 0) must be 0")
    if not policy.overrides:
        return

    classes = {Fraction(k, den) for k in range(den)}
    for q in range(1, POLICY_CHECK_DENOMINATOR + 1):
        classes.update(Fraction(k, q) for k in range(q))
    classes = sorted(classes)
    for c1 in classes:
        for c2 in classes:
            for j1 in range(policy.jmax + 1):
                for j2 in range(policy.jmax + 1 - j1):
                    slack = policy.iota(c1, j1) + policy.iota(c2, j2) - policy.iota(c1 + c2, j1 + j2)
                    if slack < 0:
                        raise InvalidPolicy(
                            f"axiom 2 fails for ({c1}, {j1}) + ({c2}, {j2}): slack {slack}"
                        )


def iota_eval(policy: IotaPolicy, cls, j: int) -> Fraction:
    return policy.iota(cls, j)


# -----------------------------------------------------------
# INTEGRALITY
# -----------------------------------------------------------
def _require_truncation(f: LogSeries, policy: IotaPolicy, margin=0) -> None:
    jmax = f.max_logpow()
    for cls, bound in f.cutoffs.items():
        if bound == INF:
            continue
        need = policy.max_iota(cls, jmax) + margin
        if bound < need:
            raise TruncationTooShort(f"class {cls} known below {bound} only, need {need}")


def non_integral_terms(f: LogSeries, policy: IotaPolicy, margin=0) -> list[Term]:
    """Terms with mu - iota(mu + Z, j) < margin and a nonzero coefficient."""
    out = []
    for term in f.terms():
        if term.exponent - policy.iota(term.exponent, term.logpow) >= margin:
            continue
        if not term.coefficient.is_zero():
            out.append(term)
    return out


def is_integral(f: LogSeries, policy: IotaPolicy) -> bool:
    _require_truncation(f, policy)
    return not non_integral_terms(f, policy)


def defect(f: LogSeries, policy: IotaPolicy) -> int:
    """Smallest integer e with (x - a)^e * f integral (may be negative)."""
    worst = None
    for term in f.terms():
        gap = policy.iota(term.exponent, term.logpow) - term.exponent
        if worst is not None and gap <= worst:
            continue
        if not term.coefficient.is_zero():
            worst = gap
    if worst is None:
        raise TruncationTooShort("no known nonzero term")
    jmax = f.max_logpow()
    for cls, bound in f.cutoffs.items():
        if bound != INF and policy.max_iota(cls, jmax) - bound > worst:
            raise TruncationTooShort(f"unknown terms of class {cls} from {bound} on could raise the defect")
    return int(worst)
