"""
Differential operators sum l_i(x) D^i (D to the right, Dx = xD + 1), elements of
the quotient algebra Q(x)[D]/<L>, and the action of both on LogSeries.
"""
from __future__ import annotations

import math
from math import comb

from ibasis.core.errors import ZeroOperator
from ibasis.core.exactmath import RatFun, UniPoly, common_denominator
from ibasis.core.logseries import INF, LogSeries, laurent_data


def _as_ratfun(value) -> RatFun:
    return RatFun.coerce(value)


# -----------------------------------------------------------
# OPERATORS
# -----------------------------------------------------------
class OrePoly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_as_ratfun(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def D(cls):
        return cls((0, 1))

    @classmethod
    def x(cls):
        return cls((UniPoly.gen("x"),))

    @classmethod
    def constant(cls, c):
        return cls((c,))

    def is_zero(self) -> bool:
        return not self.coeffs

    def order(self) -> int:
        return ore_order(self)

    @property
    def lc(self) -> RatFun:
        if not self.coeffs:
            raise ZeroOperator("zero operator has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> RatFun:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return RatFun(0)

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.coeffs)

    def is_d_free(self) -> bool:
        return len(self.coeffs) <= 1

    def clear_denominators(self) -> "OrePoly":
        """Left-multiply by the common denominator, giving polynomial coefficients."""
        den = common_denominator(self.coeffs)
        return OrePoly([c * den for c in self.coeffs])

    # ----- arithmetic -----
    @staticmethod
    def _lift(other):
        if isinstance(other, OrePoly):
            return other
        try:
            return OrePoly.constant(other)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return OrePoly([self.coeff(i) + o.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return OrePoly([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ore_mul(self, o)

    def __rmul__(self, other):
        # scalar on the left multiplies coefficientwise
        c = _as_ratfun(other)
        return OrePoly([c * a for a in self.coeffs])

    def __pow__(self, k: int):
        result = OrePoly.constant(1)
        for _ in range(k):
            result = ore_mul(result, self)
        return result

    def __eq__(self, other):
        if not isinstance(other, OrePoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"OrePoly({list(self.coeffs)!r})"

    def __str__(self):
        from ibasis.core.parser import format_operator
        return format_operator(self)


def ore_order(A: OrePoly) -> int:
    if not A.coeffs:
        raise ZeroOperator("order of the zero operator")
    return len(A.coeffs) - 1


def ore_mul(A: OrePoly, B: OrePoly) -> OrePoly:
    """Product in Q(x)[D] using D^i b = sum_k C(i, k) b^(k) D^(i-k)."""
    if A.is_zero() or B.is_zero():
        return OrePoly()
    out = [RatFun(0)] * (len(A.coeffs) + len(B.coeffs) - 1)
    for j, b in enumerate(B.coeffs):
        if b.is_zero():
            continue
        derivs = [b]
        for i, a in enumerate(A.coeffs):
            if a.is_zero():
                continue
            while len(derivs) <= i:
                derivs.append(derivs[-1].derivative())
            for k in range(i + 1):
                bk = derivs[k]
                if bk.is_zero():
                    break
                out[i - k + j] = out[i - k + j] + a * bk * comb(i, k)
    return OrePoly(out)


# -----------------------------------------------------------
# ELEMENTS OF Q(x)[D]/<L>
# -----------------------------------------------------------
class BasisElement:
    """c_0 + c_1 D + ... + c_{r-1} D^{r-1} modulo L; always r coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(_as_ratfun(c) for c in coeffs)

    @classmethod
    def unit(cls, r: int, k: int) -> "BasisElement":
        return cls([1 if i == k else 0 for i in range(r)])

    @classmethod
    def scalar(cls, r: int, c) -> "BasisElement":
        return cls([c] + [0] * (r - 1))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def order(self) -> int:
        """Highest index with a nonzero coefficient, -1 for zero."""
        for i in range(len(self.coeffs) - 1, -1, -1):
            if not self.coeffs[i].is_zero():
                return i
        return -1

    @property
    def lc(self) -> RatFun:
        k = self.order()
        return self.coeffs[k] if k >= 0 else RatFun(0)

    def is_zero(self) -> bool:
        return self.order() < 0

    def as_operator(self) -> OrePoly:
        return OrePoly(self.coeffs)

    def denominator(self) -> UniPoly:
        return common_denominator(self.coeffs)

    def normalized(self) -> "BasisElement":
        """Scale by the rational making the leading coefficient's numerator monic."""
        lc = self.lc
        if lc.is_zero() or lc.num.lc == 1:
            return self
        return self.scale(1 / lc.num.lc)

    def scale(self, c) -> "BasisElement":
        c = _as_ratfun(c)
        return BasisElement([c * a for a in self.coeffs])

    def __add__(self, other):
        if not isinstance(other, BasisElement):
            return NotImplemented
        return BasisElement([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return BasisElement([-a for a in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, BasisElement):
            return NotImplemented
        return BasisElement([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rmul__(self, other):
        return self.scale(other)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __eq__(self, other):
        if not isinstance(other, BasisElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"BasisElement({list(self.coeffs)!r})"

    def __str__(self):
        from ibasis.core.parser import format_operator
        return format_operator(self.as_operator())


def _tail(L: OrePoly):
    """D^r = sum tail[i] D^i modulo L."""
    r = ore_order(L)
    lr = L.lc
    return [-(L.coeff(i) / lr) for i in range(r)]


def d_times(L: OrePoly, B: BasisElement) -> BasisElement:
    """The class of D * B modulo L."""
    r = ore_order(L)
    out = [RatFun(0)] * r
    carry = RatFun(0)
    for i, c in enumerate(B.coeffs):
        if c.is_zero():
            continue
        out[i] = out[i] + c.derivative()
        if i + 1 < r:
            out[i + 1] = out[i + 1] + c
        else:
            carry = c
    if not carry.is_zero():
        for i, t in enumerate(_tail(L)):
            out[i] = out[i] + carry * t
    return BasisElement(out)


def reduce_pow(L: OrePoly, k: int) -> BasisElement:
    r = ore_order(L)
    if k < r:
        return BasisElement.unit(r, k)
    e = BasisElement.unit(r, r - 1)
    for _ in range(k - r + 1):
        e = d_times(L, e)
    return e


def reduce_mod(L: OrePoly, P: OrePoly) -> BasisElement:
    """Remainder of P modulo L as an element of the quotient algebra."""
    r = ore_order(L)
    acc = BasisElement([0] * r)
    power = BasisElement.unit(r, 0)
    for k, c in enumerate(P.coeffs):
        if k > 0:
            power = d_times(L, power)
        if not c.is_zero():
            acc = acc + power.scale(c)
    return acc


# -----------------------------------------------------------
# ACTION ON SERIES
# -----------------------------------------------------------
def apply_to_series(B, f: LogSeries, target=None) -> LogSeries:
    """
    B * f for an OrePoly or BasisElement B. Each coefficient is expanded just far
    enough to fill the known range of f (or up to `target`, which an exact f needs).
    """
    field = f.field
    total = LogSeries.zero(field)
    g = f
    for k, c in enumerate(B.coeffs):
        if k > 0:
            g = g.derivative()
        if c.is_zero() or g.is_known_zero():
            continue
        data = laurent_data(c, field)
        need = 1
        for cls, bound in g.cutoffs.items():
            reach = data.valuation + bound
            if target is not None:
                reach = min(reach, target)
            if reach == INF:
                raise ValueError("an exact series needs an explicit target")
            need = max(need, math.ceil(reach - data.valuation - g.class_valuation(cls)))
        total = total + data.series(field, need) * g
    if target is not None:
        total = total.truncate(target)
    return total
