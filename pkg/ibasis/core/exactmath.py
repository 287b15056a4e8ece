"""
Exact arithmetic: rationals (fractions.Fraction), dense univariate polynomials,
rational functions over Q, number fields Q[t]/<p> with dynamic evaluation,
and Gaussian elimination over any of them.

Polynomials with rational coefficients are handed to sympy (Poly over QQ) for
products, division, gcds, squarefree parts and factoring; rational matrices go
through DomainMatrix. Polynomials and matrices over Q[t]/<p> stay on the
elimination below, since a zero divisor there has to surface as a SplitEvent.
"""
from __future__ import annotations

from fractions import Fraction

from sympy import Dummy, Poly, Symbol, cancel, fraction, resultant
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from ibasis.core.errors import DivisionByZero, ShapeMismatch, ZeroPolynomial


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def _is_scalar(value) -> bool:
    return isinstance(value, (int, Fraction, NumberFieldElem))


def _invert_scalar(c):
    if isinstance(c, (int, Fraction)):
        if c == 0:
            raise DivisionByZero("division by zero")
        return 1 / Fraction(c)
    return c.inverse()


def poly_sort_key(p: "UniPoly"):
    return (p.degree(), p.coeffs)


def _to_qq(c):
    return QQ(c.numerator, c.denominator)


def _from_sympy_number(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


# -----------------------------------------------------------
# UNIVARIATE POLYNOMIALS
# -----------------------------------------------------------
class UniPoly:
    """Dense polynomial, coefficients low-to-high, over Q or a NumberField."""

    __slots__ = ("coeffs", "var", "_poly")

    def __init__(self, coeffs=(), var: str = "x"):
        cs = [Fraction(c) if isinstance(c, int) else c for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var
        self._poly = None

    @classmethod
    def gen(cls, var="x"):
        return cls((0, 1), var)

    @classmethod
    def from_sympy(cls, poly: Poly, var: str | None = None) -> "UniPoly":
        var = var or str(poly.gen)
        out = cls([_from_sympy_number(c) for c in reversed(poly.all_coeffs())], var)
        if poly.get_domain() == QQ and str(poly.gen) == var:
            out._poly = poly
        return out

    def is_rational(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def to_sympy(self, var: str | None = None) -> Poly:
        """This polynomial as a sympy Poly over QQ in `var` (rational coefficients only)."""
        var = var or self.var
        if self._poly is not None and var == self.var:
            return self._poly
        if not self.is_rational():
            raise TypeError(f"{self!r} has coefficients outside Q")
        rep = [_to_qq(c) for c in reversed(self.coeffs)] or [QQ(0)]
        poly = Poly.from_list(rep, Symbol(var), domain=QQ)
        if var == self.var:
            self._poly = poly
        return poly

    def _over_q_with(self, other: "UniPoly") -> bool:
        return self.is_rational() and other.is_rational()

    @classmethod
    def constant(cls, c, var="x"):
        return cls((c,), var)

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def with_var(self, var: str) -> "UniPoly":
        return UniPoly(self.coeffs, var)

    # ----- arithmetic -----
    def _lift(self, other):
        if isinstance(other, UniPoly):
            return other
        if _is_scalar(other):
            return UniPoly((other,), self.var)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return UniPoly(out, self.var)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs], self.var)

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
        if isinstance(other, UniPoly):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return UniPoly((), self.var)
            if len(a) > 1 and len(b) > 1 and self._over_q_with(other):
                return UniPoly.from_sympy(self.to_sympy() * other.to_sympy(self.var), self.var)
            out = [0] * (len(a) + len(b) - 1)
            for i, ai in enumerate(a):
                if ai == 0:
                    continue
                for j, bj in enumerate(b):
                    out[i + j] = out[i + j] + ai * bj
            return UniPoly(out, self.var)
        if _is_scalar(other):
            return UniPoly([c * other for c in self.coeffs], self.var)
        return NotImplemented

    def __rmul__(self, other):
        if _is_scalar(other):
            return UniPoly([other * c for c in self.coeffs], self.var)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative polynomial power")
        result = UniPoly((1,), self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DivisionByZero("polynomial division by zero")
        dq = o.degree()
        if self.degree() < dq:
            return UniPoly((), self.var), self
        if dq > 0 and self._over_q_with(o):
            q, r = self.to_sympy().div(o.to_sympy(self.var))
            return UniPoly.from_sympy(q, self.var), UniPoly.from_sympy(r, self.var)
        inv = _invert_scalar(o.lc)
        rem = list(self.coeffs)
        quot = [0] * (len(rem) - dq)
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] * inv
            quot[k] = c
            if c == 0:
                continue
            for i, oc in enumerate(o.coeffs):
                rem[k + i] = rem[k + i] - c * oc
        return UniPoly(quot, self.var), UniPoly(rem[:dq], self.var)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exquo(self, other) -> "UniPoly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def derivative(self) -> "UniPoly":
        return UniPoly([k * c for k, c in enumerate(self.coeffs)][1:], self.var)

    def __call__(self, value):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def monic(self) -> "UniPoly":
        if self.is_zero() or self.lc == 1:
            return self
        return self * _invert_scalar(self.lc)

    # ----- comparison -----
    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if _is_scalar(other):
            return self.coeffs == UniPoly((other,), self.var).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)!r}, {self.var!r})"

    def __str__(self):
        from ibasis.core.parser import format_poly
        return format_poly(self)


def integer_coefficients(p: UniPoly):
    """
    Split a nonzero Q-polynomial into content and a primitive integer polynomial:
    p = content * sum(ints[k] * var^k) with positive leading integer.
    """
    if p.is_zero():
        raise ZeroPolynomial("zero polynomial has no content")
    common, scaled = p.to_sympy().clear_denoms(convert=True)
    content, primitive = scaled.primitive()
    ints = [int(c) for c in reversed(primitive.all_coeffs())]
    content = Fraction(int(content), int(common))
    if ints[-1] < 0:
        content, ints = -content, [-v for v in ints]
    return content, ints


def poly_gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Monic gcd; gcd(p, 0) = monic(p)."""
    if p._over_q_with(q):
        return UniPoly.from_sympy(p.to_sympy().gcd(q.to_sympy(p.var)), p.var).monic()
    a, b = p, q
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a.monic()


def poly_xgcd(a: UniPoly, b: UniPoly):
    """(g, s, t) with s*a + t*b = g, g monic."""
    if a._over_q_with(b) and not a.is_zero() and not b.is_zero():
        s, t, g = a.to_sympy().gcdex(b.to_sympy(a.var))
        return UniPoly.from_sympy(g, a.var), UniPoly.from_sympy(s, a.var), UniPoly.from_sympy(t, a.var)
    one = UniPoly((1,), a.var)
    zero = UniPoly((), a.var)
    r0, r1 = a, b
    s0, s1 = one, zero
    t0, t1 = zero, one
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = _invert_scalar(r0.lc)
    return r0 * inv, s0 * inv, t0 * inv


def squarefree_part(p: UniPoly) -> UniPoly:
    if p.is_zero():
        raise ZeroPolynomial("squarefree part of the zero polynomial")
    if p.degree() == 0:
        return UniPoly((1,), p.var)
    if p.is_rational():
        return UniPoly.from_sympy(p.to_sympy().sqf_part(), p.var).monic()
    g = poly_gcd(p, p.derivative())
    return (p // g).monic()


def rational_roots(p: UniPoly) -> list[tuple[Fraction, int]]:
    """Rational roots of a Q-polynomial with multiplicities, ascending."""
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no finite set of roots")
    _, factors = p.to_sympy().factor_list()
    roots = []
    for factor, mult in factors:
        if factor.degree() == 1:
            a, b = (_from_sympy_number(c) for c in factor.all_coeffs())
            roots.append((-b / a, mult))
    roots.sort()
    return roots


# -----------------------------------------------------------
# RATIONAL FUNCTIONS OVER Q
# -----------------------------------------------------------
def _as_qpoly(value, var="x") -> UniPoly:
    if isinstance(value, UniPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return UniPoly((value,), var)
    raise TypeError(f"cannot use {value!r} as a polynomial")


class RatFun:
    """num/den over Q, reduced, den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_qpoly(num)
        den = UniPoly((1,), num.var) if den is None else _as_qpoly(den, num.var)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero():
            den = UniPoly((1,), num.var)
        elif den.degree() > 0 and num.degree() > 0:
            _, cn, cd = num.to_sympy().cofactors(den.to_sympy(num.var))
            num = UniPoly.from_sympy(cn, num.var)
            den = UniPoly.from_sympy(cd, num.var)
        lc = den.lc
        if lc != 1:
            num = num * (1 / lc)
            den = den * (1 / lc)
        self.num = num
        self.den = den

    @classmethod
    def x(cls):
        return cls(UniPoly.gen("x"))

    @classmethod
    def coerce(cls, value) -> "RatFun":
        if isinstance(value, RatFun):
            return value
        return cls(value)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree() == 0

    def is_constant(self) -> bool:
        return self.den.degree() == 0 and self.num.degree() <= 0

    def constant_value(self) -> Fraction:
        return self.num.coeff(0)

    # ----- arithmetic -----
    @staticmethod
    def _lift(other):
        if isinstance(other, RatFun):
            return other
        if isinstance(other, (int, Fraction, UniPoly)):
            return RatFun(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFun(self.num + o.num, self.den)
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        out = RatFun.__new__(RatFun)
        out.num = -self.num
        out.den = self.den
        return out

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
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return RatFun(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return RatFun(1) / (self ** (-k))
        return RatFun(self.num ** k, self.den ** k)

    def derivative(self) -> "RatFun":
        if self.is_polynomial():
            return RatFun(self.num.derivative() * (1 / self.den.lc))
        return RatFun(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, value):
        d = self.den(value)
        if d == 0:
            raise DivisionByZero(f"pole at {value}")
        return self.num(value) / d

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.num.coeffs == o.num.coeffs and self.den.coeffs == o.den.coeffs

    def __hash__(self):
        return hash((self.num.coeffs, self.den.coeffs))

    def __repr__(self):
        return f"RatFun({self.num!r}, {self.den!r})"

    def __str__(self):
        from ibasis.core.parser import format_ratfun
        return format_ratfun(self)


def common_denominator(values) -> UniPoly:
    den = UniPoly((1,), "x")
    for v in values:
        den = (den * v.den) // poly_gcd(den, v.den)
    return den.monic()


# -----------------------------------------------------------
# NUMBER FIELDS WITH DYNAMIC EVALUATION
# -----------------------------------------------------------
class SplitEvent(ArithmeticError):
    """A zero divisor showed the modulus is reducible. `factors` multiply back to it."""

    def __init__(self, modulus: UniPoly, factors):
        self.modulus = modulus
        self.factors = tuple(sorted((f.monic() for f in factors), key=poly_sort_key))
        super().__init__(f"modulus {modulus} splits into {len(self.factors)} factors")


class NumberField:
    """Q[t]/<modulus> for a squarefree modulus, treated as a field until a zero divisor shows up."""

    __slots__ = ("modulus", "name")

    def __init__(self, modulus: UniPoly, name: str = "t"):
        m = modulus.with_var(name)
        if m.degree() < 1:
            raise ValueError("number field modulus must have degree >= 1")
        m = m.monic()
        if poly_gcd(m, m.derivative()).degree() > 0:
            raise ValueError(f"number field modulus {m} is not squarefree")
        self.modulus = m
        self.name = name

    @classmethod
    def rational(cls, value, name: str = "t") -> "NumberField":
        return cls(UniPoly((-as_rational(value), 1), name), name)

    @property
    def degree(self) -> int:
        return self.modulus.degree()

    def is_rational(self) -> bool:
        return self.degree == 1

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational point")
        return -self.modulus.coeffs[0]

    def element(self, rep) -> "NumberFieldElem":
        rep = _as_qpoly(rep, self.name).with_var(self.name)
        return NumberFieldElem(self, rep % self.modulus, reduced=True)

    def coerce(self, value) -> "NumberFieldElem":
        if isinstance(value, NumberFieldElem):
            if value.field != self:
                raise ValueError("element of a different number field")
            return value
        return NumberFieldElem(self, UniPoly((value,), self.name), reduced=True)

    def zero(self) -> "NumberFieldElem":
        return NumberFieldElem(self, UniPoly((), self.name), reduced=True)

    def one(self) -> "NumberFieldElem":
        return self.coerce(1)

    def gen(self) -> "NumberFieldElem":
        return self.element(UniPoly.gen(self.name))

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.modulus.coeffs == other.modulus.coeffs

    def __hash__(self):
        return hash(("NumberField", self.modulus.coeffs))

    def __repr__(self):
        return f"NumberField({self.modulus})"


class NumberFieldElem:
    __slots__ = ("field", "rep")

    def __init__(self, field: NumberField, rep: UniPoly, reduced: bool = False):
        self.field = field
        self.rep = rep if reduced else rep.with_var(field.name) % field.modulus

    def _lift(self, other):
        if isinstance(other, NumberFieldElem):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("mixed number fields")
            return other
        if isinstance(other, (int, Fraction)):
            return NumberFieldElem(self.field, UniPoly((other,), self.field.name), reduced=True)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return NumberFieldElem(self.field, self.rep + o.rep, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return NumberFieldElem(self.field, -self.rep, reduced=True)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return NumberFieldElem(self.field, self.rep - o.rep, reduced=True)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return NumberFieldElem(self.field, o.rep - self.rep, reduced=True)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.rep.degree() <= 0 or o.rep.degree() <= 0:
            return NumberFieldElem(self.field, self.rep * o.rep, reduced=True)
        return NumberFieldElem(self.field, self.rep * o.rep)

    __rmul__ = __mul__

    def inverse(self) -> "NumberFieldElem":
        result = nf_invert(self)
        if isinstance(result, SplitEvent):
            raise result
        return result

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        """
        Zero test under dynamic evaluation: False only if the element is a unit.
        A nonzero zero divisor raises SplitEvent.
        """
        if self.rep.is_zero():
            return True
        if self.rep.degree() == 0 or self.field.degree == 1:
            return False
        g = poly_gcd(self.rep, self.field.modulus)
        if g.degree() == 0:
            return False
        raise SplitEvent(self.field.modulus, (g, self.field.modulus // g))

    def is_rational(self) -> bool:
        return self.rep.degree() <= 0

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.rep.coeff(0)

    def __bool__(self):
        return not self.rep.is_zero()

    def __eq__(self, other):
        if isinstance(other, NumberFieldElem):
            return self.field == other.field and self.rep.coeffs == other.rep.coeffs
        if isinstance(other, (int, Fraction)):
            return self.rep.coeffs == UniPoly((other,)).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.rep.coeffs)

    def __repr__(self):
        return f"NumberFieldElem({self.rep}, mod {self.field.modulus})"

    def __str__(self):
        from ibasis.core.parser import format_field_elem
        return format_field_elem(self)


def nf_invert(a: NumberFieldElem):
    """Inverse of a, or the SplitEvent exposing a factor of the modulus if a is a zero divisor."""
    if a.rep.is_zero():
        raise DivisionByZero("inverse of zero in a number field")
    if a.rep.degree() == 0:
        return NumberFieldElem(a.field, UniPoly((1 / a.rep.coeffs[0],), a.field.name), reduced=True)
    g, s, _ = poly_xgcd(a.rep, a.field.modulus)
    if g.degree() > 0:
        return SplitEvent(a.field.modulus, (g, a.field.modulus // g))
    return NumberFieldElem(a.field, s % a.field.modulus, reduced=True)


def nf_charpoly(a: NumberFieldElem) -> UniPoly:
    """Characteristic polynomial (in y) of multiplication by a: the resultant of the modulus and y - a(t)."""
    t, y = Symbol(a.field.name), Dummy("y")
    res = resultant(a.field.modulus.to_sympy().as_expr(), y - a.rep.to_sympy().as_expr(), t)
    return UniPoly.from_sympy(Poly(res, y, domain=QQ), "y").monic()


def taylor_shift(p: UniPoly, alpha: NumberFieldElem) -> list:
    """Coefficients of p(alpha + z) in z, over the field of alpha."""
    field = alpha.field
    a = [field.coerce(c) for c in p.coeffs]
    n = len(a)
    for k in range(n - 1):
        for i in range(n - 2, k - 1, -1):
            a[i] = a[i] + alpha * a[i + 1]
    return a


def crt_combine(residues, moduli) -> UniPoly:
    """x = r_k mod m_k for pairwise coprime Q-polynomial moduli."""
    x, m = residues[0], moduli[0]
    for r, mk in zip(residues[1:], moduli[1:]):
        _, s, _ = poly_xgcd(m, mk)
        x = x + m * (((r - x) * s) % mk)
        m = m * mk
        x = x % m
    return x


# -----------------------------------------------------------
# LINEAR ALGEBRA
# -----------------------------------------------------------
def _is_zero(value) -> bool:
    test = getattr(value, "is_zero", None)
    if test is not None:
        return test()
    return value == 0


def _check_rectangular(matrix):
    if not matrix:
        return 0
    width = len(matrix[0])
    for row in matrix:
        if len(row) != width:
            raise ShapeMismatch("ragged matrix")
    return width


def _ratfun_from_sympy(expr, var: str) -> "RatFun":
    num, den = fraction(cancel(expr))
    gen = Symbol(var)
    return RatFun(
        UniPoly.from_sympy(Poly(num, gen, domain=QQ), var),
        UniPoly.from_sympy(Poly(den, gen, domain=QQ), var),
    )


def _domain_matrix(rows, width):
    """
    (DomainMatrix, convert-back) for a matrix over Q or over Q(x), or None when
    some entry lives in a number field of degree > 1.
    Rational elements of a single number field count as rationals.
    """
    if not rows or not width:
        return None
    field = None
    var = None
    for row in rows:
        for v in row:
            if isinstance(v, (int, Fraction)):
                continue
            if isinstance(v, NumberFieldElem) and v.is_rational() and field in (None, v.field):
                field = v.field
                continue
            if isinstance(v, RatFun) and var in (None, v.num.var):
                var = v.num.var
                continue
            return None
    if field is not None and var is not None:
        return None
    if var is None:
        def to_qq(v):
            return _to_qq(v.rep.coeff(0) if isinstance(v, NumberFieldElem) else v)

        if field is None:
            back = _from_sympy_number
        else:
            def back(c):
                return field.coerce(_from_sympy_number(c))
        return DomainMatrix([[to_qq(v) for v in row] for row in rows], (len(rows), width), QQ), back

    K = QQ.frac_field(Symbol(var))

    def to_k(v):
        v = RatFun.coerce(v)
        return K.from_sympy(v.num.to_sympy().as_expr() / v.den.to_sympy().as_expr())

    def back(c):
        return _ratfun_from_sympy(c, var)
    return DomainMatrix([[to_k(v) for v in row] for row in rows], (len(rows), width), K), back


def _rref_domain(rows, order, width):
    """row_echelon through DomainMatrix.rref; None when the entries need dynamic evaluation."""
    searched = set(order)
    perm = list(order) + [c for c in range(width) if c not in searched]
    found = _domain_matrix([[row[c] for c in perm] for row in rows], width)
    if found is None:
        return None
    dm, back = found
    reduced, pivots = dm.rref()
    table = reduced.to_Matrix()
    out = []
    for i in range(len(rows)):
        row = [None] * width
        for k, c in enumerate(perm):
            row[c] = back(table[i, k])
        out.append(row)
    # a pivot outside `order` only marks its row nonzero
    return out, [perm[k] for k in pivots if k < len(order)]


def row_echelon(matrix, columns=None):
    """
    Reduced row echelon form with first-nonzero pivoting.
    `columns` fixes the order in which columns are searched for pivots.
    Returns (rows, pivot_columns).
    """
    rows = [list(r) for r in matrix]
    width = _check_rectangular(rows)
    order = list(columns) if columns is not None else list(range(width))
    over_domain = _rref_domain(rows, order, width)
    if over_domain is not None:
        return over_domain
    pivots = []
    prow = 0
    for col in order:
        if prow == len(rows):
            break
        sel = None
        for i in range(prow, len(rows)):
            if not _is_zero(rows[i][col]):
                sel = i
                break
        if sel is None:
            continue
        rows[prow], rows[sel] = rows[sel], rows[prow]
        inv = 1 / rows[prow][col]
        rows[prow] = [v * inv for v in rows[prow]]
        for i in range(len(rows)):
            factor = rows[i][col]
            if i == prow or factor == 0:
                continue
            rows[i] = [a - factor * b for a, b in zip(rows[i], rows[prow])]
        pivots.append(col)
        prow += 1
    return rows, pivots


def linsolve(matrix, rhs, zero=Fraction(0)):
    """
    One solution of matrix * x = rhs (free variables 0), or None when inconsistent.
    SplitEvent propagates when a pivot candidate is a zero divisor.
    """
    if len(matrix) != len(rhs):
        raise ShapeMismatch(f"{len(matrix)} equations but {len(rhs)} right-hand sides")
    width = _check_rectangular(matrix)
    augmented = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = row_echelon(augmented, range(width))
    for row in rows[len(pivots):]:
        if not _is_zero(row[width]):
            return None
    solution = [zero] * width
    for k, col in enumerate(pivots):
        solution[col] = rows[k][width]
    return solution


def nullspace(matrix, columns=None, one=Fraction(1), zero=Fraction(0)):
    """Canonical kernel basis: one vector per free column, 1 there and 0 at the other free columns."""
    width = _check_rectangular(matrix)
    order = list(columns) if columns is not None else list(range(width))
    rows, pivots = row_echelon(matrix, order)
    pivot_set = set(pivots)
    basis = []
    for free in order:
        if free in pivot_set:
            continue
        vec = [zero] * width
        vec[free] = one
        for k, col in enumerate(pivots):
            vec[col] = -rows[k][free]
        basis.append(vec)
    return basis


def determinant(matrix, one=Fraction(1)):
    rows = [list(r) for r in matrix]
    n = len(rows)
    if _check_rectangular(rows) != n:
        raise ShapeMismatch("determinant of a non-square matrix")
    found = _domain_matrix(rows, n)
    if found is not None:
        dm, back = found
        value = back(dm.domain.to_sympy(dm.det()))
        return one * value
    det = one
    for col in range(n):
        sel = None
        for i in range(col, n):
            if not _is_zero(rows[i][col]):
                sel = i
                break
        if sel is None:
            return det * 0
        if sel != col:
            rows[col], rows[sel] = rows[sel], rows[col]
            det = -det
        pivot = rows[col][col]
        det = det * pivot
        inv = 1 / pivot
        for i in range(col + 1, n):
            factor = rows[i][col]
            if factor == 0:
                continue
            factor = factor * inv
            rows[i] = [a - factor * b for a, b in zip(rows[i], rows[col])]
    return det
