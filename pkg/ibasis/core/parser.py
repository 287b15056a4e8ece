"""
Text form of operators, rational functions and series.

Operators are sums of products of integers, x and D with ^ for powers, implicit
multiplication by juxtaposition, unary minus and parentheses. Coefficients are
written to the left of D; `a/b` multiplies a on the right by 1/b and needs a
D-free b. Printing inverts parsing for everything the formatters produce.
"""
from __future__ import annotations

import re
from fractions import Fraction

from ibasis.core.errors import OperatorSyntaxError
from ibasis.core.exactmath import RatFun, UniPoly, integer_coefficients
from ibasis.core.oreops import OrePoly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


# -----------------------------------------------------------
# TOKENIZER
# -----------------------------------------------------------
def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise OperatorSyntaxError(f"unexpected character {text[bad]!r}", bad)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, var: str):
        self.text = text
        self.var = var
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def _advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def _fail(self, message, offset=None):
        raise OperatorSyntaxError(message, self.tok[2] if offset is None else offset)

    def _is_op(self, value) -> bool:
        return self.tok[0] == "op" and self.tok[1] == value

    def _starts_primary(self) -> bool:
        kind, value, _ = self.tok
        return kind in ("num", "name") or (kind == "op" and value == "(")

    def parse(self) -> OrePoly:
        if self.tok[0] == "end":
            self._fail("empty expression")
        value = self.expr()
        if self.tok[0] != "end":
            self._fail(f"unexpected {self.tok[1]!r}")
        return value

    def expr(self) -> OrePoly:
        negate = False
        if self._is_op("-"):
            self._advance()
            negate = True
        value = self.term()
        if negate:
            value = -value
        while self._is_op("+") or self._is_op("-"):
            op = self._advance()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> OrePoly:
        value = self.factor()
        while True:
            if self._is_op("*"):
                self._advance()
                value = value * self.factor()
            elif self._is_op("/"):
                offset = self._advance()[2]
                divisor = self.factor()
                if not divisor.is_d_free():
                    self._fail("division by an expression containing D", offset)
                if divisor.is_zero():
                    self._fail("division by zero", offset)
                value = value * OrePoly.constant(1 / divisor.coeff(0))
            elif self._starts_primary():
                value = value * self.factor()
            else:
                return value

    def factor(self) -> OrePoly:
        base = self.primary()
        if self._is_op("^"):
            self._advance()
            if self.tok[0] != "num":
                self._fail("expected a nonnegative integer exponent")
            base = base ** int(self._advance()[1])
        return base

    def primary(self) -> OrePoly:
        kind, value, offset = self.tok
        if kind == "num":
            self._advance()
            return OrePoly.constant(int(value))
        if kind == "name":
            self._advance()
            if value == self.var:
                return OrePoly.x()
            if value == "D":
                return OrePoly.D()
            self._fail(f"unknown name {value!r}", offset)
        if kind == "op" and value == "(":
            self._advance()
            inner = self.expr()
            if not self._is_op(")"):
                self._fail("expected ')'")
            self._advance()
            return inner
        if kind == "end":
            self._fail("unexpected end of input")
        self._fail(f"unexpected {value!r}")


def parse_operator(text: str) -> OrePoly:
    return _Parser(text, "x").parse()


def parse_ratfun(text: str, var: str = "x") -> RatFun:
    value = _Parser(text, var).parse()
    if not value.is_d_free():
        raise OperatorSyntaxError("expected a rational function without D", 0)
    q = value.coeff(0)
    return RatFun(q.num.with_var(var), q.den.with_var(var))


def parse_polynomial(text: str, var: str = "x") -> UniPoly:
    q = parse_ratfun(text, var)
    if not q.is_polynomial():
        raise OperatorSyntaxError("expected a polynomial", 0)
    return q.num * (1 / q.den.lc)


# -----------------------------------------------------------
# FORMATTING
# -----------------------------------------------------------
def _format_scalar(c) -> str:
    if isinstance(c, (int, Fraction)):
        return str(c)
    return format_field_elem(c)


def _scalar_sign(c) -> int:
    if isinstance(c, (int, Fraction)):
        return -1 if c < 0 else 1
    if c.is_rational():
        return -1 if c.rational_value() < 0 else 1
    # algebraic: sign of the leading coefficient of the representative
    return -1 if c.rep.lc < 0 else 1


def _power(base: str, k) -> str:
    if k == 1:
        return base
    if isinstance(k, Fraction) and k.denominator != 1:
        return f"{base}^({k})"
    return f"{base}^{k}"


def _join(terms) -> str:
    """Join signed term strings: [(sign, text), ...]."""
    if not terms:
        return "0"
    out = []
    for k, (sign, text) in enumerate(terms):
        if k == 0:
            out.append(text if sign > 0 else f"-{text}")
        else:
            out.append(f" + {text}" if sign > 0 else f" - {text}")
    return "".join(out)


def _poly_terms(p: UniPoly):
    terms = []
    for k in range(p.degree(), -1, -1):
        c = p.coeff(k)
        if c == 0:
            continue
        sign = _scalar_sign(c)
        mag = -c if sign < 0 else c
        mono = _power(p.var, k) if k > 0 else ""
        if not mono:
            text = _format_scalar(mag)
            if " " in text:
                text = f"({text})"
        elif mag == 1:
            text = mono
        else:
            text = _format_scalar(mag)
            if " " in text:
                text = f"({text})"
            text = f"{text}*{mono}"
        terms.append((sign, text))
    return terms


def format_poly(p: UniPoly) -> str:
    return _join(_poly_terms(p))


def format_field_elem(a) -> str:
    if a.is_rational():
        return str(a.rational_value())
    return format_poly(a.rep)


def _needs_parens(text: str) -> bool:
    return " " in text or "*" in text or "/" in text


def _ratfun_parts(q: RatFun):
    """(sign, numerator text, denominator text or None) with integer coefficients."""
    cn, pn = integer_coefficients(q.num)
    cd, pd = integer_coefficients(q.den)
    c = cn / cd
    sign = -1 if c < 0 else 1
    c = abs(c)
    num = UniPoly([c.numerator * v for v in pn], q.num.var)
    den = UniPoly([c.denominator * v for v in pd], q.den.var)
    num_text = format_poly(num)
    den_text = format_poly(den)
    return sign, num_text, (None if den_text == "1" else den_text)


def _ratfun_magnitude(q: RatFun):
    sign, num, den = _ratfun_parts(q)
    if den is None:
        return sign, num
    if " " in num:
        num = f"({num})"
    if _needs_parens(den):
        den = f"({den})"
    return sign, f"{num}/{den}"


def format_ratfun(q: RatFun) -> str:
    if q.is_zero():
        return "0"
    if q.is_polynomial():
        return format_poly(q.num)
    sign, text = _ratfun_magnitude(q)
    return text if sign > 0 else f"-{text}"


def format_operator(L: OrePoly) -> str:
    terms = []
    for k in range(len(L.coeffs) - 1, -1, -1):
        q = L.coeffs[k]
        if q.is_zero():
            continue
        mono = _power("D", k) if k > 0 else ""
        if q.is_polynomial():
            poly_terms = _poly_terms(q.num)
            if not mono:
                terms.extend(poly_terms)
                continue
            if len(poly_terms) == 1:
                sign, text = poly_terms[0]
                text = mono if text == "1" else f"{text}*{mono}"
            else:
                # sign of the leading term goes outside the parentheses
                sign = poly_terms[0][0]
                text = f"({format_poly(q.num if sign > 0 else -q.num)})*{mono}"
        else:
            sign, text = _ratfun_magnitude(q)
            if mono:
                text = f"({text})*{mono}"
        terms.append((sign, text))
    return _join(terms)


def _series_base(series) -> tuple[str, str]:
    field = series.field
    if field.is_rational():
        a = field.rational_value()
        if a == 0:
            return "x", "x"
        shifted = format_poly(UniPoly((-a, 1)))
        return f"({shifted})", shifted
    return "(x - t)", "x - t"


def format_series(series, limit: int | None = None) -> str:
    """Terms in increasing exponent, then an O(.) term for the lowest finite cutoff."""
    base, inner = _series_base(series)
    log_text = f"log({inner})"
    terms = []
    for term in series.terms():
        c = term.coefficient
        if c.is_rational() and c.rational_value() == 0:
            continue
        sign = _scalar_sign(c)
        mag = -c if sign < 0 else c
        parts = []
        if term.exponent != 0:
            parts.append(_power(base, term.exponent))
        if term.logpow:
            parts.append(_power(log_text, term.logpow))
        coeff = _format_scalar(mag.rational_value() if mag.is_rational() else mag)
        if " " in coeff:
            coeff = f"({coeff})"
        if not parts:
            text = coeff
        elif coeff == "1":
            text = "*".join(parts)
        else:
            text = "*".join([coeff] + parts)
        terms.append((sign, text))
    if limit is not None:
        terms = terms[:limit]
    finite = [b for b in series.cutoffs.values() if b != float("inf")]
    if finite:
        terms.append((1, f"O({_power(base, min(finite))})"))
    return _join(terms)
