"""
Hermite reduction of D-finite integrands written in an integral basis.

An integrand is f = (a_0*w_0 + ... + a_{r-1}*w_{r-1}) / (u * v^m) with v squarefree
and coprime to u. Each step solves a linear system over Q[x]/<v> for polynomials
b with deg b < deg v, subtracts the derivative of b*w / v^(m-1) and lowers m by
one, until f = D(g) + h with h having the squarefree denominator u*v.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ibasis.core.errors import BadDenominatorShape, InvariantViolation, ReductionObstruction
from ibasis.core.exactmath import (
    NumberField,
    RatFun,
    SplitEvent,
    UniPoly,
    crt_combine,
    linsolve,
    poly_gcd,
)
from ibasis.core.logger import log
from ibasis.core.oreops import BasisElement, OrePoly, d_times


def _as_poly(value) -> UniPoly:
    if isinstance(value, UniPoly):
        return value
    q = RatFun.coerce(value)
    if not q.is_polynomial():
        raise BadDenominatorShape(f"expected a polynomial, got {q}")
    return q.num


# -----------------------------------------------------------
# DATA
# -----------------------------------------------------------
@dataclass(frozen=True)
class BasisVector:
    """(sum_i numerators[i] * w_i) / (u * v^m) over the elements w_i of `basis`."""

    basis: object
    numerators: tuple
    u: UniPoly
    v: UniPoly
    m: int

    def __post_init__(self):
        object.__setattr__(self, "numerators", tuple(_as_poly(a) for a in self.numerators))
        object.__setattr__(self, "u", _as_poly(self.u))
        object.__setattr__(self, "v", _as_poly(self.v))
        if len(self.numerators) != len(self.basis):
            raise BadDenominatorShape(f"{len(self.numerators)} numerators for {len(self.basis)} basis elements")
        if self.m < 0:
            raise BadDenominatorShape("m must be nonnegative")
        if self.u.is_zero() or self.v.is_zero():
            raise BadDenominatorShape("u and v must be nonzero")
        if poly_gcd(self.v, self.v.derivative()).degree() > 0:
            raise BadDenominatorShape(f"v = {self.v} is not squarefree")
        if poly_gcd(self.u, self.v).degree() > 0:
            raise BadDenominatorShape(f"u = {self.u} and v = {self.v} are not coprime")

    @property
    def operator(self) -> OrePoly:
        return self.basis.operator

    @property
    def denominator(self) -> UniPoly:
        return self.u * self.v ** self.m

    def coefficients(self) -> list[RatFun]:
        den = self.denominator
        return [RatFun(a, den) for a in self.numerators]

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.numerators)

    def as_element(self) -> BasisElement:
        """The same function as an operator applied to y: sum_k (sum_i c_i * w_i[k]) D^k."""
        r = len(self.basis[0])
        acc = BasisElement([0] * r)
        for c, w in zip(self.coefficients(), self.basis):
            if not c.is_zero():
                acc = acc + w.scale(c)
        return acc

    def __str__(self):
        parts = [f"({a})*w{i}" for i, a in enumerate(self.numerators) if not a.is_zero()]
        body = " + ".join(parts) or "0"
        return f"[{body}] / (({self.u})*({self.v})^{self.m})"


@dataclass(frozen=True)
class DerivativeMatrix:
    """D*w_i = sum_j rows[i][j] * w_j."""

    rows: tuple

    def differentiate(self, coeffs) -> list[RatFun]:
        """Coefficients of D(sum c_i w_i)."""
        n = len(self.rows)
        out = [RatFun.coerce(c).derivative() for c in coeffs]
        for i, c in enumerate(coeffs):
            c = RatFun.coerce(c)
            if c.is_zero():
                continue
            for j in range(n):
                if not self.rows[i][j].is_zero():
                    out[j] = out[j] + c * self.rows[i][j]
        return out


def derivative_matrix(L: OrePoly, basis) -> DerivativeMatrix:
    elements = list(basis)
    n = len(elements)
    T = [list(e.coeffs) for e in elements]
    transposed = [[T[i][j] for i in range(n)] for j in range(n)]
    rows = []
    for e in elements:
        image = d_times(L, e)
        row = linsolve(transposed, list(image.coeffs), zero=RatFun(0))
        if row is None:
            raise InvariantViolation(f"D*({e}) is not in the span of the basis")
        rows.append(tuple(row))
    return DerivativeMatrix(tuple(rows))


@dataclass(frozen=True)
class HermiteStep:
    m: int
    b: tuple
    c: tuple
    u: UniPoly


@dataclass(frozen=True)
class HermiteResult:
    f: BasisVector
    g: BasisVector
    h: BasisVector
    steps: tuple = field(default_factory=tuple)

    def antiderivative(self) -> BasisElement:
        return self.g.as_element()


# -----------------------------------------------------------
# MOD-v SOLVER
# -----------------------------------------------------------
def _in_field(q: RatFun, F: NumberField):
    return F.element(q.num) / F.element(q.den)


def _solve_mod(build, modulus: UniPoly):
    """
    Solve the system build(F) returns over F = Q[t]/<modulus>. A zero divisor
    splits the modulus; the component solutions are recombined by CRT.
    """
    F = NumberField(modulus.with_var("t"))
    try:
        matrix, rhs = build(F)
        sol = linsolve(matrix, rhs, zero=F.zero())
    except SplitEvent as event:
        moduli = [f.with_var("x") for f in event.factors]
        log(f"HERMITE split {modulus} -> {', '.join(str(p) for p in moduli)}")
        parts = [_solve_mod(build, p) for p in moduli]
        if any(p is None for p in parts):
            return None
        return [crt_combine([p[i] for p in parts], moduli) for i in range(len(parts[0]))]
    if sol is None:
        return None
    return [a.rep.with_var("x") for a in sol]


# -----------------------------------------------------------
# REDUCTION
# -----------------------------------------------------------
def _step(A, u, v, k, M: DerivativeMatrix):
    """One reduction from v^k to v^(k-1): returns (b, C, new u)."""
    r = len(A)
    dv = v.derivative()
    vM = [[entry * RatFun(v) for entry in row] for row in M.rows]
    e = UniPoly((1,))
    for row in vM:
        for q in row:
            e = e * (q.den // poly_gcd(e, q.den))
    if poly_gcd(e, v).degree() > 0:
        raise ReductionObstruction(f"derivative matrix has a pole of order > 1 along {v}")

    def build(F):
        # b * K = A / u  with  K = vM - (k-1) v' I  modulo v, transposed for linsolve
        K = [[_in_field(vM[i][j], F) for j in range(r)] for i in range(r)]
        shift = F.element(dv) * (k - 1)
        for i in range(r):
            K[i][i] = K[i][i] - shift
        inv_u = F.element(u).inverse()
        matrix = [[K[i][j] for i in range(r)] for j in range(r)]
        rhs = [F.element(a) * inv_u for a in A]
        return matrix, rhs

    b = _solve_mod(build, v)
    if b is None:
        return None

    # numerator of f - D(b*w / v^(k-1)), over the new denominator e*u*v^k
    C = []
    for j in range(r):
        acc = RatFun(e * A[j])
        acc = acc - RatFun(u * e) * (RatFun(v * b[j].derivative()) - RatFun(dv * b[j] * (k - 1)))
        for i in range(r):
            if not b[i].is_zero():
                acc = acc - RatFun(u * e * b[i]) * vM[i][j]
        if not acc.is_polynomial():
            raise InvariantViolation("reduction numerator is not a polynomial")
        quotient, rest = divmod(acc.num, v)
        if not rest.is_zero():
            raise InvariantViolation(f"reduction numerator is not divisible by {v}")
        C.append(quotient)

    new_u = u * e
    common = new_u
    for c in C:
        common = poly_gcd(common, c)
    if common.degree() > 0:
        C = [c // common for c in C]
        new_u = new_u // common
    return b, C, new_u


def _verify(f: BasisVector, g: BasisVector, h: BasisVector, M: DerivativeMatrix) -> None:
    dg = M.differentiate(g.coefficients())
    for fi, dgi, hi in zip(f.coefficients(), dg, h.coefficients()):
        if fi != dgi + hi:
            raise InvariantViolation("f != D(g) + h after reduction")


def hermite_reduce(f: BasisVector, M: DerivativeMatrix | None = None) -> HermiteResult:
    if M is None:
        M = derivative_matrix(f.operator, f.basis)
    r = len(f.numerators)
    zero = [UniPoly(())] * r
    if f.m <= 1:
        g = BasisVector(f.basis, zero, UniPoly((1,)), f.v, 0)
        return HermiteResult(f, g, f)

    A, u = list(f.numerators), f.u
    G = list(zero)
    steps = []
    for k in range(f.m, 1, -1):
        result = _step(A, u, f.v, k, M)
        if result is None:
            partial = (
                BasisVector(f.basis, G, UniPoly((1,)), f.v, f.m - 1),
                BasisVector(f.basis, A, u, f.v, k),
            )
            raise ReductionObstruction(f"the system modulo {f.v} at exponent {k} has no solution", partial)
        b, C, u = result
        # g gathers b / v^(k-1) over the common denominator v^(m-1)
        scale = f.v ** (f.m - k)
        G = [gi + bi * scale for gi, bi in zip(G, b)]
        steps.append(HermiteStep(k, tuple(b), tuple(C), u))
        log(f"HERMITE m={k} b={[str(x) for x in b]} c={[str(x) for x in C]}")
        A = C

    g = BasisVector(f.basis, G, UniPoly((1,)), f.v, f.m - 1)
    h = BasisVector(f.basis, A, u, f.v, 1)
    _verify(f, g, h, M)
    return HermiteResult(f, g, h, tuple(steps))
