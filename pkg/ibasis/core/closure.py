"""
Integral bases of Q(x)[D]/<L>.

compute_B0 scales 1 so that it is integral and as small as possible at every
singular point. Each further stage starts from B_d = s*D*B_{d-1} (s the squarefree
part of the leading coefficient) and divides it by factors p of s for as long as
some combination a_0*B_0 + ... + a_{d-1}*B_{d-1} + B_d stays integral after the
division. The points of one stage are visited round-robin and a point drops
out once its ansatz system has no solution.
"""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from fractions import Fraction

from ibasis.core.config import DEFAULT_JOBS, MAX_SCALING_DEGREE, MAX_WRONSKIAN_TERMS
from ibasis.core.errors import DegreeCap, InvariantViolation, NotABasis, NotAnOperator, ShapeMismatch
from ibasis.core.exactmath import (
    NumberField,
    RatFun,
    SplitEvent,
    UniPoly,
    determinant,
    linsolve,
    poly_gcd,
    poly_sort_key,
    rational_roots,
    squarefree_part,
)
from ibasis.core.localsolver import (
    LocalData,
    describe_point,
    is_locally_integral,
    local_solutions,
    truncation_bounds,
)
from ibasis.core.logger import add_progress_detail, log, reset_progress, set_progress
from ibasis.core.logseries import (
    IotaPolicy,
    as_point_field,
    defect,
    non_integral_terms,
    ratfun_valuation,
)
from ibasis.core.oreops import BasisElement, OrePoly, apply_to_series, d_times, reduce_mod


# -----------------------------------------------------------
# SINGULAR POINTS
# -----------------------------------------------------------
def factor_handles(p: UniPoly) -> list[UniPoly]:
    """
    Monic squarefree factors of p: one linear factor per rational root, and the
    remaining cofactor as a single handle (split later if it proves reducible).
    """
    if p.is_constant():
        return []
    rest = squarefree_part(p)
    handles = []
    for a, _ in rational_roots(rest):
        linear = UniPoly((-a, 1))
        handles.append(linear)
        rest = rest.exquo(linear)
    if rest.degree() >= 1:
        handles.append(rest.monic())
    return sorted(handles, key=poly_sort_key)


def handle_field(h: UniPoly) -> NumberField:
    return NumberField(h.with_var("t"))


def _validate_operator(L) -> None:
    if not isinstance(L, OrePoly) or L.is_zero():
        raise NotAnOperator("expected a nonzero operator")
    if not L.is_polynomial():
        raise NotAnOperator("operator coefficients must be polynomials in x")
    if L.order() < 1:
        raise NotAnOperator("operator must have order at least 1")


class _Points:
    """Current handles of the singular locus with their local data, split on demand."""

    def __init__(self, L, policy, max_terms=MAX_WRONSKIAN_TERMS, scale=1):
        self.L = L
        self.policy = policy
        self.max_terms = max_terms
        self.scale = scale
        self.handles = factor_handles(L.lc.num)
        self._fields = {}
        self._local = {}
        self._lock = threading.Lock()

    def field(self, h: UniPoly) -> NumberField:
        with self._lock:
            f = self._fields.get(h)
            if f is None:
                f = self._fields[h] = handle_field(h)
            return f

    def local(self, h: UniPoly) -> LocalData:
        with self._lock:
            data = self._local.get(h)
        if data is None:
            data = truncation_bounds(self.L, self.field(h), self.policy, self.max_terms, self.scale)
            with self._lock:
                self._local[h] = data
        return data

    def split(self, h: UniPoly, event: SplitEvent) -> list[UniPoly]:
        factors = sorted((f.with_var("x") for f in event.factors), key=poly_sort_key)
        with self._lock:
            idx = self.handles.index(h)
            self.handles[idx:idx + 1] = factors
            self.handles.sort(key=poly_sort_key)
            self._local.pop(h, None)
            self._fields.pop(h, None)
        log(f"SPLIT {h} -> {', '.join(str(f) for f in factors)}")
        add_progress_detail("splits")
        return factors


def _for_each_point(points: _Points, fn) -> dict:
    """fn(handle) for every handle, redoing a handle's work on its factors when it splits."""
    results = {}
    pending = list(points.handles)
    while pending:
        h = pending.pop(0)
        try:
            results[h] = fn(h)
        except SplitEvent as event:
            pending[0:0] = points.split(h, event)
    return results


# -----------------------------------------------------------
# INITIAL ELEMENT
# -----------------------------------------------------------
def _point_defect(points: _Points, h: UniPoly) -> int:
    sols = local_solutions(points.L, points.field(h), None)
    return max(defect(s.series, points.policy) for s in sols)


def _initial_element(points: _Points) -> tuple[BasisElement, dict]:
    defects = _for_each_point(points, lambda h: _point_defect(points, h))
    degree = sum(abs(e) * h.degree() for h, e in defects.items())
    if degree > MAX_SCALING_DEGREE:
        raise DegreeCap("the scalar making B0 integral", degree, MAX_SCALING_DEGREE)
    c = RatFun(1)
    for h in points.handles:
        c = c * RatFun(h) ** defects[h]
    log(f"INITIAL ELEMENT B0 = {c} (defects {', '.join(f'{h}: {e}' for h, e in defects.items()) or 'none'})")
    return BasisElement.scalar(points.L.order(), c), defects


def compute_B0(L: OrePoly, policy: IotaPolicy | None = None) -> BasisElement:
    policy = policy or IotaPolicy()
    _validate_operator(L)
    element, _ = _initial_element(_Points(L, policy))
    return element


# -----------------------------------------------------------
# ANSATZ
# -----------------------------------------------------------
@dataclass(frozen=True)
class AnsatzSystem:
    """matrix * (a_0, ..., a_{d-1}) = rhs; one row per non-integral position (i, mu, j)."""

    matrix: list
    rhs: list
    positions: list
    unknowns: int

    def solve(self, field: NumberField):
        if not self.matrix:
            return [field.zero()] * self.unknowns
        return linsolve(self.matrix, self.rhs, zero=field.zero())


def ansatz_system(d, point, elements, local: LocalData, policy: IotaPolicy, cache=None) -> AnsatzSystem:
    """
    Conditions on a_0..a_{d-1} in C(alpha) for
    (a_0*B_0 + ... + a_{d-1}*B_{d-1} + B_d) * t_i / (x - alpha)
    to be integral for every truncated local solution t_i. `cache` keeps the
    images B_k * t_i for k < d, which do not change within a stage.
    """
    field = as_point_field(point)
    target = policy.max_rep + 1
    sols = local.exact_solutions()
    images = []
    for k in range(d + 1):
        row = cache.get(k) if cache is not None and k < d else None
        if row is None:
            row = [apply_to_series(elements[k], t, target) for t in sols]
            if cache is not None and k < d:
                cache[k] = row
        images.append(row)

    matrix, rhs, positions = [], [], []
    for i in range(len(sols)):
        keys = sorted({key for k in range(d + 1) for key in images[k][i].support()})
        for mu, j in keys:
            # after division by (x - alpha) the term sits at mu - 1
            if mu - policy.iota(mu, j) >= 1:
                continue
            matrix.append([images[k][i].coefficient(mu, j) for k in range(d)])
            rhs.append(-images[d][i].coefficient(mu, j))
            positions.append((i, mu, j))
    return AnsatzSystem(matrix, rhs, positions, d)


# -----------------------------------------------------------
# REFINEMENT
# -----------------------------------------------------------
@dataclass
class RefinementState:
    operator: OrePoly
    policy: IotaPolicy
    s: UniPoly
    points: _Points
    elements: list
    stage: int = 0
    active: list = field(default_factory=list)
    metric: int | None = None
    trace: list = field(default_factory=list)
    _images: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return self.operator.order()

    def begin_stage(self, d: int, element: BasisElement) -> None:
        self.elements.append(element)
        self.stage = d
        self.active = list(self.points.handles)
        self.metric = self.compute_metric()
        log(f"STAGE {d} START B{d} = {element} | points {len(self.active)} | metric {self.metric}")

    def offset_at(self, h: UniPoly) -> int:
        """Integral offset of the generalized Wronskian of B_0..B_d, s^k D^k B_0 (k > d) at h."""
        field_ = self.points.field(h)
        local = self.points.local(h)
        v = local.wronskian_valuation
        for e in self.elements:
            v += ratfun_valuation(e.lc, field_)
        c0 = self.elements[0].lc
        for k in range(self.stage + 1, self.order):
            v += ratfun_valuation(RatFun(self.s) ** k * c0, field_)
        return int(v - self.policy.iota(v, 0))

    def offsets(self) -> dict:
        out = {}
        pending = list(self.points.handles)
        while pending:
            h = pending.pop(0)
            try:
                out[h] = self.offset_at(h)
            except SplitEvent as event:
                pending[0:0] = self.split(h, event)
        return out

    def compute_metric(self) -> int:
        # weighted by degree so that splitting a handle leaves it unchanged
        total = sum(h.degree() * m for h, m in self.offsets().items())
        if total < 0:
            log(f"WARNING: negative termination metric {total}")
        return total

    def split(self, h: UniPoly, event: SplitEvent) -> list[UniPoly]:
        factors = self.points.split(h, event)
        self._images.pop(h, None)
        if h in self.active:
            idx = self.active.index(h)
            self.active[idx:idx + 1] = factors
        return factors

    def attempt(self, h: UniPoly):
        """Polynomials a_0..a_{d-1} from a solvable ansatz at h, or None."""
        field_ = self.points.field(h)
        local = self.points.local(h)
        cache = self._images.setdefault(h, {})
        system = ansatz_system(self.stage, field_, self.elements, local, self.policy, cache)
        solution = system.solve(field_)
        if solution is None:
            return None
        return [a.rep.with_var("x") for a in solution]

    def commit(self, h: UniPoly, coeffs) -> None:
        d = self.stage
        acc = self.elements[d]
        for k, a in enumerate(coeffs):
            if not a.is_zero():
                acc = acc + self.elements[k].scale(RatFun(a))
        before = self.metric
        self.elements[d] = acc.scale(RatFun(1, h))
        self.metric = self.compute_metric()
        if before is not None and self.metric >= before:
            raise InvariantViolation(f"termination metric did not decrease: {before} -> {self.metric}")
        self.trace.append({
            "stage": d,
            "point": str(h),
            "metric_before": before,
            "metric_after": self.metric,
        })
        log(f"REFINED AT {h} B{d} = {self.elements[d]} | metric {before} -> {self.metric}")
        add_progress_detail("refinements")


def _evaluate(state: RefinementState, batch, executor):
    def run(h):
        try:
            return state.attempt(h)
        except SplitEvent as event:
            return event

    if executor is None or len(batch) == 1:
        return [run(h) for h in batch]
    return list(executor.map(run, batch))


def _run_stage(state: RefinementState, executor, jobs: int) -> None:
    """
    Round-robin over the active points. Up to `jobs` consecutive points are tried
    at once; results are consumed in order and everything after the first accepted
    refinement is recomputed against the new B_d.
    """
    pos = 0
    while state.active:
        pos %= len(state.active)
        n = len(state.active)
        batch = [state.active[(pos + k) % n] for k in range(min(jobs, n))]
        for h, result in zip(batch, _evaluate(state, batch, executor)):
            if isinstance(result, SplitEvent):
                pos = state.active.index(h)
                state.split(h, result)
                state.metric = state.compute_metric()
                break
            if result is None:
                pos = state.active.index(h)
                state.active.pop(pos)
                log(f"STAGE {state.stage} DISCARD {h}")
                add_progress_detail("discards")
                continue
            state.commit(h, result)
            pos = state.active.index(h) + 1
            break


# -----------------------------------------------------------
# INTEGRAL BASIS
# -----------------------------------------------------------
@dataclass(frozen=True)
class IntegralBasis:
    operator: OrePoly
    elements: tuple
    policy: IotaPolicy = field(default_factory=IotaPolicy)
    diagnostics: dict = field(default_factory=dict, compare=False, hash=False)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def to_strings(self) -> list[str]:
        return [str(e) for e in self.elements]


def _diagnostics(points: _Points, state: RefinementState, defects: dict, initial: dict) -> dict:
    summaries = _for_each_point(points, lambda h: points.local(h).summary())
    final = state.offsets()
    entries = []
    for h in points.handles:
        entry = dict(summaries.get(h) or points.local(h).summary())
        entry.update({
            "handle": str(h),
            "defect": defects.get(h),
            "offset_initial": initial.get(h),
            "offset_final": final.get(h),
        })
        entries.append(entry)
    return {"points": entries, "refinements": list(state.trace)}


def integral_basis(
    L: OrePoly,
    policy: IotaPolicy | None = None,
    *,
    jobs: int = DEFAULT_JOBS,
    max_wronskian_terms: int = MAX_WRONSKIAN_TERMS,
    init: str = "chain",
    truncation_scale: int = 1,
    verify: bool = True,
) -> IntegralBasis:
    policy = policy or IotaPolicy()
    _validate_operator(L)
    if init not in ("chain", "power"):
        raise ValueError(f"unknown stage initialization {init!r}")
    jobs = max(1, int(jobs))
    r = L.order()

    reset_progress()
    set_progress(status="RUNNING", percent=0, current_step="initial element")
    points = _Points(L, policy, max_wronskian_terms, truncation_scale)
    s = squarefree_part(L.lc.num)
    log(f"OPERATOR {L} | order {r} | handles {[str(h) for h in points.handles]}")

    b0, defects = _initial_element(points)
    state = RefinementState(L, policy, s, points, [b0])
    initial = state.offsets()

    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else nullcontext()
    with pool as executor:
        for d in range(1, r):
            set_progress(current_step=f"stage {d} of {r - 1}", stage=d, stages=r)
            if init == "chain":
                start = d_times(L, state.elements[d - 1]).scale(RatFun(s))
            else:
                start = state.elements[0]
                for _ in range(d):
                    start = d_times(L, start)
                start = start.scale(RatFun(s) ** d)
            state.begin_stage(d, start)
            _run_stage(state, executor, jobs)

    elements = tuple(e.normalized() for e in state.elements)
    basis = IntegralBasis(L, elements, policy, _diagnostics(points, state, defects, initial))
    if verify:
        set_progress(current_step="verification")
        fresh = _Points(L, policy, max_wronskian_terms, 2 * truncation_scale)
        for k, e in enumerate(elements):
            cert = _certify(fresh, e)
            if not cert.integral:
                raise InvariantViolation(f"B{k} = {e} failed the integrality re-check: {cert.witnesses[0]}")
    log(f"INTEGRAL BASIS {basis.to_strings()}")
    set_progress(status="DONE", percent=100, current_step="done")
    return basis


# -----------------------------------------------------------
# INTEGRALITY CHECKS
# -----------------------------------------------------------
@dataclass(frozen=True)
class Witness:
    point: str
    solution: int | None = None
    exponent: Fraction | None = None
    logpow: int | None = None
    reason: str = "non-integral term"

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "solution": self.solution,
            "exponent": None if self.exponent is None else str(self.exponent),
            "logpow": self.logpow,
            "reason": self.reason,
        }

    def __str__(self):
        if self.exponent is None:
            return f"{self.reason} at {self.point}"
        return f"{self.reason} at {self.point}: solution {self.solution}, exponent {self.exponent}, log power {self.logpow}"


@dataclass(frozen=True)
class IntegralityCertificate:
    integral: bool
    witnesses: tuple = ()

    def __bool__(self):
        return self.integral


def _witnesses_at(points: _Points, h: UniPoly, B: BasisElement) -> list[Witness]:
    local = points.local(h)
    target = points.policy.max_rep + 1
    out = []
    for i, t in enumerate(local.exact_solutions()):
        image = apply_to_series(B, t, target)
        for term in non_integral_terms(image, points.policy):
            out.append(Witness(describe_point(local.field), i, term.exponent, term.logpow))
    return out


def check_integral(
    L: OrePoly,
    B,
    policy: IotaPolicy | None = None,
    *,
    truncation_scale: int = 1,
    max_wronskian_terms: int = MAX_WRONSKIAN_TERMS,
) -> IntegralityCertificate:
    policy = policy or IotaPolicy()
    _validate_operator(L)
    if isinstance(B, OrePoly):
        B = reduce_mod(L, B)
    if len(B) != L.order():
        raise ShapeMismatch(f"element has {len(B)} coefficients, operator order is {L.order()}")
    return _certify(_Points(L, policy, max_wronskian_terms, truncation_scale), B)


def _certify(points: _Points, B: BasisElement) -> IntegralityCertificate:
    # poles away from the singular locus can never be integral
    s = squarefree_part(points.L.lc.num)
    stray = B.denominator()
    g = poly_gcd(stray, s)
    while g.degree() > 0:
        stray = stray // g
        g = poly_gcd(stray, s)
    if stray.degree() > 0:
        w = Witness(str(squarefree_part(stray)), reason="pole outside the singular locus")
        return IntegralityCertificate(False, (w,))

    found = _for_each_point(points, lambda h: _witnesses_at(points, h, B))
    witnesses = tuple(w for h in points.handles for w in found.get(h, []))
    return IntegralityCertificate(not witnesses, witnesses)


def is_globally_integral(L: OrePoly, policy: IotaPolicy | None = None) -> bool:
    policy = policy or IotaPolicy()
    _validate_operator(L)
    points = _Points(L, policy)
    results = _for_each_point(points, lambda h: is_locally_integral(L, points.field(h), policy))
    return all(results.values())


def is_maximal_at(L: OrePoly, B: BasisElement, p: UniPoly, policy: IotaPolicy | None = None) -> bool:
    """True when B / p is no longer integral."""
    return not check_integral(L, B.scale(RatFun(1, p)), policy).integral


# -----------------------------------------------------------
# MODULE COMPARISON
# -----------------------------------------------------------
def _as_rows(basis) -> list[list[RatFun]]:
    return [[RatFun.coerce(c) for c in e] for e in basis]


def module_equal(b1, b2) -> bool:
    """Whether two bases span the same Q[x]-module: b2 = M*b1 with M unimodular over Q[x]."""
    T1, T2 = _as_rows(b1), _as_rows(b2)
    n = len(T1)
    if len(T2) != n or any(len(row) != n for row in T1 + T2):
        raise NotABasis(f"expected two lists of {n} vectors of length {n}")
    for T in (T1, T2):
        if determinant(T, RatFun(1)).is_zero():
            raise NotABasis("elements are linearly dependent")

    transposed = [[T1[i][j] for i in range(n)] for j in range(n)]
    M = [linsolve(transposed, row, zero=RatFun(0)) for row in T2]
    if not all(c.is_polynomial() for row in M for c in row):
        return False
    det = determinant(M, RatFun(1))
    return det.is_constant() and not det.is_zero()
