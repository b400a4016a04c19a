"""Gauss quadrature from Jacobi matrices, plus truncated summation for
discrete measures.

Continuous measures get Gauss rules: nodes are eigenvalues of the symmetric
tridiagonal Jacobi matrix, weights squared first eigenvector components
(Golub-Welsch).  The eigensolver is a self-contained implicit-shift QL
iteration in the EISPACK tradition, run on backend numbers so it delivers
whatever working precision the context asks for.  Discrete measures are
summed atom by atom with an explicit tail bound; they never go through the
eigensolver.

Adaptive integration doubles the node count (16, 32, ..., 4096) until two
successive levels agree.  Agreement is measured against the rule's own L1
mass of the integrand, so integrals whose true value is tiny w.r.t. the
integrand scale (orthogonality residuals) terminate instead of chasing
relative digits that quadrature cannot deliver.  Sustained geometric growth
across levels short-circuits to QuadratureDivergent before the node cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from .errors import (EigenFailure, IntegrandSingular, InsufficientCoefficients,
                     PositivityViolation, QuadratureDivergent)
from .measures import MeasureSpec
from .numerics import Context, DEFAULT_CONTEXT, Scalar
from .recurrence import RecurrenceCoefficients, jacobi_matrix

MAX_NODES = 4096
MAX_ATOMS = 10 ** 6
_SWEEPS_PER_EIGENVALUE = 30
_GROWTH_RATIO = 1.2
_GROWTH_HISTORY = 3


def default_quadrature_tol(ctx: Context) -> Fraction:
    """Adaptive tolerance for a context: never tighter than the precision
    supports, never looser than 1e-12 at high precision."""
    if ctx.rational:
        return Fraction(1, 10 ** 12)
    return max(Fraction(1, 10 ** 12), Fraction(1, 1 << (ctx.prec // 2)))


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights approximating integration against a measure."""

    nodes: Tuple[Scalar, ...]
    weights: Tuple[Scalar, ...]
    tag: str = ""

    @property
    def size(self) -> int:
        return len(self.nodes)


def _tridiag_eigen_ql(diag, off, prec):
    """Eigenvalues and first eigenvector components, implicit-shift QL.

    Rotations are accumulated only against the first unit vector, which is
    all Golub-Welsch needs.  Cap of 30 sweeps per eigenvalue.
    """
    n = len(diag)
    with mp.workprec(prec):
        d = [mp.mpf(v) for v in diag]
        e = [mp.mpf(v) for v in off] + [mp.mpf(0)]
        z = [mp.mpf(0)] * n
        z[0] = mp.mpf(1)
        if n == 1:
            return d, z
        eps = mp.mpf(2) ** (1 - prec)
        one = mp.mpf(1)
        for l in range(n):
            sweeps = 0
            while True:
                m = l
                while m < n - 1:
                    if abs(e[m]) <= eps * (abs(d[m]) + abs(d[m + 1])):
                        break
                    m += 1
                if m == l:
                    break
                sweeps += 1
                if sweeps > _SWEEPS_PER_EIGENVALUE:
                    raise EigenFailure(f"QL sweep cap exceeded at eigenvalue {l} (dimension {n})")
                g = (d[l + 1] - d[l]) / (2 * e[l])
                r = mp.sqrt(g * g + one)
                g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
                s = one
                c = one
                p = mp.mpf(0)
                for i in range(m - 1, l - 1, -1):
                    f = s * e[i]
                    b = c * e[i]
                    if abs(f) >= abs(g):
                        c = g / f
                        r = mp.sqrt(c * c + one)
                        e[i + 1] = f * r
                        s = one / r
                        c = c * s
                    else:
                        s = f / g
                        r = mp.sqrt(s * s + one)
                        e[i + 1] = g * r
                        c = one / r
                        s = s * c
                    g = d[i + 1] - p
                    r = (d[i] - g) * s + 2 * c * b
                    p = s * r
                    d[i + 1] = g + p
                    g = c * r - b
                    f = z[i + 1]
                    z[i + 1] = s * z[i] + c * f
                    z[i] = c * z[i] - s * f
                d[l] = d[l] - p
                e[l] = g
                e[m] = mp.mpf(0)
        order = sorted(range(n), key=lambda k: d[k])
        return [d[k] for k in order], [z[k] for k in order]


def gauss_rule(rc: RecurrenceCoefficients, m: int, ctx: Context = DEFAULT_CONTEXT) -> QuadratureRule:
    """m-point Gauss rule for the measure orthogonalizing rc.

    Exact for polynomials of degree <= 2m-1.  Rules are cached on the
    recurrence object per (m, precision).
    """
    key = (m, ctx.prec)
    cached = rc._rule_cache.get(key)
    if cached is not None:
        return cached
    jm = jacobi_matrix(rc, m, ctx)  # float backend enforced here
    nodes, firsts = _tridiag_eigen_ql(jm.diag, jm.offdiag, ctx.prec)
    with ctx.work():
        weights = [z * z for z in firsts]
    for w in weights:
        if not w > 0:
            raise PositivityViolation("Gauss weight collapsed to zero")
    rule = QuadratureRule(nodes=tuple(nodes), weights=tuple(weights), tag=rc.name)
    rc._rule_cache[key] = rule
    return rule


def _checked(value):
    if isinstance(value, mpmath.mpf) and not mpmath.isfinite(value):
        raise IntegrandSingular("integrand not finite at a quadrature node")
    return value


def integrate(rule: QuadratureRule, f: Callable, ctx: Context = DEFAULT_CONTEXT) -> Scalar:
    """Plain weighted sum of f over the rule's nodes."""
    with ctx.work():
        total = ctx.number(0)
        for x, w in zip(rule.nodes, rule.weights):
            try:
                total += w * _checked(f(x))
            except ZeroDivisionError as exc:
                raise IntegrandSingular(f"integrand singular at node {x}") from exc
        return total


def _vector_at(f_vec, x, size):
    try:
        vals = f_vec(x)
    except ZeroDivisionError as exc:
        raise IntegrandSingular(f"integrand singular at {x}") from exc
    if len(vals) != size:
        raise ValueError("vector integrand changed size")
    return [_checked(v) for v in vals]


def _diverging(history_i):
    if len(history_i) < _GROWTH_HISTORY + 1:
        return False
    tail = history_i[-(_GROWTH_HISTORY + 1):]
    for a, b in zip(tail, tail[1:]):
        if not (abs(b) > _GROWTH_RATIO * abs(a) and abs(a) > 0):
            return False
    return True


def integrate_vector_adaptive(rc: Optional[RecurrenceCoefficients], measure: MeasureSpec,
                              f_vec: Callable, size: int, tol, ctx: Context = DEFAULT_CONTEXT,
                              min_nodes: int = 16, max_nodes: int = MAX_NODES,
                              max_atoms: int = MAX_ATOMS) -> List[Scalar]:
    """Adaptively integrate a vector-valued integrand against the measure.

    All components converge on the same ladder/truncation, sharing node
    evaluations.  Continuous measures need rc for the Gauss rules.
    """
    if measure.continuous:
        if rc is None:
            raise InsufficientCoefficients("continuous integration needs recurrence coefficients")
        return _adaptive_continuous(rc, f_vec, size, tol, ctx, min_nodes, max_nodes)
    return _adaptive_discrete(measure, f_vec, size, tol, ctx, max_atoms)


def integrate_adaptive(rc: Optional[RecurrenceCoefficients], measure: MeasureSpec, f: Callable,
                       tol, ctx: Context = DEFAULT_CONTEXT, min_nodes: int = 16,
                       max_nodes: int = MAX_NODES, max_atoms: int = MAX_ATOMS) -> Scalar:
    """Integrate f against the measure to the requested tolerance.

    Continuous: node-doubling Gauss ladder.  Discrete: tail-bounded atom
    summation.  Raises QuadratureDivergent when the budget runs out or the
    ladder shows sustained geometric growth.
    """
    out = integrate_vector_adaptive(rc, measure, lambda x: (f(x),), 1, tol, ctx,
                                    min_nodes, max_nodes, max_atoms)
    return out[0]


def _adaptive_continuous(rc, f_vec, size, tol, ctx, min_nodes, max_nodes):
    with ctx.work():
        tol = ctx.number(tol)
        floor = ctx.number(2) ** (-4 * ctx.prec)
        prev: Optional[List] = None
        history = [[] for _ in range(size)]
        m = min_nodes
        while m <= max_nodes:
            rule = gauss_rule(rc, m, ctx)
            totals = [ctx.number(0) for _ in range(size)]
            masses = [ctx.number(0) for _ in range(size)]
            for x, w in zip(rule.nodes, rule.weights):
                vals = _vector_at(f_vec, x, size)
                for i, v in enumerate(vals):
                    totals[i] += w * v
                    masses[i] += w * abs(v)
            for i in range(size):
                history[i].append(totals[i])
            if prev is not None:
                ok = True
                for i in range(size):
                    scale = masses[i] if masses[i] > floor else floor
                    if abs(totals[i] - prev[i]) > tol * scale:
                        ok = False
                        break
                if ok:
                    return totals
                for i in range(size):
                    if _diverging(history[i]) and abs(totals[i] - prev[i]) > tol * masses[i]:
                        raise QuadratureDivergent(
                            f"sustained growth across Gauss levels (m={m}); integral looks divergent")
            prev = totals
            m *= 2
        raise QuadratureDivergent(f"no convergence by m={max_nodes} Gauss nodes")


def _adaptive_discrete(measure, f_vec, size, tol, ctx, max_atoms):
    window = 8
    with ctx.work():
        tol = ctx.number(tol)
        floor = ctx.number(2) ** (-4 * ctx.prec)
        totals = [ctx.number(0) for _ in range(size)]
        masses = [ctx.number(0) for _ in range(size)]
        recent_terms = [[] for _ in range(size)]
        recent_fmax = []
        count = measure.atom_count
        k = 0
        while k < max_atoms:
            if count is not None and k >= count:
                return totals
            x, w = measure.atom(k)
            vals = _vector_at(f_vec, x, size)
            fmax = max(abs(v) for v in vals) if vals else ctx.number(0)
            for i, v in enumerate(vals):
                term = w * v
                totals[i] += term
                masses[i] += abs(term)
                recent_terms[i].append(abs(term))
                if len(recent_terms[i]) > window:
                    recent_terms[i].pop(0)
            recent_fmax.append(fmax)
            if len(recent_fmax) > window:
                recent_fmax.pop(0)
            if count is None and k >= window:
                done = True
                for i in range(size):
                    scale = masses[i] if masses[i] > floor else floor
                    if max(recent_terms[i]) > tol * scale / 8:
                        done = False
                        break
                if done and measure.tail_bound is not None:
                    bound = measure.tail_bound(k)
                    guard = 4 * max(recent_fmax) + 1
                    for i in range(size):
                        scale = masses[i] if masses[i] > floor else floor
                        if bound * guard > tol * scale:
                            done = False
                            break
                if done:
                    return totals
            k += 1
        if count is not None:
            return totals
        raise QuadratureDivergent(f"discrete summation did not settle within {max_atoms} atoms")


def density_integral(measure: MeasureSpec, f: Callable, ctx: Context, tol=None) -> Scalar:
    """Lebesgue integral of f(x) * density(x) over the support, by tanh-sinh.

    Doubly-exponential quadrature digests integrable algebraic endpoint
    singularities (Jacobi-type densities, reciprocal factors with a boundary
    root), which the polynomial-exactness Gauss ladder cannot resolve within
    its node budget.  Raises QuadratureDivergent when the reported error
    estimate is incompatible with the requested tolerance.
    """
    if not measure.continuous or measure.density is None:
        raise IntegrandSingular("density_integral needs a continuous measure with a density")
    if tol is None:
        tol = default_quadrature_tol(ctx)
    lo, hi = measure.support
    with mp.workprec(ctx.prec + 26):
        density = measure.density
        def integrand(x):
            try:
                return _checked(f(x)) * density(x)
            except ZeroDivisionError as exc:
                raise IntegrandSingular(f"integrand singular at {x}") from exc
        value, err = mp.quad(integrand, [mpmath.mpmathify(lo), mpmath.mpmathify(hi)],
                             error=True)
        if not mp.isfinite(value):
            raise QuadratureDivergent("tanh-sinh integral not finite")
        scale = max(abs(value), mp.mpf(2) ** (-2 * ctx.prec))
        tol_v = mpmath.mpmathify(tol)
        if err > scale * tol_v and err > scale * mp.mpf(2) ** (-ctx.prec):
            raise QuadratureDivergent(
                f"tanh-sinh error estimate {mp.nstr(err, 5)} exceeds tolerance")
    with ctx.work():
        return +value


def measure_integral(rc: Optional[RecurrenceCoefficients], measure: MeasureSpec, f: Callable,
                     ctx: Context, tol=None) -> Scalar:
    """Best available route for integral of f against the measure: tanh-sinh
    on the density for continuous measures that carry one, tail-bounded atom
    summation for discrete measures, Gauss ladder otherwise."""
    if tol is None:
        tol = default_quadrature_tol(ctx)
    if measure.continuous and measure.density is not None:
        try:
            return density_integral(measure, f, ctx, tol)
        except QuadratureDivergent:
            if rc is None:
                raise
            return integrate_adaptive(rc, measure, f, tol, ctx)
    return integrate_adaptive(rc, measure, f, tol, ctx)


def linear_reciprocal_integral(rc: Optional[RecurrenceCoefficients], measure: MeasureSpec,
                               x0, ctx: Context, tol=None) -> Scalar:
    """Integral of 1/(x - x0) against the measure (the Stieltjes-transform
    value the divisor reductions need)."""
    with ctx.work():
        pole = ctx.number(x0)
    return measure_integral(rc, measure, lambda x: 1 / (x - pole), ctx, tol)
