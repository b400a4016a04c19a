"""Recursion-free oracles for connection coefficients.

Two independent routes:

* Gram systems: entries G_ij = integral of b_i b_j against the modified
  measure; the order-r connection for degree n solves the r-by-r system
  expressing orthogonality of a_n to b_{n-1}..b_{n-r}.  Shares the b-basis
  with the transform code paths but nothing else.
* Moment/Hankel route: build the monic orthogonal polynomial of the modified
  measure from raw moments by a Hankel solve.  Shares nothing with the
  b-basis, so it catches basis-level mistakes, at the price of notorious
  conditioning -- hence the degree cap and the elevated minimum precision.

Integrals of the form polynomial/divisor are evaluated by exact reduction
where possible: with p = q * poly + rem (polynomial division against the
monic divisor), the q part is integrated exactly by a single Gauss rule and
rem/poly collapses by partial fractions onto per-root Stieltjes values
L_i = integral of dB/(x - x0_i).  Divisor roots on the support boundary make
the naive Gauss ladder converge only algebraically; the reduction sidesteps
that entirely.  Divisors without distinct real roots fall back to the ladder
(they have no on-support singularity to hurt it).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Union

import mpmath
from mpmath import mp

from .connection import DivisorSpec, LINEAR, QUADRATIC
from .errors import (InsufficientCoefficients, IntegrandSingular, OracleSingular,
                     QuadratureDivergent)
from .measures import MeasureSpec
from .numerics import Context, DEFAULT_CONTEXT, Scalar
from .quadrature import (default_quadrature_tol, gauss_rule, integrate_vector_adaptive,
                         linear_reciprocal_integral)
from .recurrence import RecurrenceCoefficients, eval_monic_sequence

HANKEL_DEGREE_CAP = 12
HANKEL_MIN_PREC = 256

Divisor = Union[DivisorSpec, Sequence, None]


def _poly_eval(coeffs, x, ctx):
    out = ctx.number(0)
    for c in reversed(list(coeffs)):
        out = out * x + ctx.number(c)
    return out


def _divisor_poly_fn(div: Divisor, ctx: Context) -> Callable:
    if isinstance(div, DivisorSpec):
        return lambda x: div.poly(x, ctx)
    coeffs = list(div)
    if not coeffs or ctx.number(coeffs[-1]) != 1:
        raise OracleSingular("general divisor must be a monic coefficient list")
    return lambda x: _poly_eval(coeffs, x, ctx)


def _divisor_constant(div: Divisor, ctx: Context):
    if isinstance(div, DivisorSpec) and div.resolved:
        return ctx.number(div.C)
    return None


def _real_distinct_roots(div: Divisor, ctx: Context) -> Optional[List[Scalar]]:
    """x-locations of the divisor roots when they are real and separated."""
    if div is None or ctx.rational:
        return None
    with ctx.work():
        gap_tol = ctx.number(Fraction(1, 1 << (ctx.prec // 2)))
        if isinstance(div, DivisorSpec):
            if div.kind == LINEAR:
                return [-ctx.number(div.D)]
            D = ctx.number(div.D)
            E = ctx.number(div.E)
            disc = D * D - 4 * E
            if disc <= 0:
                return None
            s = ctx.sqrt(disc)
            roots = [(-D + s) / 2, (-D - s) / 2]
            if abs(roots[0] - roots[1]) < gap_tol * max(1, abs(roots[0])):
                return None
            return roots
        coeffs = [ctx.number(c) for c in div]
        try:
            with mp.workprec(ctx.prec + 16):
                found = mp.polyroots(list(reversed(coeffs)), maxsteps=200)
        except mp.libmp.NoConvergence:
            return None
        roots = []
        for r in found:
            if abs(mp.im(r)) > gap_tol * (1 + abs(mp.re(r))):
                return None
            roots.append(+mp.re(r))
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                if abs(roots[i] - roots[j]) < gap_tol * (1 + abs(roots[i])):
                    return None
        return roots


def reciprocal_pairing(rc: RecurrenceCoefficients, measure: MeasureSpec, div: Divisor,
                       values_fn: Callable, count: int, max_degree: int,
                       ctx: Context = DEFAULT_CONTEXT, tol=None) -> List[Scalar]:
    """Integrals of p_k(x) / poly(x) against dB for the polynomial vector
    produced by values_fn (no divisor constant applied; div None means no
    reciprocal factor at all)."""
    if tol is None:
        tol = default_quadrature_tol(ctx)

    if div is None:
        if measure.continuous:
            m = max_degree // 2 + 3
            rule = gauss_rule(rc, m, ctx)
            with ctx.work():
                totals = [ctx.number(0)] * count
                for x, w in zip(rule.nodes, rule.weights):
                    vals = values_fn(x)
                    for k in range(count):
                        totals[k] += w * vals[k]
                return totals
        return integrate_vector_adaptive(rc, measure, values_fn, count, tol, ctx)

    poly_fn = _divisor_poly_fn(div, ctx)
    roots = _real_distinct_roots(div, ctx) if (measure.continuous and
                                               measure.density is not None) else None
    if roots is not None:
        # The division reduction is for roots at (or hugging) the support
        # boundary, where the Gauss ladder converges only algebraically.  A
        # root far outside keeps the ladder geometric while the reduction
        # would cancel catastrophically (the numerator polynomials blow up
        # at the root like the Bernstein-ellipse factor), so fall back.
        with ctx.work():
            lo = ctx.number(measure.support[0])
            hi = ctx.number(measure.support[1])
            margin = (hi - lo) / 256
            for x0 in roots:
                if x0 < lo - margin or x0 > hi + margin:
                    roots = None
                    break
    if roots is not None:
        L = [linear_reciprocal_integral(rc, measure, x0, ctx, tol) for x0 in roots]
        m = max_degree // 2 + 3
        rule = gauss_rule(rc, m, ctx)
        with ctx.work():
            inv_denoms = []
            for i, x0 in enumerate(roots):
                d = ctx.number(1)
                for k, xk in enumerate(roots):
                    if k != i:
                        d *= x0 - xk
                inv_denoms.append(1 / d)
            root_vals = [values_fn(x0) for x0 in roots]
            totals = [ctx.number(0)] * count
            for x, w in zip(rule.nodes, rule.weights):
                vals = values_fn(x)
                pv = poly_fn(x)
                shifts = []
                for x0 in roots:
                    dx = x - x0
                    if dx == 0:
                        raise IntegrandSingular("divisor root coincides with a Gauss node")
                    shifts.append(dx)
                for k in range(count):
                    q = vals[k] / pv
                    for i in range(len(roots)):
                        q -= root_vals[i][k] * inv_denoms[i] / shifts[i]
                    totals[k] += w * q
            for k in range(count):
                for i in range(len(roots)):
                    totals[k] += root_vals[i][k] * inv_denoms[i] * L[i]
            return totals

    def integrand(x):
        pv = poly_fn(x)
        return [v / pv for v in values_fn(x)]

    return integrate_vector_adaptive(rc, measure, integrand, count, tol, ctx,
                                     min_nodes=max(16, max_degree // 2 + 4))


def solve_dense(A, b, ctx: Context):
    """Gaussian elimination with partial pivoting on backend numbers."""
    n = len(b)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    with ctx.work():
        tiny = ctx.number(0) if ctx.rational else ctx.number(Fraction(1, 1 << (ctx.prec - 8)))
        for col in range(n):
            pivot_row = max(range(col, n), key=lambda r: abs(M[r][col]))
            scale = max((abs(M[pivot_row][j]) for j in range(col, n)), default=ctx.number(0))
            if abs(M[pivot_row][col]) <= tiny * max(ctx.number(1), scale) or M[pivot_row][col] == 0:
                raise OracleSingular(f"singular linear system (pivot {col})")
            M[col], M[pivot_row] = M[pivot_row], M[col]
            inv = 1 / M[col][col]
            for r in range(col + 1, n):
                factor = M[r][col] * inv
                if factor != 0:
                    for j in range(col, n + 1):
                        M[r][j] -= factor * M[col][j]
        out = [ctx.number(0)] * n
        for row in range(n - 1, -1, -1):
            acc = M[row][n]
            for j in range(row + 1, n):
                acc -= M[row][j] * out[j]
            out[row] = acc / M[row][row]
        return out


def gram_matrix(rc: RecurrenceCoefficients, measure: MeasureSpec, div: Divisor,
                size: int, ctx: Context = DEFAULT_CONTEXT, tol=None) -> List[List[Scalar]]:
    """Symmetric matrix of integrals of b_i b_j against the modified measure.

    An unresolved (or absent) divisor constant is handled by normalizing the
    whole matrix so that G_00 = 1, which is exactly the quadrature
    normalization of the modified measure.
    """
    pairs = [(i, j) for i in range(size) for j in range(i, size)]

    def values_fn(x):
        values = eval_monic_sequence(rc, size - 1, x, ctx)
        return [values[i] * values[j] for i, j in pairs]

    flat = reciprocal_pairing(rc, measure, div, values_fn, len(pairs),
                              2 * (size - 1), ctx, tol)
    constant = _divisor_constant(div, ctx) if div is not None else None
    with ctx.work():
        G = [[None] * size for _ in range(size)]
        for (i, j), value in zip(pairs, flat):
            G[i][j] = value
            G[j][i] = value
        if div is None:
            return G
        if constant is None:
            g00 = G[0][0]
            if g00 == 0:
                raise OracleSingular("measure normalization integral vanished")
            return [[entry / g00 for entry in row] for row in G]
        return [[entry * constant for entry in row] for row in G]


def direct_connection(rc: RecurrenceCoefficients, measure: MeasureSpec, div: Divisor,
                      r: int, n: int, ctx: Context = DEFAULT_CONTEXT, tol=None,
                      gram: Optional[List[List[Scalar]]] = None) -> List[Scalar]:
    """Connection coefficients c_n^(1)..c_n^(min(r, n)) straight from Gram systems.

    Solves the orthogonality conditions of a_n = b_n + sum_j c_j b_{n-j}
    against b_{n-1}..b_{n-r}; no recursion involved, any divisor degree.
    For n < r the reduced system with the available terms is solved.
    """
    if r < 1 or n < 1:
        raise InsufficientCoefficients("need r >= 1 and n >= 1")
    size = min(r, n)
    if gram is None:
        gram = gram_matrix(rc, measure, div, n + 1, ctx, tol)
    if len(gram) < n + 1:
        raise InsufficientCoefficients("gram matrix smaller than degree + 1")
    with ctx.work():
        # mpmath rounds even unary minus at the ambient precision, so the
        # right-hand side must be negated inside the working context
        A = [[gram[n - j][n - i] for j in range(1, size + 1)] for i in range(1, size + 1)]
        b = [-gram[n][n - i] for i in range(1, size + 1)]
    return solve_dense(A, b, ctx)


def measure_moments(rc: RecurrenceCoefficients, measure: MeasureSpec, div: Divisor,
                    count: int, ctx: Context = DEFAULT_CONTEXT, tol=None) -> List[Scalar]:
    """Moments mu_0..mu_{count-1} of the (optionally divisor-modified) measure."""
    def values_fn(x):
        out = []
        power = ctx.number(1)
        for _ in range(count):
            out.append(power)
            power = power * x
        return out

    raw = reciprocal_pairing(rc, measure, div, values_fn, count, count - 1, ctx, tol)
    constant = _divisor_constant(div, ctx) if div is not None else None
    with ctx.work():
        if div is None:
            return list(raw)
        if constant is None:
            if raw[0] == 0:
                raise OracleSingular("zeroth moment vanished")
            return [v / raw[0] for v in raw]
        return [v * constant for v in raw]


def gram_schmidt_moments(moments: Sequence, n: int, ctx: Context = DEFAULT_CONTEXT) -> List[Scalar]:
    """Ascending coefficients of the monic degree-n orthogonal polynomial of
    the measure behind the given moments, via a Hankel solve.

    Hankel conditioning grows exponentially with n, so degrees beyond 12 are
    refused and the solve runs at no less than 256 bits.
    """
    if n > HANKEL_DEGREE_CAP:
        raise OracleSingular(f"Hankel route capped at degree {HANKEL_DEGREE_CAP}")
    if len(moments) < 2 * n:
        raise InsufficientCoefficients(f"need moments mu_0..mu_{2 * n - 1} for degree {n}")
    if n == 0:
        return [ctx.number(1)]
    work_ctx = ctx if ctx.rational or ctx.prec >= HANKEL_MIN_PREC else ctx.with_prec(HANKEL_MIN_PREC)
    with work_ctx.work():
        mu = [work_ctx.number(m) for m in moments]
        A = [[mu[i + k] for k in range(n)] for i in range(n)]
        b = [-mu[n + i] for i in range(n)]
    low = solve_dense(A, b, work_ctx)
    return [ctx.number(c) for c in low] + [ctx.number(1)]
