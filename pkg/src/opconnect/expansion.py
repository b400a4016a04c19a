"""Inversion of the order-1 connection and the Fourier expansion of the
density ratio.

Inverting a_n = b_n + kappa_n b_{n-1} gives

    b_n = a_n + sum_{j=1..n} (-1)^j (kappa_{n-j+1} ... kappa_n) a_{n-j},

and expanding the ratio C/(x+D) in the b-basis gives coefficients

    f_0 = 1,   f_n = (-1)^n prod_{k=1..n} kappa_k / beta_hat_{k-1},

with the L2 series  C/(x+D) = sum f_n b_n  under dB.  The Parseval identity
for that series reads

    1 + sum_{n>=1} prod_{k=1..n} (kappa_k^2 / beta_hat_{k-1})
        = C^2 * integral of (x+D)^(-2) dB,

each term being f_n^2 times the squared norm of b_n.  Partial sums are
nondecreasing and bounded by the right-hand side whenever that integral is
finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from mpmath import mp

from .connection import ConnectionCoefficients, DivisorSpec, LINEAR
from .errors import InsufficientCoefficients, InvalidDivisor
from .measures import MeasureSpec
from .numerics import Context, DEFAULT_CONTEXT, Scalar
from .quadrature import default_quadrature_tol, integrate_adaptive
from .recurrence import RecurrenceCoefficients, eval_monic_sequence


def inversion_coefficients(cc: ConnectionCoefficients, n: int,
                           ctx: Context = DEFAULT_CONTEXT) -> List[Scalar]:
    """Coefficients c_0..c_n expressing b_n in the a-basis:
    b_n = sum_j c_j a_{n-j}, with c_0 = 1."""
    if cc.order != 1:
        raise InvalidDivisor("inversion is implemented for order-1 connections")
    if n < 0:
        raise InsufficientCoefficients("degree must be nonnegative")
    with ctx.work():
        out = [ctx.number(1)]
        product = ctx.number(1)
        for j in range(1, n + 1):
            product = product * ctx.number(cc.kappa(n - j + 1))
            out.append(-product if j % 2 else product)
        return out


def fourier_coefficients(cc: ConnectionCoefficients, rc: RecurrenceCoefficients, N: int,
                         ctx: Context = DEFAULT_CONTEXT) -> List[Scalar]:
    """f_0..f_N of the density-ratio expansion, by running products."""
    if cc.order != 1:
        raise InvalidDivisor("the expansion needs an order-1 connection")
    with ctx.work():
        out = [ctx.number(1)]
        ratio = ctx.number(1)
        for k in range(1, N + 1):
            ratio = ratio * ctx.number(cc.kappa(k)) / ctx.number(rc.beta_hat(k - 1))
            out.append(-ratio if k % 2 else ratio)
        return out


def evaluate_partial_sum(rc: RecurrenceCoefficients, coefficients, N: int, x,
                         ctx: Context = DEFAULT_CONTEXT) -> Scalar:
    """sum_{n<=N} f_n b_n(x) for stored expansion coefficients."""
    if N + 1 > len(coefficients):
        raise InsufficientCoefficients(f"need coefficients through index {N}")
    with ctx.work():
        values = eval_monic_sequence(rc, N, x, ctx)
        total = ctx.number(0)
        for f, b in zip(coefficients[:N + 1], values):
            total += ctx.number(f) * b
        return total


@dataclass(frozen=True)
class ParsevalReport:
    """Partial sums of the Parseval identity against its quadrature value.

    partial_sums[j] is the sum through term j (index 0 is the bare 1).  The
    summability sequence accumulates term_n * log(n)^2, whose convergence is
    the pointwise-convergence sufficient condition; it is reported, never
    asserted.
    """

    partial_sums: Tuple[Scalar, ...]
    rhs: Scalar
    residual: Scalar
    summability_partial_sums: Tuple[Scalar, ...]
    summability_convergent: bool


def parseval_residual(rc: RecurrenceCoefficients, cc: ConnectionCoefficients,
                      div: DivisorSpec, measure: MeasureSpec, N: int,
                      ctx: Context = DEFAULT_CONTEXT, tol=None) -> ParsevalReport:
    """|partial sum - quadrature RHS| for the Parseval identity.

    Raises QuadratureDivergent when the second-moment integral of the
    divisor reciprocal does not converge (the identity then has no finite
    right-hand side).
    """
    if div.kind != LINEAR:
        raise InvalidDivisor("Parseval identity applies to the linear divisor")
    if not div.resolved:
        raise InvalidDivisor("divisor constant C must be resolved")
    if tol is None:
        tol = default_quadrature_tol(ctx)
    with ctx.work():
        sums = [ctx.number(1)]
        term = ctx.number(1)
        log_sums = []
        log_total = ctx.number(0)
        for n in range(1, N + 1):
            kn = ctx.number(cc.kappa(n))
            term = term * kn * kn / ctx.number(rc.beta_hat(n - 1))
            sums.append(sums[-1] + term)
            if n >= 2:
                if ctx.rational:
                    log_total += term  # log factor needs floats; plain tail reported
                else:
                    log_total += term * mp.log(n) ** 2
            log_sums.append(log_total)
        rhs_integral = integrate_adaptive(
            rc, measure, lambda x: 1 / div.poly(x, ctx) ** 2, tol, ctx)
        C = ctx.number(div.C)
        rhs = C * C * rhs_integral
        residual = abs(sums[-1] - rhs)
        quarter = max(1, len(log_sums) // 4)
        if len(log_sums) >= 8:
            recent = log_sums[-1] - log_sums[-1 - quarter]
            earlier = (log_sums[-1 - quarter] - log_sums[-1 - 2 * quarter]
                       if len(log_sums) > 2 * quarter else recent)
            convergent = bool(recent <= earlier * ctx.number(Fraction(3, 5)))
        else:
            convergent = False
    return ParsevalReport(partial_sums=tuple(sums), rhs=rhs, residual=residual,
                          summability_partial_sums=tuple(log_sums),
                          summability_convergent=convergent)
