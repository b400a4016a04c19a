"""Linear-divisor transform: kappa sequence, transformed recurrence,
connection application.

Given a monic family b_n orthogonal under dB and a modified measure
dA = C/(x+D) dB that is positive and normalized, the connected family

    a_n = b_n + kappa_n b_{n-1}

is orthogonal under dA, with kappa produced by the forward recursion

    kappa_1 = beta_0 + D - C,
    kappa_n = beta_{n-1} - beta_hat_{n-2}/kappa_{n-1} + D     (n >= 2),

and the new recurrence coefficients read off as

    alpha_0     = beta_0 - kappa_1,
    alpha_n     = beta_n + kappa_n - kappa_{n+1}              (n >= 1),
    alpha_hat_0 = beta_hat_0 + kappa_1 (beta_0 + kappa_2 - beta_1 - kappa_1),
    alpha_hat_{n-1} = kappa_n beta_hat_{n-2} / kappa_{n-1}    (n >= 2).

The quantity kappa_n + beta_hat_{n-2}/kappa_{n-1} - beta_{n-1} is conserved
(equal to D) along the recursion and is re-evaluated each step as a cheap
consistency monitor.  Note the monitor certifies that the computed sequence
solves the recursion, not that the recursion was stable: families whose true
kappa is the minimal solution (Charlier is one) lose digits at a rate the
monitor cannot see, and need elevated working precision instead.
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from typing import Optional

from .connection import AUTO, ConnectionCoefficients, DivisorSpec, LINEAR
from .errors import (InsufficientCoefficients, InvalidDivisor, PositivityViolation,
                     PrecisionExhausted, RegularityBreakdown)
from .measures import MeasureSpec
from .numerics import Context, DEFAULT_CONTEXT, Scalar
from .quadrature import default_quadrature_tol, integrate_adaptive, linear_reciprocal_integral
from .recurrence import RecurrenceCoefficients, eval_monic_sequence


def check_divisor_validity(measure: MeasureSpec, div: DivisorSpec,
                           ctx: Context = DEFAULT_CONTEXT, probes: int = 64) -> None:
    """Reject divisors whose polynomial changes sign on the measure support
    or whose ratio C/poly would be negative somewhere on it.

    Zeros at the boundary of a continuous support are allowed (integrability
    is quadrature's business); zeros at interior probe points or atoms are
    not.
    """
    with ctx.work():
        signs = set()
        if measure.continuous:
            lo = ctx.number(measure.support[0])
            hi = ctx.number(measure.support[1])
            for j in range(probes + 1):
                x = lo + (hi - lo) * ctx.number(Fraction(j, probes))
                v = div.poly(x, ctx)
                if v == 0:
                    if 0 < j < probes:
                        raise InvalidDivisor(f"divisor polynomial vanishes inside the support at x={x}")
                    continue
                signs.add(1 if v > 0 else -1)
        else:
            k = 0
            last_x = None
            while k < probes or (measure.atom_count is not None and k < measure.atom_count):
                if measure.atom_count is not None and k >= measure.atom_count:
                    break
                x, _ = measure.atom(k)
                v = div.poly(x, ctx)
                if v == 0:
                    raise InvalidDivisor(f"divisor polynomial vanishes at atom x={x}")
                signs.add(1 if v > 0 else -1)
                last_x = x
                k += 1
            if measure.atom_count is None and last_x is not None:
                # sign at a far tail point catches eventual sign flips
                v = div.poly(last_x + 10 ** 6, ctx)
                if v != 0:
                    signs.add(1 if v > 0 else -1)
        if len(signs) > 1:
            raise InvalidDivisor("divisor polynomial changes sign on the measure support")
        if div.resolved and signs:
            c = ctx.number(div.C)
            if c == 0:
                raise InvalidDivisor("divisor constant C must be nonzero")
            if (1 if c > 0 else -1) != signs.pop():
                raise InvalidDivisor("density ratio C/poly is negative on the support")


def normalization_constant(rc: RecurrenceCoefficients, measure: MeasureSpec, D,
                           ctx: Context = DEFAULT_CONTEXT, tol=None) -> Scalar:
    """C making C/(x+D) dB a probability measure: 1 / integral of 1/(x+D) dB.

    Continuous measures with an on-boundary divisor root make this integral
    converge only algebraically under the Gauss ladder, so measures carrying
    a density go through tanh-sinh quadrature instead.
    """
    div = DivisorSpec.linear(D)
    check_divisor_validity(measure, div, ctx)
    if tol is None:
        tol = default_quadrature_tol(ctx)
    with ctx.work():
        pole = -ctx.number(D)
    total = linear_reciprocal_integral(rc, measure, pole, ctx, tol)
    with ctx.work():
        if total == 0:
            raise InvalidDivisor("reciprocal divisor integrates to zero; cannot normalize")
        return 1 / total


def resolve_divisor(rc: RecurrenceCoefficients, measure: Optional[MeasureSpec],
                    div: DivisorSpec, ctx: Context = DEFAULT_CONTEXT, tol=None) -> DivisorSpec:
    """Fill in an "auto" C by quadrature; cross-check a user-supplied C.

    A supplied C that disagrees with the quadrature normalization by more
    than 1e-8 relative draws a warning (the value is kept).
    """
    if div.kind != LINEAR:
        raise InvalidDivisor("resolve_divisor handles linear divisors")
    if measure is None:
        if not div.resolved:
            raise InvalidDivisor("cannot resolve C without a measure")
        return div
    if not div.resolved:
        return div.with_constant(normalization_constant(rc, measure, div.D, ctx, tol))
    check_divisor_validity(measure, div, ctx)
    with ctx.work():
        reference = normalization_constant(rc, measure, div.D, ctx,
                                           tol if tol is not None else Fraction(1, 10 ** 10))
        c = ctx.number(div.C)
        if abs(c - reference) > abs(reference) * ctx.number(Fraction(1, 10 ** 8)):
            warnings.warn(f"supplied C={c} differs from quadrature normalization {reference}",
                          stacklevel=2)
    return div


def kappa_sequence(rc: RecurrenceCoefficients, div: DivisorSpec, N: int,
                   ctx: Context = DEFAULT_CONTEXT) -> ConnectionCoefficients:
    """Forward recursion for kappa_1..kappa_N.

    Raises RegularityBreakdown when a kappa needed as a divisor is (to
    working precision) zero, and PrecisionExhausted when the conserved
    quantity drifts beyond 2^(-prec/4).
    """
    if div.kind != LINEAR:
        raise InvalidDivisor("kappa_sequence needs a linear divisor")
    if not div.resolved:
        raise InvalidDivisor("divisor constant C must be resolved first")
    if N < 1:
        raise InsufficientCoefficients("need N >= 1")
    with ctx.work():
        D = ctx.number(div.D)
        C = ctx.number(div.C)
        kappas = [ctx.number(rc.beta(0)) + D - C]
        if ctx.rational:
            breakdown = lambda k, scale: k == 0
            drift_tol = None
        else:
            small = ctx.number(Fraction(1, 1 << (ctx.prec // 2)))
            breakdown = lambda k, scale: abs(k) < small * scale
            drift_tol = ctx.number(Fraction(1, 1 << (ctx.prec // 4)))
        for n in range(2, N + 1):
            prev = kappas[-1]
            bh = ctx.number(rc.beta_hat(n - 2))
            bm = ctx.number(rc.beta(n - 1))
            scale = max(ctx.number(1), abs(bh))
            if breakdown(prev, scale):
                raise RegularityBreakdown(
                    f"kappa_{n - 1} vanished; modified measure loses regularity at degree {n}",
                    index=n)
            quotient = bh / prev
            kappa_n = bm - quotient + D
            kappas.append(kappa_n)
            if drift_tol is not None:
                residual = abs(kappa_n + quotient - bm - D)
                level = max(ctx.number(1), abs(D), abs(kappa_n), abs(quotient), abs(bm))
                if residual > drift_tol * level:
                    raise PrecisionExhausted(
                        f"conserved-quantity drift at n={n}; increase the working precision")
        return ConnectionCoefficients.order1(kappas)


def transformed_recurrence(rc: RecurrenceCoefficients, cc: ConnectionCoefficients,
                           ctx: Context = DEFAULT_CONTEXT) -> RecurrenceCoefficients:
    """Recurrence coefficients of the connected family a_n.

    With kappa_1..kappa_M available this emits alpha_0..alpha_{M-1} and
    alpha_hat_0..alpha_hat_{M-1}, enough to evaluate a_0..a_M.
    """
    if cc.order != 1:
        raise InvalidDivisor("transformed_recurrence needs an order-1 connection")
    M = cc.max_index
    with ctx.work():
        kappa = [None] + [ctx.number(cc.kappa(n)) for n in range(1, M + 1)]
        alphas = [ctx.number(rc.beta(0)) - kappa[1]]
        for n in range(1, M):
            alphas.append(ctx.number(rc.beta(n)) + kappa[n] - kappa[n + 1])
        ahats = []
        if M >= 2:
            a0 = ctx.number(rc.beta_hat(0)) + kappa[1] * (
                ctx.number(rc.beta(0)) + kappa[2] - ctx.number(rc.beta(1)) - kappa[1])
            ahats.append(a0)
        for n in range(2, M + 1):
            if kappa[n - 1] == 0:
                raise RegularityBreakdown(f"kappa_{n - 1} is zero", index=n)
            ahats.append(kappa[n] * ctx.number(rc.beta_hat(n - 2)) / kappa[n - 1])
        for idx, value in enumerate(ahats):
            if not value > 0:
                raise PositivityViolation(
                    f"alpha_hat[{idx}] = {value} <= 0: modified measure is not positive definite")
    return RecurrenceCoefficients.from_arrays(alphas, ahats, name=f"divided({rc.name})")


def apply_connection(rc: RecurrenceCoefficients, cc: ConnectionCoefficients, n: int, x,
                     ctx: Context = DEFAULT_CONTEXT) -> Scalar:
    """a_n(x) assembled from the b-basis values and the connection."""
    if n < 0:
        raise InsufficientCoefficients("degree must be nonnegative")
    with ctx.work():
        if n == 0:
            return ctx.number(1)
        values = eval_monic_sequence(rc, n, x, ctx)
        out = values[n] + ctx.number(cc.kappa(n)) * values[n - 1]
        if cc.order == 2 and n >= 2:
            out += ctx.number(cc.lam(n)) * values[n - 2]
        return out
