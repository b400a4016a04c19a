"""Quadratic-divisor transforms.

Symmetric case (beta = 0, D = 0): the connection a_n = b_n + lambda_n b_{n-2}
has lambda produced by the second-order recursion

    lambda_1 = 0,
    lambda_2 = beta_hat_0 + E - C,
    lambda_3 = beta_hat_1 + E - (E/(C-E)) beta_hat_0,
    lambda_{n+1} = lambda_n + beta_hat_{n-1} - (lambda_n/lambda_{n-1}) beta_hat_{n-3},

and the new recurrence is alpha = 0, alpha_hat_{n-1} = beta_hat_{n-1} +
lambda_n - lambda_{n+1}.

General case: the four coupled identities

    (s1) kappa_{n+1} + alpha_n = beta_n + kappa_n
    (s2) lambda_{n+1} + alpha_n kappa_n + alpha_hat_{n-1}
             = beta_hat_{n-1} + kappa_n beta_{n-1} + lambda_n
    (s3) alpha_n lambda_n + alpha_hat_{n-1} kappa_{n-1}
             = kappa_n beta_hat_{n-2} + lambda_n beta_{n-2}
    (s4) alpha_hat_{n-1} lambda_{n-1} = lambda_n beta_hat_{n-3}

are iterated forward from quadrature-bootstrapped seeds kappa_1..kappa_3,
lambda_2, lambda_3 (per-degree Gram systems).  The forward iteration
amplifies seed and roundoff error geometrically (roughly like
(beta_hat/lambda)^n), so the implementation measures that amplification with
a perturbation probe, picks a working precision accordingly, and certifies
the result by agreement between two runs at different precisions before
rounding back to the caller's context.  Requested precision that cannot be
certified raises PrecisionExhausted.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction
from typing import List, Optional, Tuple

from .connection import AUTO, ConnectionCoefficients, DivisorSpec, QUADRATIC
from .errors import (FactorizationUnavailable, InsufficientCoefficients, InvalidDivisor,
                     NotSymmetric, OpconnectError, PositivityViolation, PrecisionExhausted,
                     RegularityBreakdown)
from .linear import (check_divisor_validity, kappa_sequence, normalization_constant,
                     transformed_recurrence)
from .measures import MeasureSpec
from .numerics import Context, DEFAULT_CONTEXT, Scalar
from .oracle import direct_connection, gram_matrix
from .quadrature import default_quadrature_tol, measure_integral
from .recurrence import RecurrenceCoefficients


def _require_symmetric(rc: RecurrenceCoefficients, upto: int, ctx: Context) -> None:
    with ctx.work():
        if ctx.rational:
            threshold = 0
        else:
            threshold = ctx.number(Fraction(1, 1 << (3 * ctx.prec // 4)))
        for n in range(upto + 1):
            if abs(ctx.number(rc.beta(n))) > threshold:
                raise NotSymmetric(f"beta_{n} is nonzero; symmetric path needs beta identically 0")


def symmetric_lambda_sequence(rc: RecurrenceCoefficients, C, E, N: int,
                              ctx: Context = DEFAULT_CONTEXT) -> ConnectionCoefficients:
    """lambda_1..lambda_N for the symmetric divisor C/(x^2+E); kappa is zero."""
    if N < 1:
        raise InsufficientCoefficients("need N >= 1")
    _require_symmetric(rc, N, ctx)
    with ctx.work():
        Cv = ctx.number(C)
        Ev = ctx.number(E)
        gap = Cv - Ev
        if gap == 0 or (not ctx.rational
                        and abs(gap) < ctx.number(Fraction(1, 1 << (ctx.prec // 2))) * max(ctx.number(1), abs(Ev))):
            raise InvalidDivisor("C = E leaves the lambda recursion undefined")
        lambdas: List[Scalar] = [ctx.number(0)]
        if N >= 2:
            lambdas.append(ctx.number(rc.beta_hat(0)) + Ev - Cv)
        if N >= 3:
            lambdas.append(ctx.number(rc.beta_hat(1)) + Ev - (Ev / gap) * ctx.number(rc.beta_hat(0)))
        small = None if ctx.rational else ctx.number(Fraction(1, 1 << (ctx.prec // 2)))
        for n in range(3, N):
            lam_n = lambdas[n - 1]
            lam_nm1 = lambdas[n - 2]
            bh3 = ctx.number(rc.beta_hat(n - 3))
            scale = max(ctx.number(1), abs(bh3))
            if lam_nm1 == 0 or (small is not None and abs(lam_nm1) < small * scale):
                raise RegularityBreakdown(f"lambda_{n - 1} vanished at step {n + 1}", index=n + 1)
            lambdas.append(lam_n + ctx.number(rc.beta_hat(n - 1)) - (lam_n / lam_nm1) * bh3)
        zeros = [ctx.number(0)] * N
        return ConnectionCoefficients.order2(zeros, lambdas)


def symmetric_transformed_recurrence(rc: RecurrenceCoefficients, cc: ConnectionCoefficients,
                                     ctx: Context = DEFAULT_CONTEXT) -> RecurrenceCoefficients:
    """Recurrence of the connected family in the symmetric case.

    Primary formula alpha_hat_{n-1} = beta_hat_{n-1} + lambda_n - lambda_{n+1};
    the ratio form alpha_hat_{n-1} = lambda_n beta_hat_{n-3} / lambda_{n-1} is
    evaluated as a cross-check wherever its denominator is usable.
    """
    if cc.order != 2:
        raise InvalidDivisor("symmetric transform needs an order-2 connection")
    M = cc.max_index
    with ctx.work():
        for n in range(1, M + 1):
            if ctx.number(cc.kappa(n)) != 0:
                raise NotSymmetric("connection has nonzero kappa; not a symmetric-case connection")
        ahats = []
        check_tol = None if ctx.rational else ctx.number(Fraction(1, 1 << (ctx.prec // 4)))
        small = None if ctx.rational else ctx.number(Fraction(1, 1 << (ctx.prec // 2)))
        for n in range(1, M):
            value = ctx.number(rc.beta_hat(n - 1)) + ctx.number(cc.lam(n)) - ctx.number(cc.lam(n + 1))
            if n >= 3:
                lam_nm1 = ctx.number(cc.lam(n - 1))
                usable = lam_nm1 != 0 if ctx.rational else (
                    small is not None and abs(lam_nm1) >= small)
                if usable:
                    ratio_form = ctx.number(cc.lam(n)) * ctx.number(rc.beta_hat(n - 3)) / lam_nm1
                    mismatch = abs(ratio_form - value)
                    scale = max(ctx.number(1), abs(value))
                    bad = mismatch != 0 if ctx.rational else mismatch > check_tol * scale
                    if bad:
                        raise PrecisionExhausted(
                            f"alpha_hat cross-check failed at n={n}: reduced form {value} vs "
                            f"ratio form {ratio_form}; inconsistent inputs or precision exhausted")
            if not value > 0:
                raise PositivityViolation(f"alpha_hat[{n - 1}] = {value} <= 0")
            ahats.append(value)
        alphas = [ctx.number(0)] * max(len(ahats), 1)
    return RecurrenceCoefficients.from_arrays(alphas, ahats, name=f"divided({rc.name})")


def _forward_scheme(rc: RecurrenceCoefficients, seeds, N: int, ctx: Context):
    """Iterate (s1)-(s4) from the seeds; returns kappa, lambda, alpha, alpha_hat lists."""
    with ctx.work():
        k1, k2, k3, l2, l3 = (ctx.number(v) for v in seeds)
        beta = lambda n: ctx.number(rc.beta(n))
        bhat = lambda k: ctx.number(rc.beta_hat(k))
        kappa = {1: k1, 2: k2, 3: k3}
        lam = {1: ctx.number(0), 2: l2, 3: l3}
        alpha = {0: beta(0) - k1}
        ahat = {}
        if N >= 1:
            alpha[1] = beta(1) + kappa[1] - kappa[2]
            ahat[0] = bhat(0) + kappa[1] * beta(0) + lam[1] - lam[2] - alpha[1] * kappa[1]
        if N >= 2:
            alpha[2] = beta(2) + kappa[2] - kappa[3]
            ahat[1] = bhat(1) + kappa[2] * beta(1) + lam[2] - lam[3] - alpha[2] * kappa[2]
        small = None if ctx.rational else ctx.number(Fraction(1, 1 << (ctx.prec // 2)))
        for n in range(3, N + 1):
            ln = lam[n]
            lnm1 = lam[n - 1]
            scale = max(ctx.number(1), abs(bhat(n - 3)))
            for name, value in (("lambda_%d" % (n - 1), lnm1), ("lambda_%d" % n, ln)):
                if value == 0 or (small is not None and abs(value) < small * scale):
                    raise RegularityBreakdown(f"{name} vanished in the forward scheme", index=n)
            ahat[n - 1] = ln * bhat(n - 3) / lnm1
            alpha[n] = (kappa[n] * bhat(n - 2) + ln * beta(n - 2) - ahat[n - 1] * kappa[n - 1]) / ln
            kappa[n + 1] = beta(n) + kappa[n] - alpha[n]
            lam[n + 1] = bhat(n - 1) + kappa[n] * beta(n - 1) + ln - alpha[n] * kappa[n] - ahat[n - 1]
        kappas = [kappa[n] for n in range(1, N + 1)]
        lambdas = [lam[n] for n in range(1, N + 1)]
        alphas = [alpha[n] for n in range(0, N + 1) if n in alpha][:N + 1]
        ahats = [ahat[n] for n in range(0, N) if n in ahat]
        return kappas, lambdas, alphas, ahats


def _bootstrap_seeds(rc, measure, div, ctx: Context, tol):
    gram = gram_matrix(rc, measure, div, 4, ctx, tol)
    c1 = direct_connection(rc, measure, div, 2, 1, ctx, tol, gram=gram)
    c2 = direct_connection(rc, measure, div, 2, 2, ctx, tol, gram=gram)
    c3 = direct_connection(rc, measure, div, 2, 3, ctx, tol, gram=gram)
    return (c1[0], c2[0], c3[0], c2[1], c3[1])


def _max_abs_gap(xs, ys, ctx):
    out = ctx.number(0)
    for a, b in zip(xs, ys):
        gap = abs(ctx.number(a) - ctx.number(b))
        if gap > out:
            out = gap
    return out


def _probe_amplification_bits(rc, measure, div, N, ctx, p0) -> int:
    """Bits of error amplification through the forward scheme.

    Seeds are perturbed additively by delta and delta/2^16; the responses
    must scale linearly (ratio close to 2^16) for the measurement to count.
    A saturated response means the probe precision itself is too low (both
    trajectories fall onto the same attracting pseudo-solution), so the
    probe escalates its own precision until linearity holds.
    """
    from mpmath import mp
    p_probe = p0
    cap = max(2048, 8 * p0)
    fallback = 64
    while p_probe <= cap:
        try:
            pctx = ctx.with_prec(p_probe)
            seeds = _bootstrap_seeds(rc, measure, div, pctx, Fraction(1, 1 << (p_probe - 16)))
            base = _forward_scheme(rc, seeds, N, pctx)
            with pctx.work():
                d1 = pctx.number(Fraction(1, 1 << (p_probe // 2)))
                d2 = d1 / (1 << 16)
                seeds1 = tuple(pctx.number(s) + d1 for s in seeds)
                seeds2 = tuple(pctx.number(s) + d2 for s in seeds)
            out1 = _forward_scheme(rc, seeds1, N, pctx)
            out2 = _forward_scheme(rc, seeds2, N, pctx)
            with pctx.work():
                g1 = max(_max_abs_gap(out1[0], base[0], pctx),
                         _max_abs_gap(out1[1], base[1], pctx))
                g2 = max(_max_abs_gap(out2[0], base[0], pctx),
                         _max_abs_gap(out2[1], base[1], pctx))
                if g1 == 0 and g2 == 0:
                    return 0
                if g2 > 0 and mp.isfinite(g1) and mp.isfinite(g2):
                    ratio = g1 / g2
                    if (1 << 13) <= ratio <= (1 << 19):
                        bits = mp.log(g1 / d1, 2)
                        if mp.isfinite(bits):
                            return max(0, int(mp.ceil(bits)))
        except OpconnectError:
            pass
        p_probe *= 2
    # could not reach the linear response regime; bail with a pessimistic
    # guess and let the certification loop escalate further
    return max(fallback, cap)


def general_quadratic_sequence(rc: RecurrenceCoefficients, measure: MeasureSpec,
                               div: DivisorSpec, N: int, ctx: Context = DEFAULT_CONTEXT,
                               tol=None) -> Tuple[ConnectionCoefficients, RecurrenceCoefficients]:
    """Order-2 connection and transformed recurrence for a quadratic divisor.

    Seeds come from per-degree Gram systems; the forward scheme runs at an
    internally chosen precision (see module docstring) and the returned
    values are certified to about 2^(-prec/3) of the calling context.
    """
    if div.kind != QUADRATIC:
        raise InvalidDivisor("general_quadratic_sequence needs a quadratic divisor")
    if ctx.rational:
        raise PrecisionExhausted("the quadrature bootstrap needs the float backend")
    if N < 1:
        raise InsufficientCoefficients("need N >= 1")
    check_divisor_validity(measure, div, ctx)

    target_bits = max(ctx.prec // 3, 48)
    p0 = max(ctx.prec, 96)

    def run(prec: int):
        # quadrature tolerance 2^16 above roundoff keeps the ladder satisfiable
        rctx = ctx.with_prec(prec)
        qtol = Fraction(1, 1 << (prec - 16))
        seeds = _bootstrap_seeds(rc, measure, div, rctx, qtol)
        return _forward_scheme(rc, seeds, N, rctx)

    amp_bits = _probe_amplification_bits(rc, measure, div, N, ctx, p0)
    last_error: Optional[OpconnectError] = None
    for attempt in range(3):
        p_work = max(ctx.prec, target_bits + amp_bits + 48)
        try:
            lo = run(p_work)
            hi = run(p_work + 64)
        except OpconnectError as exc:
            last_error = exc
            amp_bits += 96
            continue
        cctx = ctx.with_prec(p_work + 64)
        with cctx.work():
            vmax = max([abs(cctx.number(v)) for v in hi[0] + hi[1]] + [cctx.number(1)])
            gap = max(_max_abs_gap(lo[0], hi[0], cctx), _max_abs_gap(lo[1], hi[1], cctx))
            certified = gap <= vmax * cctx.number(Fraction(1, 1 << target_bits))
        if certified:
            kappas, lambdas, alphas, ahats = hi
            with ctx.work():
                kappas = [ctx.number(v) for v in kappas]
                lambdas = [ctx.number(v) for v in lambdas]
                alphas = [ctx.number(v) for v in alphas]
                ahats = [ctx.number(v) for v in ahats]
            for idx, value in enumerate(ahats):
                if not value > 0:
                    raise PositivityViolation(f"alpha_hat[{idx}] = {value} <= 0")
            cc = ConnectionCoefficients.order2(kappas, lambdas)
            rc_new = RecurrenceCoefficients.from_arrays(alphas, ahats, name=f"divided({rc.name})")
            return cc, rc_new
        amp_bits += 96
    if last_error is not None:
        raise last_error
    raise PrecisionExhausted(
        f"forward scheme would not certify after escalation (amplification ~2^{amp_bits})")


def _exact_sqrt(value: Fraction) -> Optional[Fraction]:
    num, den = value.numerator, value.denominator
    rn = math.isqrt(num)
    rd = math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _support_hull(measure: MeasureSpec, ctx: Context):
    if measure.continuous:
        return measure.support
    lo, _ = measure.atom(0)
    if measure.atom_count is None:
        return (lo, None)
    hi, _ = measure.atom(measure.atom_count - 1)
    return (lo, hi)


def compose_linear_factors(rc: RecurrenceCoefficients, measure: MeasureSpec, div: DivisorSpec,
                           N: int, ctx: Context = DEFAULT_CONTEXT, tol=None
                           ) -> Tuple[ConnectionCoefficients, RecurrenceCoefficients]:
    """Quadratic transform by running the linear transform once per real factor.

    x^2 + Dx + E must split as (x + r1)(x + r2) with real roots, each factor
    sign-constant on the support (roots at a boundary are fine).  The two
    order-1 connections compose into kappa_n = kappa'_n + kappa''_n,
    lambda_n = kappa''_n kappa'_{n-1}, expressed in the original basis.
    """
    if div.kind != QUADRATIC:
        raise InvalidDivisor("compose_linear_factors needs a quadratic divisor")
    if N < 1:
        raise InsufficientCoefficients("need N >= 1")
    if tol is None:
        tol = default_quadrature_tol(ctx)
    with ctx.work():
        D = ctx.number(div.D)
        E = ctx.number(div.E)
        disc = D * D - 4 * E
        if disc < 0:
            raise FactorizationUnavailable("quadratic divisor has complex roots")
        if ctx.rational:
            root = _exact_sqrt(disc)
            if root is None:
                raise FactorizationUnavailable(
                    "discriminant is not a perfect square; factor roots are irrational")
        else:
            root = ctx.sqrt(disc)
        r1 = (D + root) / 2
        r2 = (D - root) / 2
        lo, hi = _support_hull(measure, ctx)
        for r in (r1, r2):
            inside_low = lo is None or -r > ctx.number(lo)
            inside_high = hi is None or -r < ctx.number(hi)
            if inside_low and inside_high:
                raise FactorizationUnavailable(
                    f"factor root x = {-r} lies inside the support; factor changes sign")

    C1 = normalization_constant(rc, measure, r1, ctx, tol)
    div1 = DivisorSpec.linear(r1, C1)
    cc1 = kappa_sequence(rc, div1, N + 1, ctx)
    rc1 = transformed_recurrence(rc, cc1, ctx)

    # plain arithmetic on pre-converted constants: the integrand must not
    # re-round the quadrature nodes at a lower precision
    with ctx.work():
        c1v = ctx.number(C1)
        r1v = ctx.number(r1)
        r2v = ctx.number(r2)
    inv_c2 = measure_integral(rc, measure, lambda x: c1v / ((x + r1v) * (x + r2v)), ctx, tol)
    with ctx.work():
        if inv_c2 == 0:
            raise InvalidDivisor("second-stage normalization integral vanished")
        C2 = 1 / inv_c2
    div2 = DivisorSpec.linear(r2, C2)
    cc2 = kappa_sequence(rc1, div2, N, ctx)
    rc_new = transformed_recurrence(rc1, cc2, ctx)

    with ctx.work():
        if div.resolved:
            overall = ctx.number(C1) * ctx.number(C2)
            given = ctx.number(div.C)
            slack = ctx.number(Fraction(1, 10 ** 8))
            if abs(overall - given) > slack * max(ctx.number(1), abs(given)):
                warnings.warn(f"divisor C={given} differs from staged normalization {overall}",
                              stacklevel=2)
        kappas = []
        lambdas = [ctx.number(0)]
        for n in range(1, N + 1):
            kappas.append(ctx.number(cc1.kappa(n)) + ctx.number(cc2.kappa(n)))
            if n >= 2:
                lambdas.append(ctx.number(cc2.kappa(n)) * ctx.number(cc1.kappa(n - 1)))
    return ConnectionCoefficients.order2(kappas, lambdas), rc_new
