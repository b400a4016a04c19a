"""Verification battery: orthogonality residuals, invariants of the kappa
sequence, residuals of the coupled quadratic identities, oracle agreement.

Everything here measures; nothing mutates.  Checks return plain numbers so
callers (CLI, tests) decide what tolerance means failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .connection import ConnectionCoefficients, DivisorSpec
from .errors import InsufficientCoefficients
from .measures import MeasureSpec
from .numerics import Context, DEFAULT_CONTEXT, Scalar
from .oracle import direct_connection, gram_matrix, reciprocal_pairing
from .quadrature import default_quadrature_tol
from .recurrence import RecurrenceCoefficients, eval_monic_sequence


def connected_values(rc: RecurrenceCoefficients, cc: ConnectionCoefficients, upto: int,
                     x, ctx: Context = DEFAULT_CONTEXT) -> List[Scalar]:
    """[a_0(x), ..., a_upto(x)] assembled from one b-basis evaluation."""
    with ctx.work():
        b = eval_monic_sequence(rc, upto, x, ctx)
        out = [ctx.number(1)]
        for n in range(1, upto + 1):
            v = b[n] + ctx.number(cc.kappa(n)) * b[n - 1]
            if cc.order == 2 and n >= 2:
                v += ctx.number(cc.lam(n)) * b[n - 2]
            out.append(v)
        return out


def orthogonality_residuals(rc: RecurrenceCoefficients, measure: MeasureSpec,
                            div: DivisorSpec, cc: ConnectionCoefficients, N: int,
                            ctx: Context = DEFAULT_CONTEXT, tol=None) -> Scalar:
    """max over m != n <= N of |<a_m, a_n>_dA| / sqrt(<a_m,a_m><a_n,a_n>).

    The pairing integrates against the divisor-modified measure by the same
    adaptive machinery the oracle uses.
    """
    if tol is None:
        tol = default_quadrature_tol(ctx)
    pairs = [(i, j) for i in range(N + 1) for j in range(i, N + 1)]

    def values_fn(x):
        a = connected_values(rc, cc, N, x, ctx)
        return [a[i] * a[j] for i, j in pairs]

    # the divisor constant cancels in the normalized residual, so the
    # unnormalized pairing suffices
    flat = reciprocal_pairing(rc, measure, div, values_fn, len(pairs), 2 * N, ctx, tol)
    with ctx.work():
        G = [[None] * (N + 1) for _ in range(N + 1)]
        for (i, j), value in zip(pairs, flat):
            G[i][j] = value
            G[j][i] = value
        worst = ctx.number(0)
        for i in range(N + 1):
            for j in range(i + 1, N + 1):
                denom = ctx.sqrt(abs(G[i][i] * G[j][j]))
                if denom == 0:
                    raise InsufficientCoefficients("vanishing norm in orthogonality check")
                value = abs(G[i][j]) / denom
                if value > worst:
                    worst = value
        return worst


def conserved_quantity_residual(rc: RecurrenceCoefficients, div: DivisorSpec,
                                cc: ConnectionCoefficients,
                                ctx: Context = DEFAULT_CONTEXT) -> Scalar:
    """max over n of the scaled residual of
    kappa_n + beta_hat_{n-2}/kappa_{n-1} - beta_{n-1} = D."""
    with ctx.work():
        D = ctx.number(div.D)
        worst = ctx.number(0)
        for n in range(2, cc.max_index + 1):
            prev = ctx.number(cc.kappa(n - 1))
            if prev == 0:
                raise InsufficientCoefficients(f"kappa_{n-1} is zero; residual undefined")
            quotient = ctx.number(rc.beta_hat(n - 2)) / prev
            bm = ctx.number(rc.beta(n - 1))
            residual = abs(ctx.number(cc.kappa(n)) + quotient - bm - D)
            scale = max(ctx.number(1), abs(D), abs(quotient), abs(bm))
            value = residual / scale
            if value > worst:
                worst = value
        return worst


def sign_coherence(cc: ConnectionCoefficients, ctx: Context = DEFAULT_CONTEXT
                   ) -> Tuple[bool, Optional[int]]:
    """All kappa strictly one sign?  Returns (ok, first offending index)."""
    with ctx.work():
        sign = None
        for n in range(1, cc.max_index + 1):
            v = ctx.number(cc.kappa(n))
            s = 1 if v > 0 else (-1 if v < 0 else 0)
            if s == 0:
                return False, n
            if sign is None:
                sign = s
            elif s != sign:
                return False, n
        return True, None


def kappa_bounds_ok(rc: RecurrenceCoefficients, div: DivisorSpec, cc: ConnectionCoefficients,
                    ctx: Context = DEFAULT_CONTEXT) -> Tuple[bool, Optional[int]]:
    """Each kappa_n must sit between 0 and beta_{n-1} + D (inclusive, with a
    roundoff allowance in the float backend)."""
    with ctx.work():
        slack = ctx.number(0) if ctx.rational else ctx.number(Fraction(1, 1 << (ctx.prec // 2)))
        D = ctx.number(div.D)
        for n in range(1, cc.max_index + 1):
            edge = ctx.number(rc.beta(n - 1)) + D
            v = ctx.number(cc.kappa(n))
            lo, hi = (edge, ctx.number(0)) if edge <= 0 else (ctx.number(0), edge)
            allowance = slack * max(ctx.number(1), abs(edge))
            if not (lo - allowance <= v <= hi + allowance):
                return False, n
        return True, None


def s_system_residuals(rc: RecurrenceCoefficients, cc: ConnectionCoefficients,
                       rc_new: RecurrenceCoefficients,
                       ctx: Context = DEFAULT_CONTEXT) -> Scalar:
    """max scaled residual of the four coupled identities over all indices
    where every term is available."""
    if cc.order != 2:
        raise InsufficientCoefficients("s-residuals are defined for order-2 connections")
    n_max = cc.max_index - 1
    if rc_new.beta_count is not None:
        n_max = min(n_max, rc_new.beta_count - 1)
    if rc_new.beta_hat_count is not None:
        n_max = min(n_max, rc_new.beta_hat_count)
    with ctx.work():
        worst = ctx.number(0)

        def note(residual, *terms):
            nonlocal worst
            scale = max([ctx.number(1)] + [abs(t) for t in terms])
            value = abs(residual) / scale
            if value > worst:
                worst = value

        for n in range(1, n_max + 1):
            kn, kn1 = ctx.number(cc.kappa(n)), ctx.number(cc.kappa(n + 1))
            ln, ln1 = ctx.number(cc.lam(n)), ctx.number(cc.lam(n + 1))
            an = ctx.number(rc_new.beta(n))
            bn = ctx.number(rc.beta(n))
            ah = ctx.number(rc_new.beta_hat(n - 1))
            bh = ctx.number(rc.beta_hat(n - 1))
            bnm1 = ctx.number(rc.beta(n - 1))
            note(kn1 + an - bn - kn, kn1, an, bn, kn)
            note(ln1 + an * kn + ah - bh - kn * bnm1 - ln, ln1, an * kn, ah, bh, kn * bnm1, ln)
            if n >= 2:
                knm1 = ctx.number(cc.kappa(n - 1))
                bh2 = ctx.number(rc.beta_hat(n - 2))
                bnm2 = ctx.number(rc.beta(n - 2))
                note(an * ln + ah * knm1 - kn * bh2 - ln * bnm2,
                     an * ln, ah * knm1, kn * bh2, ln * bnm2)
            if n >= 3:
                lnm1 = ctx.number(cc.lam(n - 1))
                bh3 = ctx.number(rc.beta_hat(n - 3))
                note(ah * lnm1 - ln * bh3, ah * lnm1, ln * bh3)
        return worst


def oracle_agreement(rc: RecurrenceCoefficients, measure: MeasureSpec, div: DivisorSpec,
                     cc: ConnectionCoefficients, upto: int,
                     ctx: Context = DEFAULT_CONTEXT, tol=None) -> Scalar:
    """max relative gap between recursion-produced coefficients and the
    Gram-system oracle for n <= upto."""
    gram = gram_matrix(rc, measure, div, upto + 1, ctx, tol)
    with ctx.work():
        worst = ctx.number(0)
        for n in range(1, upto + 1):
            values = direct_connection(rc, measure, div, div.degree, n, ctx, tol, gram=gram)
            expected = [ctx.number(cc.kappa(n))]
            if div.degree == 2 and n >= 2:
                expected.append(ctx.number(cc.lam(n)))
            for got, want in zip(values, expected):
                scale = max(ctx.number(1), abs(want))
                value = abs(got - want) / scale
                if value > worst:
                    worst = value
        return worst


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    checks: Tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]
