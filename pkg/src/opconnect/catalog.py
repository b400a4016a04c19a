"""Closed-form recurrences, measures and reference connection coefficients
for the worked families: Jacobi (with Legendre and Chebyshev-U as named
special cases), Charlier, and the semicircle law.

All recurrence coefficients are rational in the family parameters, so the
generators emit exact fractions regardless of backend; consumers convert at
their own working precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import mpmath
from mpmath import mp

from .connection import AUTO, DivisorSpec, LINEAR, QUADRATIC
from .errors import BackendUnsupported, InvalidFamily, NoClosedForm
from .measures import MeasureSpec, continuous_measure, discrete_measure
from .numerics import Context, DEFAULT_CONTEXT, Scalar, _mpf_to_fraction
from .recurrence import RecurrenceCoefficients

JACOBI = "jacobi"
LEGENDRE = "legendre"
CHEBYSHEV_U = "chebyshev_u"
CHARLIER = "charlier"
SEMICIRCLE = "semicircle"


def _fraction(value, what: str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str, float)):
        return Fraction(value)
    if isinstance(value, mpmath.mpf):
        return _mpf_to_fraction(value)
    raise InvalidFamily(f"{what} must be a rational number, got {type(value).__name__}")


@dataclass(frozen=True)
class FamilySpec:
    """A named measure/polynomial family with exact rational parameters."""

    name: str
    params: Tuple[Fraction, ...] = ()

    @classmethod
    def jacobi(cls, alpha, gamma) -> "FamilySpec":
        alpha = _fraction(alpha, "alpha")
        gamma = _fraction(gamma, "gamma")
        if alpha <= -1 or gamma <= -1:
            raise InvalidFamily("jacobi needs alpha > -1 and gamma > -1")
        return cls(JACOBI, (alpha, gamma))

    @classmethod
    def legendre(cls) -> "FamilySpec":
        return cls(LEGENDRE)

    @classmethod
    def chebyshev_u(cls) -> "FamilySpec":
        return cls(CHEBYSHEV_U)

    @classmethod
    def charlier(cls, lam) -> "FamilySpec":
        lam = _fraction(lam, "lambda")
        if lam <= 0:
            raise InvalidFamily("charlier needs lambda > 0")
        return cls(CHARLIER, (lam,))

    @classmethod
    def semicircle(cls) -> "FamilySpec":
        return cls(SEMICIRCLE)

    @property
    def jacobi_params(self) -> Tuple[Fraction, Fraction]:
        """(alpha, gamma), mapping the named special cases onto Jacobi."""
        if self.name == JACOBI:
            return self.params
        if self.name == LEGENDRE:
            return (Fraction(0), Fraction(0))
        if self.name == CHEBYSHEV_U:
            return (Fraction(1, 2), Fraction(1, 2))
        raise InvalidFamily(f"{self.name} is not a Jacobi-type family")

    def __str__(self):
        if self.params:
            return f"{self.name}({', '.join(str(p) for p in self.params)})"
        return self.name


def _jacobi_beta(alpha: Fraction, gamma: Fraction, n: int) -> Fraction:
    # The generic formula has a removable 0/0 at n=0 when alpha+gamma=0.
    if n == 0:
        return (gamma - alpha) / (alpha + gamma + 2)
    return (gamma * gamma - alpha * alpha) / ((2 * n + alpha + gamma + 2) * (alpha + gamma + 2 * n))


def _jacobi_beta_hat(alpha: Fraction, gamma: Fraction, k: int) -> Fraction:
    n = k + 1
    if n == 1:
        # cancel the (alpha+gamma+1) factor, removable at alpha+gamma=-1
        return 4 * (1 + alpha) * (1 + gamma) / ((alpha + gamma + 2) ** 2 * (alpha + gamma + 3))
    num = 4 * n * (alpha + gamma + n) * (n + alpha) * (n + gamma)
    den = (alpha + gamma + 2 * n - 1) * (2 * n + alpha + gamma) ** 2 * (alpha + gamma + 2 * n + 1)
    return Fraction(num) / den


def family_recurrence(f: FamilySpec) -> RecurrenceCoefficients:
    """Monic three-term recurrence generator for the named family."""
    if f.name in (JACOBI, LEGENDRE, CHEBYSHEV_U):
        alpha, gamma = f.jacobi_params
        if f.name == LEGENDRE:
            return RecurrenceCoefficients(
                lambda n: Fraction(0),
                lambda k: Fraction((k + 1) ** 2, 4 * (k + 1) ** 2 - 1),
                name=str(f))
        if f.name == CHEBYSHEV_U:
            return RecurrenceCoefficients(
                lambda n: Fraction(0), lambda k: Fraction(1, 4), name=str(f))
        return RecurrenceCoefficients(
            lambda n: _jacobi_beta(alpha, gamma, n),
            lambda k: _jacobi_beta_hat(alpha, gamma, k),
            name=str(f))
    if f.name == CHARLIER:
        lam = f.params[0]
        return RecurrenceCoefficients(
            lambda n: n + lam, lambda k: (k + 1) * lam, name=str(f))
    if f.name == SEMICIRCLE:
        return RecurrenceCoefficients(
            lambda n: Fraction(0), lambda k: Fraction(1), name=str(f))
    raise InvalidFamily(f"unknown family {f.name!r}")


def _poisson_tail_sum(lam, start: int):
    """sum_{j>=start} lam^j / j! at the active precision (positive terms)."""
    term = mp.power(lam, start) / mp.factorial(start)
    total = term
    j = start
    cutoff = mp.mpf(2) ** (-mp.prec - 10)
    while term > total * cutoff:
        j += 1
        term *= lam / j
        total += term
    return total


def family_measure(f: FamilySpec) -> MeasureSpec:
    """MeasureSpec (density or atoms) with the correct normalization."""
    if f.name in (JACOBI, LEGENDRE, CHEBYSHEV_U):
        alpha, gamma = f.jacobi_params
        if alpha == 0 and gamma == 0:
            return continuous_measure(lambda x: mp.mpf(1) / 2, -1, 1, label=str(f))
        norm_cache = {}
        def density(x, _a=alpha, _g=gamma, _cache=norm_cache):
            const = _cache.get(mp.prec)
            if const is None:
                a = mp.mpf(_a.numerator) / _a.denominator
                g = mp.mpf(_g.numerator) / _g.denominator
                const = mp.gamma(a + g + 2) / (mp.power(2, a + g + 1) * mp.gamma(g + 1) * mp.gamma(a + 1))
                _cache[mp.prec] = const
            a = mp.mpf(_a.numerator) / _a.denominator
            g = mp.mpf(_g.numerator) / _g.denominator
            return const * mp.power(1 - x, a) * mp.power(1 + x, g)
        return continuous_measure(density, -1, 1, label=str(f))
    if f.name == SEMICIRCLE:
        return continuous_measure(lambda x: mp.sqrt(4 - x * x) / (2 * mp.pi), -2, 2, label=str(f))
    if f.name == CHARLIER:
        lam = f.params[0]
        def atom(k, _l=lam):
            lv = mp.mpf(_l.numerator) / _l.denominator
            return mp.mpf(k), mp.exp(-lv) * mp.power(lv, k) / mp.factorial(k)
        def tail_bound(K, _l=lam):
            lv = mp.mpf(_l.numerator) / _l.denominator
            if K + 2 <= lv:
                return mp.inf
            _, w_next = atom(K + 1)
            return w_next / (1 - lv / (K + 2))
        return discrete_measure(atom, tail_bound, support=(0, None), label=str(f))
    raise InvalidFamily(f"unknown family {f.name!r}")


def _as_fraction_or_none(value):
    try:
        return _fraction(value, "divisor parameter")
    except (InvalidFamily, BackendUnsupported, ValueError):
        return None


def _is_jacobi_lowering_divisor(div: DivisorSpec) -> bool:
    return div.kind == LINEAR and _as_fraction_or_none(div.D) == -1


def _is_symmetric_jacobi_divisor(div: DivisorSpec) -> bool:
    return (div.kind == QUADRATIC and _as_fraction_or_none(div.D) == 0
            and _as_fraction_or_none(div.E) == -1)


def _kesten_mckay_params(div: DivisorSpec):
    if div.kind == QUADRATIC and div.meta and div.meta.get("preset") == "kesten-mckay":
        return div.meta["rho"], div.meta["y"]
    return None


def reference_normalization(f: FamilySpec, div: DivisorSpec, ctx: Context = DEFAULT_CONTEXT) -> Scalar:
    """Closed-form normalization constant C for catalog (family, divisor) pairs."""
    if f.name in (JACOBI, CHEBYSHEV_U) and _is_jacobi_lowering_divisor(div):
        alpha, gamma = f.jacobi_params
        if alpha <= 0:
            raise NoClosedForm("dividing by (x-1) needs alpha > 0")
        return ctx.number(Fraction(-2) * alpha / (alpha + gamma + 1))
    if f.name == CHARLIER and div.kind == LINEAR and _as_fraction_or_none(div.D) == 1:
        lam = f.params[0]
        if ctx.rational:
            raise BackendUnsupported("charlier normalization needs exp")
        with ctx.work():
            lv = ctx.number(lam)
            return lv * mp.exp(lv) / (mp.exp(lv) - 1)
    if f.name in (JACOBI, CHEBYSHEV_U) and _is_symmetric_jacobi_divisor(div):
        alpha, gamma = f.jacobi_params
        if alpha != gamma or alpha <= 0:
            raise NoClosedForm("symmetric quadratic divisor needs jacobi(a, a) with a > 0")
        return ctx.number(Fraction(-2) * alpha / (2 * alpha + 1))
    km = _kesten_mckay_params(div)
    if f.name == SEMICIRCLE and km is not None:
        return ctx.number(div.C)
    raise NoClosedForm(f"no closed-form normalization for ({f}, {div.kind})")


def reference_kappa(f: FamilySpec, div: DivisorSpec, n: int, ctx: Context = DEFAULT_CONTEXT) -> Scalar:
    """Closed-form kappa_n for the catalog pairs that have one."""
    if n < 1:
        raise NoClosedForm("kappa is indexed from 1")
    if f.name in (JACOBI, CHEBYSHEV_U) and _is_jacobi_lowering_divisor(div):
        alpha, gamma = f.jacobi_params
        if alpha <= 0:
            raise NoClosedForm("dividing by (x-1) needs alpha > 0")
        return ctx.number(Fraction(-2 * n) * (n + gamma)
                          / ((alpha + gamma + 2 * n) * (alpha + gamma + 2 * n - 1)))
    if f.name == CHARLIER and div.kind == LINEAR and _as_fraction_or_none(div.D) == 1:
        if ctx.rational:
            raise BackendUnsupported("charlier kappa needs exp")
        lam = f.params[0]
        with mp.workprec(ctx.prec + 40):
            lv = mp.mpf(lam.numerator) / lam.denominator
            val = n * _poisson_tail_sum(lv, n + 1) / _poisson_tail_sum(lv, n)
        return ctx.number(val)
    km = _kesten_mckay_params(div)
    if f.name == SEMICIRCLE and km is not None:
        rho, y = km
        return ctx.number(-rho * y)
    raise NoClosedForm(f"no closed-form kappa for ({f}, {div.kind})")


def reference_lambda(f: FamilySpec, div: DivisorSpec, n: int, ctx: Context = DEFAULT_CONTEXT) -> Scalar:
    """Closed-form lambda_n for the catalog's quadratic pairs."""
    if n < 1:
        raise NoClosedForm("lambda is indexed from 1")
    if f.name in (JACOBI, CHEBYSHEV_U) and _is_symmetric_jacobi_divisor(div):
        alpha, gamma = f.jacobi_params
        if alpha != gamma or alpha <= 0:
            raise NoClosedForm("symmetric quadratic divisor needs jacobi(a, a) with a > 0")
        if n == 1:
            return ctx.number(0)
        a = alpha
        return ctx.number(Fraction(-n * (n - 1)) / ((2 * a + 2 * n - 1) * (2 * a + 2 * n - 3)))
    km = _kesten_mckay_params(div)
    if f.name == SEMICIRCLE and km is not None:
        rho, _ = km
        return ctx.number(0) if n == 1 else ctx.number(rho * rho)
    raise NoClosedForm(f"no closed-form lambda for ({f}, {div.kind})")
