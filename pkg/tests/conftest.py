"""Shared fixtures and small exact helpers for the test suite.

Family bundles are session-scoped so Gauss-rule caches accumulate across
tests (rules are cached per recurrence object, node count and precision).
"""

from dataclasses import dataclass
from fractions import Fraction

import pytest
from mpmath import mp, workprec

import opconnect as oc

CTX = oc.Context(prec=128)
HI = oc.Context(prec=256)
RCTX = oc.RATIONAL_CONTEXT


@dataclass
class Bundle:
    family: oc.FamilySpec
    rc: oc.RecurrenceCoefficients
    measure: oc.MeasureSpec


def make_bundle(family: oc.FamilySpec) -> Bundle:
    return Bundle(family=family, rc=oc.family_recurrence(family),
                  measure=oc.family_measure(family))


@pytest.fixture(scope="session")
def ctx():
    return CTX


@pytest.fixture(scope="session")
def rctx():
    return RCTX


@pytest.fixture(scope="session")
def legendre():
    return make_bundle(oc.FamilySpec.legendre())


@pytest.fixture(scope="session")
def chebyshev_u():
    return make_bundle(oc.FamilySpec.chebyshev_u())


@pytest.fixture(scope="session")
def semicircle():
    return make_bundle(oc.FamilySpec.semicircle())


@pytest.fixture(scope="session")
def jacobi10():
    return make_bundle(oc.FamilySpec.jacobi(1, 0))


@pytest.fixture(scope="session")
def jacobi11():
    return make_bundle(oc.FamilySpec.jacobi(1, 1))


@pytest.fixture(scope="session")
def charlier1():
    return make_bundle(oc.FamilySpec.charlier(1))


def rel_err(got, want, prec=256):
    """|got - want| / max(1e-300, |want|) evaluated at elevated precision."""
    with workprec(prec):
        g = mp.mpf(got.numerator) / got.denominator if isinstance(got, Fraction) else mp.mpf(got)
        w = mp.mpf(want.numerator) / want.denominator if isinstance(want, Fraction) else mp.mpf(want)
        denom = abs(w) if w != 0 else mp.mpf("1e-300")
        return float(abs(g - w) / denom)


def abs_err(got, want, prec=256):
    with workprec(prec):
        g = mp.mpf(got.numerator) / got.denominator if isinstance(got, Fraction) else mp.mpf(got)
        w = mp.mpf(want.numerator) / want.denominator if isinstance(want, Fraction) else mp.mpf(want)
        return float(abs(g - w))


def exact_poly_fit(points):
    """Coefficients (ascending) of the polynomial through exact points.

    Plain Gaussian elimination on the Vandermonde system over Fractions;
    the independent route used to read coefficients off evaluated values.
    """
    n = len(points)
    rows = [[Fraction(x) ** k for k in range(n)] + [Fraction(y)] for x, y in points]
    for col in range(n):
        pivot = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col] / rows[col][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [rows[k][n] / rows[k][k] for k in range(n)]


def monic_coefficients(rc, n, ctx=RCTX):
    """Exact ascending coefficients of b_n by evaluation at 0..n and fitting."""
    xs = [Fraction(j) for j in range(n + 1)]
    points = [(x, oc.eval_monic_sequence(rc, n, x, ctx)[n]) for x in xs]
    return exact_poly_fit(points)
