from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, workprec

import opconnect as oc
from opconnect import (ConnectionCoefficients, DivisorSpec, QuadratureDivergent,
                       evaluate_partial_sum, fourier_coefficients,
                       inversion_coefficients, kappa_sequence, parseval_residual)

from conftest import CTX, RCTX, rel_err


def test_inversion_small_cases():
    cc = ConnectionCoefficients.order1([Fraction(-1, 3), Fraction(-2, 5)])
    assert inversion_coefficients(cc, 0, RCTX) == [1]
    assert inversion_coefficients(cc, 1, RCTX) == [1, Fraction(1, 3)]
    # c_2 = (+1) * kappa_1 * kappa_2 by the alternating-product formula
    assert inversion_coefficients(cc, 2, RCTX) == [1, Fraction(2, 5), Fraction(2, 15)]


@given(kappas=st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=8)
                       .filter(lambda v: v != 0), min_size=2, max_size=8),
       x=st.fractions(min_value=-2, max_value=2, max_denominator=12))
@settings(max_examples=30, deadline=None)
def test_inversion_round_trip(chebyshev_u, kappas, x):
    # b_n must be reproduced from the a-values for any kappa sequence
    cc = ConnectionCoefficients.order1(kappas)
    n = len(kappas)
    b = oc.eval_monic_sequence(chebyshev_u.rc, n, x, RCTX)
    a = [b[0]] + [b[m] + kappas[m - 1] * b[m - 1] for m in range(1, n + 1)]
    coeffs = inversion_coefficients(cc, n, RCTX)
    assert sum(c * a[n - j] for j, c in enumerate(coeffs)) == b[n]


def _pochhammer(a, n):
    out = Fraction(1)
    for k in range(n):
        out *= a + k
    return out


@pytest.mark.parametrize("alpha,gamma", [(1, 0), (3, 0), (Fraction(5, 2), Fraction(1, 2))])
def test_fourier_jacobi_closed_form(alpha, gamma):
    # f_n = (alpha+gamma+2)_{2n} / (2^n (alpha+1)_n (alpha+gamma+1)_n),
    # the running-product value (positive, since the ratios are negative and
    # the sign alternation cancels them)
    f = oc.FamilySpec.jacobi(alpha, gamma)
    rc = oc.family_recurrence(f)
    a, g = Fraction(alpha), Fraction(gamma)
    C = Fraction(-2) * a / (a + g + 1)
    cc = kappa_sequence(rc, DivisorSpec.linear(-1, C), 12, RCTX)
    coeffs = fourier_coefficients(cc, rc, 12, RCTX)
    for n in range(0, 13):
        want = (_pochhammer(a + g + 2, 2 * n)
                / (Fraction(2) ** n * _pochhammer(a + 1, n) * _pochhammer(a + g + 1, n)))
        assert coeffs[n] == want


def test_fourier_charlier_tail_identity(charlier1):
    # prod kappa_k / beta_hat_{k-1} = (sum_{k>=n+1} lambda^{k-n}/k!) / (e^lambda - 1);
    # checkable against the series expansion of the ratio: summing the f_n c_n(0)
    # series reproduces C at x = 0, which pins the normalization
    ctx = oc.Context(prec=320)
    C = oc.reference_normalization(charlier1.family, DivisorSpec.linear(1), ctx)
    cc = kappa_sequence(charlier1.rc, DivisorSpec.linear(1, C), 40, ctx)
    coeffs = fourier_coefficients(cc, charlier1.rc, 40, ctx)
    with workprec(400):
        for n in range(1, 13):
            tail = sum(mp.mpf(1) / mp.factorial(k) for k in range(n + 1, n + 160))
            want = tail / (mp.e - 1)
            got = abs(coeffs[n])
            assert abs(got - want) < abs(want) * mp.mpf(1) / 10 ** 40
        # series value at x = 0: sum f_n c_n(0) = C/(0+1), with c_n(0;1) = (-1)^n
        series = sum(coeffs[n] * (-1) ** n for n in range(41))
        assert abs(series - C) < mp.mpf(1) / 10 ** 30


def test_partial_sum_degenerate(legendre):
    coeffs = [Fraction(1)]
    assert evaluate_partial_sum(legendre.rc, coeffs, 0, Fraction(1, 2), RCTX) == 1


def test_partial_sum_converges_to_ratio():
    # jacobi(3, 0), D = -1: partial sums approach C/(x-1) = 15/7 at x = 0.3
    f = oc.FamilySpec.jacobi(3, 0)
    rc = oc.family_recurrence(f)
    cc = kappa_sequence(rc, DivisorSpec.linear(-1, Fraction(-3, 2)), 400, CTX)
    coeffs = fourier_coefficients(cc, rc, 400, CTX)
    with workprec(256):
        target = mp.mpf(15) / 7
        errors = []
        for N in (25, 100, 400):
            s = evaluate_partial_sum(rc, coeffs, N, Fraction(3, 10), CTX)
            errors.append(abs(s - target))
        assert errors[0] > errors[1] > errors[2]


def test_parseval_legendre_shifted(legendre):
    # smooth divisor (root off support): quadrature RHS good far beyond the
    # 1e-10 bound slack.  N stays below ~25 because the forward kappa
    # recursion for this divisor tracks a minimal solution and loses digits
    # geometrically; the expansion terms would blow up past the drift point.
    C = oc.normalization_constant(legendre.rc, legendre.measure, -3, CTX,
                                  tol=Fraction(1, 10 ** 16))
    div = DivisorSpec.linear(-3, C)
    cc = kappa_sequence(legendre.rc, div, 16, CTX)
    report = parseval_residual(legendre.rc, cc, div, legendre.measure, 16, CTX,
                               tol=Fraction(1, 10 ** 14))
    with workprec(256):
        want_rhs = 1 / (2 * mp.log(2) ** 2)
        assert abs(report.rhs - want_rhs) < mp.mpf(1) / 10 ** 12
        sums = report.partial_sums
        assert all(sums[i + 1] >= sums[i] for i in range(len(sums) - 1))
        assert all(s <= report.rhs + mp.mpf(1) / 10 ** 10 for s in sums)
        assert report.residual < mp.mpf(1) / 10 ** 12  # geometric decay of the terms


def test_parseval_residual_decreases(legendre):
    C = oc.normalization_constant(legendre.rc, legendre.measure, -3, CTX,
                                  tol=Fraction(1, 10 ** 16))
    div = DivisorSpec.linear(-3, C)
    cc = kappa_sequence(legendre.rc, div, 12, CTX)
    residuals = [parseval_residual(legendre.rc, cc, div, legendre.measure, N, CTX,
                                   tol=Fraction(1, 10 ** 14)).residual
                 for N in (2, 5, 9)]
    assert float(residuals[0]) > float(residuals[1]) > float(residuals[2])


def test_parseval_divergent_case():
    f = oc.FamilySpec.jacobi(Fraction(1, 2), 0)
    rc = oc.family_recurrence(f)
    measure = oc.family_measure(f)
    div = DivisorSpec.linear(-1, Fraction(-1, 2))
    cc = kappa_sequence(rc, div, 10, CTX)
    with pytest.raises(QuadratureDivergent):
        parseval_residual(rc, cc, div, measure, 10, CTX, tol=Fraction(1, 10 ** 8))


def test_parseval_semicircle_finite(semicircle):
    C = oc.normalization_constant(semicircle.rc, semicircle.measure, -3, CTX)
    div = DivisorSpec.linear(-3, C)
    cc = kappa_sequence(semicircle.rc, div, 30, CTX)
    report = parseval_residual(semicircle.rc, cc, div, semicircle.measure, 30, CTX)
    assert mp.isfinite(report.rhs)


def test_summability_monitor_reports_convergent():
    f = oc.FamilySpec.jacobi(3, 0)
    rc = oc.family_recurrence(f)
    measure = oc.family_measure(f)
    div = DivisorSpec.linear(-1, Fraction(-3, 2))
    cc = kappa_sequence(rc, div, 200, CTX)
    report = parseval_residual(rc, cc, div, measure, 200, CTX, tol=Fraction(1, 10 ** 7))
    assert report.summability_convergent is True
    assert len(report.summability_partial_sums) == 200
