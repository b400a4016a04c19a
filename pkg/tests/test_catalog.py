from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, workprec

import opconnect as oc
from opconnect import (DivisorSpec, FamilySpec, InvalidFamily, NoClosedForm,
                       family_measure, family_recurrence, gauss_rule, integrate,
                       reference_kappa, reference_lambda, reference_normalization)

from conftest import CTX, RCTX, rel_err


def test_jacobi_recurrence_values(jacobi10):
    assert jacobi10.rc.beta(0) == Fraction(-1, 3)
    assert jacobi10.rc.beta_hat(0) == Fraction(2, 9)
    assert jacobi10.rc.beta(1) == Fraction(-1, 15)


def test_charlier_recurrence_values():
    rc = family_recurrence(FamilySpec.charlier(1))
    assert [rc.beta(n) for n in range(4)] == [1, 2, 3, 4]
    assert [rc.beta_hat(k) for k in range(4)] == [1, 2, 3, 4]


def test_semicircle_recurrence_values(semicircle):
    assert semicircle.rc.beta(5) == 0
    assert semicircle.rc.beta_hat(7) == 1


def test_named_special_cases_match_jacobi(legendre, chebyshev_u):
    leg_j = family_recurrence(FamilySpec.jacobi(0, 0))
    cheb_j = family_recurrence(FamilySpec.jacobi(Fraction(1, 2), Fraction(1, 2)))
    for n in range(12):
        assert legendre.rc.beta(n) == leg_j.beta(n)
        assert legendre.rc.beta_hat(n) == leg_j.beta_hat(n)
        assert chebyshev_u.rc.beta(n) == cheb_j.beta(n)
        assert chebyshev_u.rc.beta_hat(n) == cheb_j.beta_hat(n)


def test_chebyshev_t_corner_case():
    # alpha + gamma = -1 exercises the removable singularity in beta_hat_0
    rc = family_recurrence(FamilySpec.jacobi(Fraction(-1, 2), Fraction(-1, 2)))
    assert rc.beta_hat(0) == Fraction(1, 2)
    assert rc.beta_hat(1) == Fraction(1, 4)


def test_invalid_family_parameters():
    with pytest.raises(InvalidFamily):
        FamilySpec.jacobi(-1, 0)
    with pytest.raises(InvalidFamily):
        FamilySpec.charlier(0)


def test_density_values(legendre, semicircle):
    with workprec(128):
        assert legendre.measure.density(mp.mpf("0.37")) == mp.mpf(1) / 2
        assert abs(semicircle.measure.density(mp.mpf(0)) - 1 / mp.pi) < mp.mpf(2) ** -120


def test_charlier_atoms(charlier1):
    with workprec(128):
        x, w = charlier1.measure.atom(3)
        assert x == 3
        assert abs(w - mp.exp(-1) / 6) < mp.mpf(2) ** -120
        bound = charlier1.measure.tail_bound(30)
        assert 0 < bound < mp.mpf("1e-30")


@pytest.mark.parametrize("family", [
    FamilySpec.jacobi(1, 0),
    FamilySpec.jacobi(Fraction(5, 2), Fraction(1, 2)),
    FamilySpec.chebyshev_u(),
    FamilySpec.semicircle(),
    FamilySpec.legendre(),
])
def test_continuous_measures_integrate_to_one(family):
    # independent route: tanh-sinh on the density at elevated precision
    measure = family_measure(family)
    lo, hi = measure.support
    with workprec(192):
        mass = mp.quad(measure.density, [mp.mpf(lo), mp.mpf(hi)])
        assert abs(mass - 1) < mp.mpf(1) / 10 ** 10


def test_charlier_measure_integrates_to_one(charlier1):
    total = oc.integrate_adaptive(None, charlier1.measure, lambda x: 1,
                                  Fraction(1, 10 ** 13), CTX)
    assert rel_err(total, Fraction(1)) < 1e-12


@pytest.mark.parametrize("family", [
    FamilySpec.jacobi(1, 0),
    FamilySpec.jacobi(Fraction(5, 2), Fraction(1, 2)),
    FamilySpec.semicircle(),
])
def test_gauss_rules_reproduce_independent_moments(family):
    # rule moments for x^k, k <= 2m-1, against tanh-sinh moments of the density
    rc = family_recurrence(family)
    measure = family_measure(family)
    rule = gauss_rule(rc, 6, CTX)
    lo, hi = measure.support
    for k in range(0, 12):
        got = integrate(rule, lambda x, _k=k: x ** _k, CTX)
        with workprec(192):
            want = mp.quad(lambda x, _k=k: x ** _k * measure.density(x),
                           [mp.mpf(lo), mp.mpf(hi)])
            assert abs(got - want) <= abs(want) * mp.mpf(1) / 10 ** 10 + mp.mpf(1) / 10 ** 12


def test_charlier_gauss_rule_matches_atom_sums(charlier1):
    # discrete measures never use Golub-Welsch internally, but the Jacobi
    # matrix of the recurrence still encodes the moments; cross-check them
    rule = gauss_rule(charlier1.rc, 5, CTX)
    for k in range(0, 10):
        got = integrate(rule, lambda x, _k=k: x ** _k, CTX)
        want = oc.integrate_adaptive(None, charlier1.measure, lambda x, _k=k: x ** _k,
                                     Fraction(1, 10 ** 15), CTX)
        assert rel_err(got, want) < 1e-12


def test_reference_kappa_jacobi():
    f = FamilySpec.jacobi(1, 0)
    div = DivisorSpec.linear(-1, Fraction(-1))
    assert reference_kappa(f, div, 2, RCTX) == Fraction(-2, 5)


def test_reference_kappa_charlier():
    f = FamilySpec.charlier(1)
    div = DivisorSpec.linear(1)
    got = reference_kappa(f, div, 1, CTX)
    with workprec(192):
        want = (mp.e - 2) / (mp.e - 1)
        assert abs(got - want) < mp.mpf(2) ** -120


def test_reference_kappa_kesten_mckay():
    f = FamilySpec.semicircle()
    div = DivisorSpec.kesten_mckay(Fraction(1, 2), 1)
    for n in (1, 2, 7):
        assert reference_kappa(f, div, n, RCTX) == Fraction(-1, 2)


def test_reference_lambda_values():
    sym_div = DivisorSpec.quadratic(0, -1)
    cheb = FamilySpec.chebyshev_u()
    for n in range(2, 9):
        assert reference_lambda(cheb, sym_div, n, RCTX) == Fraction(-1, 4)
    assert reference_lambda(FamilySpec.jacobi(1, 1), sym_div, 2, RCTX) == Fraction(-2, 15)
    km = DivisorSpec.kesten_mckay(Fraction(1, 2), 1)
    assert reference_lambda(FamilySpec.semicircle(), km, 5, RCTX) == Fraction(1, 4)
    assert reference_lambda(FamilySpec.semicircle(), km, 1, RCTX) == 0


def test_reference_normalization_values():
    assert reference_normalization(FamilySpec.jacobi(1, 0),
                                   DivisorSpec.linear(-1), RCTX) == -1
    assert reference_normalization(FamilySpec.jacobi(Fraction(5, 2), Fraction(1, 2)),
                                   DivisorSpec.linear(-1), RCTX) == Fraction(-5, 4)
    got = reference_normalization(FamilySpec.charlier(1), DivisorSpec.linear(1), CTX)
    with workprec(192):
        assert abs(got - mp.e / (mp.e - 1)) < mp.mpf(2) ** -120
    assert reference_normalization(FamilySpec.jacobi(2, 2),
                                   DivisorSpec.quadratic(0, -1), RCTX) == Fraction(-4, 5)


def test_no_closed_form():
    with pytest.raises(NoClosedForm):
        reference_kappa(FamilySpec.legendre(), DivisorSpec.linear(-3), 2, CTX)
    with pytest.raises(NoClosedForm):
        reference_lambda(FamilySpec.jacobi(1, 0), DivisorSpec.quadratic(0, -1), 2, CTX)
