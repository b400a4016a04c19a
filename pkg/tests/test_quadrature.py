from fractions import Fraction

import pytest
from mpmath import mp, workprec

import opconnect as oc
from opconnect import (IntegrandSingular, QuadratureDivergent, gauss_rule, integrate,
                       integrate_adaptive, squared_norm)
from opconnect.quadrature import density_integral, measure_integral

from conftest import CTX, rel_err


def test_rule_single_node(chebyshev_u):
    rule = gauss_rule(chebyshev_u.rc, 1, CTX)
    assert float(rule.nodes[0]) == 0.0
    assert float(rule.weights[0]) == 1.0


def test_rule_two_nodes(chebyshev_u):
    rule = gauss_rule(chebyshev_u.rc, 2, CTX)
    assert sorted(float(x) for x in rule.nodes) == [-0.5, 0.5]
    assert [float(w) for w in rule.weights] == [0.5, 0.5]


def test_rule_legendre_three_nodes(legendre):
    rule = gauss_rule(legendre.rc, 3, CTX)
    with workprec(256):
        middle = sorted(rule.nodes, key=abs)[0]
        assert abs(middle) < mp.mpf(2) ** -120
        assert abs(sum(rule.weights) - 1) < mp.mpf(2) ** -120


@pytest.mark.parametrize("m", [16, 64, 256])
def test_weights_positive_and_normalized(legendre, m):
    rule = gauss_rule(legendre.rc, m, CTX)
    assert all(w > 0 for w in rule.weights)
    with workprec(256):
        assert abs(sum(rule.weights) - 1) < mp.mpf(1) / 10 ** 12


def test_nodes_inside_support(jacobi10):
    rule = gauss_rule(jacobi10.rc, 24, CTX)
    assert all(-1 < float(x) < 1 for x in rule.nodes)


def test_exactness_against_norms(legendre, jacobi10, semicircle):
    # rule integrates b_i b_j to diag(squared norms) while i+j <= 2m-1
    for bundle in (legendre, jacobi10, semicircle):
        m = 12
        rule = gauss_rule(bundle.rc, m, CTX)
        with CTX.work():
            values = [oc.eval_monic_sequence(bundle.rc, m - 1, x, CTX) for x in rule.nodes]
            for i in range(m):
                for j in range(i, m):
                    if i + j > 2 * m - 1:
                        continue
                    total = sum(w * vals[i] * vals[j]
                                for w, vals in zip(rule.weights, values))
                    if i == j:
                        want = squared_norm(bundle.rc, i, CTX)
                        assert rel_err(total, want) < 1e-10
                    else:
                        scale = CTX.sqrt(squared_norm(bundle.rc, i, CTX)
                                         * squared_norm(bundle.rc, j, CTX))
                        assert abs(total) <= scale * CTX.number(Fraction(1, 10 ** 10))


def test_integrate_constant(legendre):
    rule = gauss_rule(legendre.rc, 7, CTX)
    assert rel_err(integrate(rule, lambda x: 1, CTX), Fraction(1)) < 1e-30


def test_integrate_examples(legendre, semicircle):
    rule = gauss_rule(legendre.rc, 5, CTX)
    assert rel_err(integrate(rule, lambda x: x * x, CTX), Fraction(1, 3)) < 1e-30
    rule8 = gauss_rule(semicircle.rc, 8, CTX)
    assert rel_err(integrate(rule8, lambda x: x * x, CTX), Fraction(1)) < 1e-30


def test_integrand_singular_at_node(chebyshev_u):
    rule = gauss_rule(chebyshev_u.rc, 1, CTX)  # single node exactly at 0
    with pytest.raises(IntegrandSingular):
        integrate(rule, lambda x: 1 / x, CTX)
    with pytest.raises(IntegrandSingular):
        integrate(rule, lambda x: mp.inf, CTX)


def test_adaptive_rational_divisor(legendre):
    got = integrate_adaptive(legendre.rc, legendre.measure, lambda x: 1 / (3 - x),
                             Fraction(1, 10 ** 12), CTX)
    with workprec(256):
        assert abs(got - mp.log(2) / 2) < mp.mpf(1) / 10 ** 12


def test_adaptive_charlier(charlier1):
    got = integrate_adaptive(None, charlier1.measure, lambda x: 1 / (x + 1),
                             Fraction(1, 10 ** 12), CTX)
    with workprec(256):
        assert abs(got - (1 - mp.exp(-1))) < mp.mpf(1) / 10 ** 12


def test_adaptive_mass(legendre, charlier1):
    for rc, measure in ((legendre.rc, legendre.measure), (None, charlier1.measure)):
        got = integrate_adaptive(rc, measure, lambda x: 1, Fraction(1, 10 ** 12), CTX)
        assert rel_err(got, Fraction(1)) < 1e-12


def test_adaptive_divergent_interior_pole(legendre):
    with pytest.raises(QuadratureDivergent):
        integrate_adaptive(legendre.rc, legendre.measure,
                           lambda x: 1 / (x - Fraction(3, 10)) ** 2,
                           Fraction(1, 10 ** 10), CTX, max_nodes=512)


def test_adaptive_budget_exhausted(legendre):
    edge = CTX.number(Fraction(11, 10))
    with pytest.raises(QuadratureDivergent):
        integrate_adaptive(legendre.rc, legendre.measure, lambda x: 1 / (edge - x),
                           Fraction(1, 10 ** 38), CTX, max_nodes=32)


def test_discrete_atom_budget(charlier1):
    with pytest.raises(QuadratureDivergent):
        integrate_adaptive(None, charlier1.measure, lambda x: 1,
                           Fraction(1, 10 ** 12), CTX, max_atoms=4)


def test_density_route_matches_ladder(legendre):
    f = lambda x: 1 / (3 - x)
    direct = density_integral(legendre.measure, f, CTX, Fraction(1, 10 ** 12))
    ladder = integrate_adaptive(legendre.rc, legendre.measure, f,
                                Fraction(1, 10 ** 12), CTX)
    assert rel_err(direct, ladder) < 1e-12


def test_measure_integral_dispatch(legendre, charlier1):
    got = measure_integral(legendre.rc, legendre.measure, lambda x: x * x, CTX)
    assert rel_err(got, Fraction(1, 3)) < 1e-12
    got = measure_integral(None, charlier1.measure, lambda x: x, CTX)
    assert rel_err(got, Fraction(1)) < 1e-12
