from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, workprec

from opconnect import BackendUnsupported, Context
from opconnect.numerics import _mpf_to_fraction


def test_rational_backend_is_exact():
    ctx = Context(backend="rational")
    a = ctx.number("1/3")
    b = ctx.number("0.5")
    assert a + b == Fraction(5, 6)
    assert ctx.number(7) == Fraction(7)
    assert ctx.eps == 0


@pytest.mark.parametrize("op", ["sqrt", "exp", "log"])
def test_rational_backend_rejects_irrational_ops(op):
    ctx = Context(backend="rational")
    with pytest.raises(BackendUnsupported):
        getattr(ctx, op)(Fraction(1, 4))


def test_float_number_conversions():
    ctx = Context(prec=128)
    third = ctx.number(Fraction(1, 3))
    with workprec(256):
        err = abs(third - mp.mpf(1) / 3)
        assert err < mp.mpf(2) ** -127
    # binary floats convert exactly
    assert ctx.number(0.5) == 0.5
    # "p/q" strings are parsed exactly before rounding
    with workprec(256):
        assert abs(ctx.number("5/2") - mp.mpf("2.5")) == 0


def test_mpf_to_fraction_round_trip():
    ctx = Context(prec=64)
    x = ctx.number("3.140625")  # dyadic
    assert _mpf_to_fraction(x) == Fraction(3.140625)
    rational = Context(backend="rational")
    assert rational.number(x) == Fraction(3.140625)


def test_precision_promotion_picks_larger():
    lo = Context(prec=64)
    hi = Context(prec=192)
    assert lo.promote(hi).prec == 192
    assert hi.promote(lo).prec == 192
    with pytest.raises(BackendUnsupported):
        lo.promote(Context(backend="rational"))


def test_promoted_arithmetic_keeps_fine_operand_bits():
    # values keep their mantissas across contexts; an operation at the
    # promoted precision adds no error beyond the operands as stored
    lo = Context(prec=64)
    hi = Context(prec=192)
    fine = hi.number(Fraction(1, 3))
    coarse = lo.number(Fraction(1, 7))
    work = lo.promote(hi)
    with work.work():
        product = fine * coarse
    with workprec(320):
        reference = fine * coarse  # exact product of the stored operands
        assert abs(product - reference) < abs(reference) * mp.mpf(2) ** -190
        # and the fine operand really carries 192-bit accuracy
        assert abs(fine - mp.mpf(1) / 3) < mp.mpf(2) ** -190


def test_eps_and_validation():
    assert Context(prec=64).eps == Fraction(1, 2 ** 63)
    with pytest.raises(BackendUnsupported):
        Context(backend="decimal")
    with pytest.raises(BackendUnsupported):
        Context(prec=4)


def test_format_full():
    rational = Context(backend="rational")
    assert rational.format_full(Fraction(2, 3)) == "2/3"
    assert rational.format_full(Fraction(4)) == "4"
    ctx = Context(prec=64)
    text = ctx.format_full(ctx.number("1/3"))
    assert text.startswith("0.3333333333333333")
