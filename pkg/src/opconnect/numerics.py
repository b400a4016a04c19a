"""Numeric backends: exact rational arithmetic and arbitrary-precision floats.

Scalars are plain ``fractions.Fraction`` values (rational backend) or
``mpmath.mpf`` values (float backend).  A :class:`Context` fixes the backend
and, for floats, the working precision in bits.  Operations that compute
should run inside ``with ctx.work():`` so that every mpf operation rounds at
the context precision; mpf values keep their full mantissa when they cross
context boundaries, so mixing values produced at different precisions loses
nothing as long as the consuming operation runs at the larger precision.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import mp

from .errors import BackendUnsupported

Scalar = Union[Fraction, mpmath.mpf]

RATIONAL = "rational"
FLOAT = "float"


def _mpf_to_fraction(x):
    sign, man, exp, _ = x._mpf_
    if man == 0:
        if exp == 0:
            return Fraction(0)
        raise BackendUnsupported("cannot convert non-finite float to rational")
    value = Fraction(-man if sign else man)
    if exp >= 0:
        return value * (1 << exp)
    return value / (1 << -exp)


@dataclass(frozen=True)
class Context:
    """Numeric context: backend choice plus float precision in bits."""

    backend: str = FLOAT
    prec: int = 128

    def __post_init__(self):
        if self.backend not in (RATIONAL, FLOAT):
            raise BackendUnsupported(f"unknown backend {self.backend!r}")
        if self.backend == FLOAT and self.prec < 8:
            raise BackendUnsupported("float precision below 8 bits")

    @property
    def rational(self) -> bool:
        return self.backend == RATIONAL

    def work(self):
        """Precision scope for arithmetic under this context."""
        if self.rational:
            return contextlib.nullcontext()
        return mp.workprec(self.prec)

    def with_prec(self, prec: int) -> "Context":
        return Context(self.backend, prec)

    def promote(self, other: "Context") -> "Context":
        """Combine two contexts; float precisions promote to the larger one."""
        if self.backend != other.backend:
            raise BackendUnsupported("cannot mix rational and float backends")
        if self.rational:
            return self
        return self if self.prec >= other.prec else other

    @property
    def eps(self) -> Fraction:
        """Unit roundoff (exact), zero for the rational backend."""
        if self.rational:
            return Fraction(0)
        return Fraction(1, 1 << (self.prec - 1))

    def number(self, value) -> Scalar:
        """Convert ints, strings, fractions, floats or mpf to a backend scalar.

        Strings accept ``"p/q"`` and decimal forms; binary floats convert
        exactly (no re-rounding surprises beyond the context precision).
        """
        if self.rational:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            if isinstance(value, str):
                return Fraction(value)
            if isinstance(value, float):
                return Fraction(value)
            if isinstance(value, mpmath.mpf):
                return _mpf_to_fraction(value)
            raise BackendUnsupported(f"cannot make a rational from {type(value).__name__}")
        with self.work():
            if isinstance(value, mpmath.mpf):
                return +value
            if isinstance(value, str) and "/" in value:
                value = Fraction(value)
            if isinstance(value, Fraction):
                return mp.mpf(value.numerator) / value.denominator
            if isinstance(value, (int, float, str)):
                return mp.mpf(value)
        raise BackendUnsupported(f"cannot make a float from {type(value).__name__}")

    def sqrt(self, value) -> Scalar:
        if self.rational:
            raise BackendUnsupported("sqrt is not available in the rational backend")
        with self.work():
            return mp.sqrt(self.number(value))

    def exp(self, value) -> Scalar:
        if self.rational:
            raise BackendUnsupported("exp is not available in the rational backend")
        with self.work():
            return mp.exp(self.number(value))

    def log(self, value) -> Scalar:
        if self.rational:
            raise BackendUnsupported("log is not available in the rational backend")
        with self.work():
            return mp.log(self.number(value))

    def to_float(self, value) -> float:
        if isinstance(value, Fraction):
            return value.numerator / value.denominator
        return float(value)

    def format_full(self, value) -> str:
        """Decimal string carrying the full working precision (CLI output)."""
        if isinstance(value, Fraction):
            return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)
        dps = max(2, int(self.prec * 0.30103) + 3)
        return mpmath.nstr(value, dps, strip_zeros=False)


DEFAULT_CONTEXT = Context()
RATIONAL_CONTEXT = Context(backend=RATIONAL)
