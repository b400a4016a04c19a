"""Divisor specifications and connection-coefficient containers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .errors import InsufficientCoefficients, InvalidDivisor
from .numerics import Context, DEFAULT_CONTEXT, Scalar

LINEAR = "linear"
QUADRATIC = "quadratic"
AUTO = "auto"


@dataclass(frozen=True)
class DivisorSpec:
    """Reciprocal-polynomial density ratio C/(x+D) or C/(x^2+Dx+E).

    C may be the string ``"auto"``, meaning it is determined later from the
    normalization of the modified measure.
    """

    kind: str
    D: object
    E: object = None
    C: object = AUTO
    meta: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in (LINEAR, QUADRATIC):
            raise InvalidDivisor(f"unknown divisor kind {self.kind!r}")
        if self.kind == QUADRATIC and self.E is None:
            raise InvalidDivisor("quadratic divisor needs E")

    @property
    def degree(self) -> int:
        return 1 if self.kind == LINEAR else 2

    @property
    def resolved(self) -> bool:
        return self.C != AUTO

    def with_constant(self, C) -> "DivisorSpec":
        return DivisorSpec(self.kind, self.D, self.E, C, self.meta)

    def poly(self, x, ctx: Context = DEFAULT_CONTEXT) -> Scalar:
        """The divisor polynomial value x+D or x^2+Dx+E."""
        with ctx.work():
            xv = ctx.number(x)
            if self.kind == LINEAR:
                return xv + ctx.number(self.D)
            return xv * xv + ctx.number(self.D) * xv + ctx.number(self.E)

    def ratio(self, x, ctx: Context = DEFAULT_CONTEXT) -> Scalar:
        """Density ratio C/poly(x); requires a resolved C."""
        if not self.resolved:
            raise InvalidDivisor("divisor constant C is unresolved")
        with ctx.work():
            return ctx.number(self.C) / self.poly(x, ctx)

    @classmethod
    def linear(cls, D, C=AUTO) -> "DivisorSpec":
        return cls(LINEAR, D=D, C=C)

    @classmethod
    def quadratic(cls, D, E, C=AUTO) -> "DivisorSpec":
        return cls(QUADRATIC, D=D, E=E, C=C)

    @classmethod
    def kesten_mckay(cls, rho, y) -> "DivisorSpec":
        """Quadratic divisor turning the semicircle law into Kesten-McKay.

        With 0 < |rho| < 1 and |y| <= 2:
            C = (1-rho^2)/rho^2,  D = -(1+rho^2) y / rho,
            E = ((1-rho^2)/rho)^2 + y^2.
        """
        rho = Fraction(rho)
        y = Fraction(y)
        if not (0 < abs(rho) < 1):
            raise InvalidDivisor("kesten-mckay needs 0 < |rho| < 1")
        if abs(y) > 2:
            raise InvalidDivisor("kesten-mckay needs |y| <= 2")
        one = Fraction(1)
        C = (one - rho * rho) / (rho * rho)
        D = -(one + rho * rho) * y / rho
        E = ((one - rho * rho) / rho) ** 2 + y * y
        return cls(QUADRATIC, D=D, E=E, C=C,
                   meta={"preset": "kesten-mckay", "rho": rho, "y": y})


@dataclass(frozen=True)
class ConnectionCoefficients:
    """Coefficients linking two monic families:

        order 1:  a_n = b_n + kappa_n b_{n-1}
        order 2:  a_n = b_n + kappa_n b_{n-1} + lambda_n b_{n-2}

    Sequences are indexed from n = 1; lambda_1 is always 0.
    """

    order: int
    kappas: Tuple[Scalar, ...]
    lambdas: Tuple[Scalar, ...] = ()

    def __post_init__(self):
        if self.order not in (1, 2):
            raise InvalidDivisor("connection order must be 1 or 2")
        if self.order == 2:
            if len(self.lambdas) != len(self.kappas):
                raise InsufficientCoefficients("kappa and lambda ranges differ")
            if self.lambdas and self.lambdas[0] != 0:
                raise InvalidDivisor("lambda_1 must be zero")

    @property
    def max_index(self) -> int:
        return len(self.kappas)

    def kappa(self, n: int) -> Scalar:
        if not 1 <= n <= len(self.kappas):
            raise InsufficientCoefficients(f"kappa_{n} unavailable (have 1..{len(self.kappas)})")
        return self.kappas[n - 1]

    def lam(self, n: int) -> Scalar:
        if self.order != 2:
            raise InsufficientCoefficients("order-1 connection has no lambda sequence")
        if not 1 <= n <= len(self.lambdas):
            raise InsufficientCoefficients(f"lambda_{n} unavailable (have 1..{len(self.lambdas)})")
        return self.lambdas[n - 1]

    @classmethod
    def order1(cls, kappas) -> "ConnectionCoefficients":
        return cls(order=1, kappas=tuple(kappas))

    @classmethod
    def order2(cls, kappas, lambdas) -> "ConnectionCoefficients":
        return cls(order=2, kappas=tuple(kappas), lambdas=tuple(lambdas))
