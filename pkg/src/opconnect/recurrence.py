"""Monic three-term recurrences: evaluation, norms, Jacobi matrices.

The recurrence convention is

    b_{n+1}(x) = (x - beta_n) b_n(x) - beta_hat_{n-1} b_{n-1}(x),
    b_{-1} = 0,  b_0 = 1,

so ``beta_hat(k)`` stores the coefficient multiplying b_{k} in the step that
produces b_{k+2}.  Keeping that subscript convention verbatim avoids
off-by-one drift between the recursion code and the closed forms it is
checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

from .errors import InsufficientCoefficients, PositivityViolation
from .numerics import Context, DEFAULT_CONTEXT, Scalar


class RecurrenceCoefficients:
    """Coefficient source for a monic three-term recurrence.

    Coefficients come either from stored arrays (finite range) or from
    closed-form generators (unbounded, evaluated lazily).  Instances are
    immutable by convention; the only internal mutation is a quadrature-rule
    cache keyed by (node count, precision).
    """

    def __init__(self, beta: Callable[[int], Scalar], beta_hat: Callable[[int], Scalar],
                 beta_count: Optional[int] = None, beta_hat_count: Optional[int] = None,
                 name: str = ""):
        self._beta = beta
        self._beta_hat = beta_hat
        self.beta_count = beta_count
        self.beta_hat_count = beta_hat_count
        self.name = name
        self._rule_cache = {}

    @classmethod
    def from_arrays(cls, beta: Sequence, beta_hat: Sequence, name: str = "") -> "RecurrenceCoefficients":
        beta = list(beta)
        beta_hat = list(beta_hat)
        for k, bh in enumerate(beta_hat):
            if not bh > 0:
                raise PositivityViolation(f"beta_hat[{k}] = {bh} must be positive")
        return cls(beta.__getitem__, beta_hat.__getitem__,
                   beta_count=len(beta), beta_hat_count=len(beta_hat), name=name)

    def beta(self, n: int) -> Scalar:
        if n < 0 or (self.beta_count is not None and n >= self.beta_count):
            raise InsufficientCoefficients(f"beta[{n}] unavailable ({self.name or 'recurrence'})")
        return self._beta(n)

    def beta_hat(self, k: int) -> Scalar:
        if k < 0 or (self.beta_hat_count is not None and k >= self.beta_hat_count):
            raise InsufficientCoefficients(f"beta_hat[{k}] unavailable ({self.name or 'recurrence'})")
        value = self._beta_hat(k)
        if not value > 0:
            raise PositivityViolation(f"beta_hat[{k}] = {value} must be positive")
        return value

    def __repr__(self):
        span = "unbounded" if self.beta_count is None else f"n<{self.beta_count}"
        return f"RecurrenceCoefficients({self.name or 'anonymous'}, {span})"


@dataclass(frozen=True)
class JacobiMatrix:
    """Symmetric tridiagonal matrix bridging a recurrence to Gauss quadrature."""

    diag: Tuple[Scalar, ...]
    offdiag: Tuple[Scalar, ...]

    @property
    def dimension(self) -> int:
        return len(self.diag)


def eval_monic_sequence(rc: RecurrenceCoefficients, n: int, x, ctx: Context = DEFAULT_CONTEXT):
    """Values [b_0(x), ..., b_n(x)] by running the recurrence forward."""
    if n < 0:
        raise InsufficientCoefficients("degree must be nonnegative")
    with ctx.work():
        xv = ctx.number(x)
        one = ctx.number(1)
        values = [one]
        prev, cur = ctx.number(0), one
        for m in range(n):
            term = (xv - ctx.number(rc.beta(m))) * cur
            if m >= 1:
                term -= ctx.number(rc.beta_hat(m - 1)) * prev
            prev, cur = cur, term
            values.append(cur)
        return values


def squared_norm(rc: RecurrenceCoefficients, n: int, ctx: Context = DEFAULT_CONTEXT) -> Scalar:
    """Squared L2 norm of b_n under the orthogonalizing measure.

    For a normalized measure this is the running product
    beta_hat_0 * ... * beta_hat_{n-1} (Favard), hence 1 for n = 0.
    """
    if n < 0:
        raise InsufficientCoefficients("degree must be nonnegative")
    with ctx.work():
        out = ctx.number(1)
        for k in range(n):
            out = out * ctx.number(rc.beta_hat(k))
        return out


def jacobi_matrix(rc: RecurrenceCoefficients, m: int, ctx: Context = DEFAULT_CONTEXT) -> JacobiMatrix:
    """m-by-m symmetric tridiagonal matrix with sqrt(beta_hat) off the diagonal.

    Requires the float backend (square roots).
    """
    if m < 1:
        raise InsufficientCoefficients("matrix dimension must be at least 1")
    with ctx.work():
        diag = tuple(ctx.number(rc.beta(i)) for i in range(m))
        off = tuple(ctx.sqrt(rc.beta_hat(i)) for i in range(m - 1))
    return JacobiMatrix(diag=diag, offdiag=off)
