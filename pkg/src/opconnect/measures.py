"""Measure descriptions used by quadrature: densities or discrete atoms."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

CONTINUOUS = "continuous"
DISCRETE = "discrete"


@dataclass(frozen=True)
class MeasureSpec:
    """A positive normalized measure.

    Continuous measures carry a density callable and a compact support
    interval.  Discrete measures carry an atom callable ``k -> (x_k, w_k)``
    for k = 0, 1, ... and a tail bound ``K -> upper bound on sum_{k>K} w_k``
    so truncated summation can certify its remainder.  Density and atom
    callables evaluate at the caller's active mpmath precision.
    """

    kind: str
    support: Tuple[object, object]
    density: Optional[Callable] = None
    atom: Optional[Callable[[int], Tuple[object, object]]] = None
    tail_bound: Optional[Callable[[int], object]] = None
    atom_count: Optional[int] = None  # None = infinite atom sequence
    label: str = ""

    @property
    def continuous(self) -> bool:
        return self.kind == CONTINUOUS

    def scaled(self, ratio: Callable, tail_ratio_bound: Optional[Callable[[int], object]] = None,
               label: str = "") -> "MeasureSpec":
        """Measure with the same support and density/weights times ratio(x).

        For infinite discrete measures a ``tail_ratio_bound(K)`` giving an
        upper bound on |ratio| over atoms past K is needed to keep a valid
        tail bound.
        """
        if self.continuous:
            base = self.density
            return replace(self, density=(lambda x, _b=base, _r=ratio: _b(x) * _r(x)),
                           label=label or f"scaled({self.label})")
        base_atom = self.atom
        def atom(k, _a=base_atom, _r=ratio):
            x, w = _a(k)
            return x, w * _r(x)
        tail = None
        if self.tail_bound is not None and tail_ratio_bound is not None:
            old_tail = self.tail_bound
            tail = lambda K: old_tail(K) * tail_ratio_bound(K)
        return replace(self, atom=atom, tail_bound=tail,
                       label=label or f"scaled({self.label})")


def continuous_measure(density: Callable, lo, hi, label: str = "") -> MeasureSpec:
    return MeasureSpec(kind=CONTINUOUS, support=(lo, hi), density=density, label=label)


def discrete_measure(atom: Callable[[int], Tuple[object, object]],
                     tail_bound: Optional[Callable[[int], object]] = None,
                     atom_count: Optional[int] = None, support=(0, None),
                     label: str = "") -> MeasureSpec:
    return MeasureSpec(kind=DISCRETE, support=support, atom=atom,
                       tail_bound=tail_bound, atom_count=atom_count, label=label)
