"""One tolerance policy for every real-valued comparison in the package.

Exact carriers (booleans, chain levels, integers) compare with ``==``;
real-valued carriers go through a :class:`Comparator`.  All modules share
``DEFAULT_COMPARATOR`` unless the caller supplies another one, so there is
a single place to tighten or loosen floating-point equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Comparator:
    """Absolute + relative tolerance equality for real numbers."""

    rel: float = 1e-9
    abs: float = 1e-12

    def eq(self, a: float, b: float) -> bool:
        if a == b:
            # covers ints, equal floats and matching infinities
            return True
        if math.isinf(a) or math.isinf(b):
            return False
        return abs(a - b) <= max(self.abs, self.rel * max(abs(a), abs(b)))

    def is_zero(self, a: float) -> bool:
        return self.eq(a, 0.0)


DEFAULT_COMPARATOR = Comparator()
